#pragma once

#include <functional>
#include <optional>

namespace selffield {

struct MinimizeOptions {
  /// Relative tolerance on x for the derivative-free stage. Below about 1e-8
  /// the function values themselves stop resolving the minimum, which is what
  /// the optional slope polish is for.
  double rel_tol = 1e-8;
  double bracket_low = 0.1;   // initial bracket [low, high] x seed
  double bracket_high = 10.0;
  double expansion = 8.0;
  int max_expansions = 5;
  int max_iterations = 400;
};

struct ScalarMinimum {
  double x = 0.0;
  double fx = 0.0;
  double bracket_low = 0.0;
  double bracket_high = 0.0;
  int evaluations = 0;
  bool polished = false;
};

/// Minimizes f over x > 0 by Brent's parabolic/golden-section search in log x,
/// starting from [low, high] x seed and widening the bracket when the minimum
/// sits on its edge. When `slope` (df/dx) is given, the result is refined to
/// the zero of the slope by bisection. Throws BracketFailure.
ScalarMinimum minimize_positive(const std::function<double(double)>& f, double seed,
                                const MinimizeOptions& opt = {},
                                const std::function<double(double)>& slope = {});

/// Plain Brent minimization on [a, b] with absolute tolerance `tol`.
ScalarMinimum brent_minimize(const std::function<double(double)>& f, double a, double b, double tol,
                             int max_iterations);

}  // namespace selffield
