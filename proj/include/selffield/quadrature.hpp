#pragma once

#include <array>
#include <functional>

namespace selffield::quad {

struct Options {
  double rel_tol = 1e-12;
  double abs_tol = 1e-300;
  unsigned max_depth = 24;
};

struct Result {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  double l1 = 0.0;     // integral of |f|
};

/// Adaptive 15-point Gauss-Kronrod on [a, b]; converges when the error
/// estimate falls below max(rel_tol * L1 norm of the integrand, abs_tol).
Result integrate(const std::function<double(double)>& f, double a, double b, const Options& opt = {});

/// Convenience overload returning the value only.
double integral(const std::function<double(double)>& f, double a, double b, const Options& opt = {});

struct Node {
  double x;
  double w;
};

/// Fixed 20-point Gauss-Legendre rule on [-1, 1] for polynomial angular
/// integrals (exact through degree 39).
const std::array<Node, 20>& gauss_legendre20();

}  // namespace selffield::quad
