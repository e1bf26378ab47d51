#include "selffield/minimizer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "selffield/error.hpp"

namespace selffield {

ScalarMinimum brent_minimize(const std::function<double(double)>& f, double a, double b, double tol,
                             int max_iterations) {
  constexpr double kGolden = 0.3819660112501051;  // (3 - sqrt 5) / 2
  const double eps = std::sqrt(std::numeric_limits<double>::epsilon());

  ScalarMinimum out;
  double x = a + kGolden * (b - a);
  double w = x, v = x;
  double fx = f(x);
  double fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  out.evaluations = 1;

  for (int it = 0; it < max_iterations; ++it) {
    const double m = 0.5 * (a + b);
    const double tol1 = eps * std::abs(x) * 1e-2 + tol;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) break;

    bool golden = true;
    if (std::abs(e) > tol1) {
      // parabola through x, w, v
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double etemp = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * etemp) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (m > x) ? tol1 : -tol1;
        golden = false;
      }
    }
    if (golden) {
      e = (x >= m) ? a - x : b - x;
      d = kGolden * e;
    }
    const double u = std::abs(d) >= tol1 ? x + d : x + (d > 0 ? tol1 : -tol1);
    const double fu = f(u);
    ++out.evaluations;

    if (fu <= fx) {
      if (u >= x) a = x; else b = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  out.x = x;
  out.fx = fx;
  return out;
}

namespace {

// Bisection on the sign change of the slope around x0, in log space.
std::optional<double> polish_by_slope(const std::function<double(double)>& slope, double x0) {
  for (double delta = 1e-7; delta < 0.5; delta *= 10.0) {
    double lo = std::log(x0) + std::log1p(-delta);
    double hi = std::log(x0) + std::log1p(delta);
    double s_lo = slope(std::exp(lo));
    double s_hi = slope(std::exp(hi));
    if (!(s_lo < 0.0 && s_hi > 0.0)) continue;
    for (int i = 0; i < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon(); ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double s = slope(std::exp(mid));
      if (s == 0.0) return std::exp(mid);
      if (s < 0.0) lo = mid; else hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
  }
  return std::nullopt;
}

}  // namespace

ScalarMinimum minimize_positive(const std::function<double(double)>& f, double seed, const MinimizeOptions& opt,
                                const std::function<double(double)>& slope) {
  if (!(seed > 0.0) || !std::isfinite(seed)) {
    throw Error(ErrorKind::InvalidArgument, "minimizer seed must be positive and finite");
  }
  auto g = [&](double t) { return f(std::exp(t)); };

  double lo = seed * opt.bracket_low;
  double hi = seed * opt.bracket_high;
  int evaluations = 0;
  for (int expansion = 0; expansion <= opt.max_expansions; ++expansion) {
    const double tlo = std::log(lo), thi = std::log(hi);
    ScalarMinimum m = brent_minimize(g, tlo, thi, opt.rel_tol, opt.max_iterations);
    evaluations += m.evaluations;
    // accept only a minimum strictly inside the bracket
    const double edge = 1e-3 * (thi - tlo);
    const bool interior = (m.x - tlo) > edge && (thi - m.x) > edge && m.fx < g(tlo) && m.fx < g(thi);
    evaluations += 2;
    if (interior) {
      ScalarMinimum out;
      out.x = std::exp(m.x);
      out.fx = m.fx;
      out.bracket_low = lo;
      out.bracket_high = hi;
      if (slope) {
        if (auto x = polish_by_slope(slope, out.x)) {
          const double fx = f(*x);
          // keep the polished point unless it is visibly worse
          if (fx <= out.fx + 1e-12 * std::abs(out.fx)) {
            out.x = *x;
            out.fx = fx;
            out.polished = true;
          }
        }
      }
      out.evaluations = evaluations;
      return out;
    }
    lo /= opt.expansion;
    hi *= opt.expansion;
  }
  std::ostringstream msg;
  msg.precision(6);
  msg << "no interior minimum in [" << lo * opt.expansion << ", " << hi / opt.expansion << "] after "
      << opt.max_expansions << " expansions from seed " << seed;
  throw Error(ErrorKind::BracketFailure, msg.str());
}

}  // namespace selffield
