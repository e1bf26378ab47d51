#include "selffield/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>

namespace selffield::quad {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

// One Kronrod panel on [a, b], evaluated on the reference interval so the
// error estimate and the value share the same scale.
Result panel(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  Result r;
  r.value = half * GK::integrate([&](double t) { return f(mid + half * t); }, -1.0, 1.0, 0, 0.0, &r.error, &r.l1);
  r.error *= std::abs(half);
  r.l1 *= std::abs(half);
  return r;
}

Result refine(const std::function<double(double)>& f, double a, double b, const Result& whole, double abs_tol,
              unsigned depth) {
  if (depth == 0 || whole.error <= abs_tol) return whole;
  const double mid = 0.5 * (a + b);
  const Result l = panel(f, a, mid), r = panel(f, mid, b);
  const Result lr = refine(f, a, mid, l, 0.5 * abs_tol, depth - 1);
  const Result rr = refine(f, mid, b, r, 0.5 * abs_tol, depth - 1);
  return {lr.value + rr.value, lr.error + rr.error, lr.l1 + rr.l1};
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b, const Options& opt) {
  if (a == b) return {};
  const Result whole = panel(f, a, b);
  return refine(f, a, b, whole, std::max(opt.rel_tol * whole.l1, opt.abs_tol), opt.max_depth);
}

double integral(const std::function<double(double)>& f, double a, double b, const Options& opt) {
  return integrate(f, a, b, opt).value;
}

const std::array<Node, 20>& gauss_legendre20() {
  static const std::array<Node, 20> rule = [] {
    using GL = boost::math::quadrature::gauss<double, 20>;
    // boost stores the non-negative half of the symmetric rule.
    std::array<Node, 20> r{};
    const auto& x = GL::abscissa();
    const auto& w = GL::weights();
    std::size_t k = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      r[k++] = {x[i], w[i]};
      r[k++] = {-x[i], w[i]};
    }
    return r;
  }();
  return rule;
}

}  // namespace selffield::quad
