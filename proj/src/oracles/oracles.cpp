#include "oracles.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "selffield/energy_budget.hpp"
#include "selffield/error.hpp"
#include "selffield/quadrature.hpp"

namespace selffield::oracle {

using std::numbers::pi;

namespace {

constexpr double kUMax = 40.0;
// The integrands stay finite at u -> 0 but 1/q^4 overflows there; the skipped
// [0, kUMin] slice weighs at most ~kUMin relative.
constexpr double kUMin = 1e-12;

double re_dot(const CVec3& a, const CVec3& b) {
  return std::real(std::conj(a.x) * b.x + std::conj(a.y) * b.y + std::conj(a.z) * b.z);
}

double sq(const CVec3& a) { return re_dot(a, a); }

}  // namespace

double sphere_integral(const std::function<double(const Vec3&)>& f) {
  constexpr int kPhi = 32;
  double sum = 0.0;
  for (const auto& node : quad::gauss_legendre20()) {
    const double ct = node.x;
    const double st = std::sqrt(1.0 - ct * ct);
    double ring = 0.0;
    for (int j = 0; j < kPhi; ++j) {
      const double phi = 2.0 * pi * (j + 0.5) / kPhi;
      ring += f(Vec3{st * std::cos(phi), st * std::sin(phi), ct});
    }
    sum += node.w * ring * (2.0 * pi / kPhi);
  }
  return sum;
}

double radial_integral(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(f, a, b, rel_tol);
}

double spectral_integral(const std::function<double(const Vec3&)>& f, double width) {
  const double inv = 1.0 / width;
  auto radial = [&](double u) {
    const double q = u * inv;
    return u * u * sphere_integral([&](const Vec3& n) { return f(n * q); });
  };
  return radial_integral(radial, kUMin, kUMax) * inv * inv * inv / std::pow(2.0 * pi, 3);
}

Coefficients extract_coefficients(const GaussianPacket& p) {
  if (!(p.beta() > 0.0)) throw Error(ErrorKind::InvalidArgument, "coefficient extraction needs beta > 0");
  const auto& k = p.constants();
  const double b = p.width();
  const double beta = p.beta();
  const double e_el = electrostatic_energy_spectral(p);
  const double mc2 = p.rest_energy();
  const double pc = norm(p.momentum());
  const Vec3 d = p.direction();

  Coefficients c;
  const double a_par = spectral_integral(
      [&](const Vec3& q) {
        const auto a = vector_potential_fourier(p, q).value;
        return density_fourier(p, norm(q)) * std::real(a.x * d.x + a.y * d.y + a.z * d.z);
      },
      b);
  c.mean_potential = -p.charge() * a_par / ((e_el / mc2) * pc);

  const double ja = spectral_integral(
      [&](const Vec3& q) {
        return re_dot(classical_current_fourier(p, q).value, vector_potential_fourier(p, q).value);
      },
      b);
  c.current_potential = -0.5 * ja / (beta * beta * e_el);

  const double e2 = spectral_integral([&](const Vec3& q) { return sq(transverse_efield_fourier(p, q).value); }, b);
  c.transverse_field = k.eps0 * e2 / (beta * beta * beta * beta * e_el);

  const Vec3 v = p.velocity();
  const double pf = spectral_integral(
      [&](const Vec3& q) { return dot(q, d) * dot(q, v) * sq(vector_potential_fourier(p, q).value); }, b);
  c.field_momentum = k.eps0 * pf / ((beta * beta * e_el / mc2) * pc);
  return c;
}

double electrostatic_energy_spectral(const GaussianPacket& p) {
  const auto& k = p.constants();
  const double b = p.width();
  const double zq = p.charge();
  const double i = radial_integral([](double u) { return std::exp(-2.0 * u * u); }, 0.0, kUMax) / b;
  return zq * zq / (4.0 * pi * pi * k.eps0) * i;
}

double electrostatic_energy_real_space(const RadialProfile& prof, double z, const PhysicalConstants& k) {
  const auto& br = prof.breakpoints();
  const double q_tot = z * k.e_charge;
  auto segmented = [&](const std::function<double(double)>& g, double hi) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < br.size() && br[i] < hi; ++i) {
      const double a = br[i], b = std::min(br[i + 1], hi);
      if (b > a) s += radial_integral(g, a, b, 1e-12);
    }
    return s;
  };
  auto enclosed = [&](double r) {
    return q_tot * 4.0 * pi * segmented([&](double s) { return s * s * prof.density(s); }, r);
  };
  const double inside = segmented(
      [&](double r) {
        // Q(r)/r ~ (4 pi / 3) rho(0) r^2 near the origin, where the quadrature
        // of a vanishing interval returns nan.
        const double q_over_r = r < 1e-6 * prof.support_radius()
                                    ? q_tot * 4.0 * pi / 3.0 * prof.density(0.0) * r * r
                                    : enclosed(r) / r;
        return q_over_r * q_over_r;
      },
      prof.support_radius());
  const double q_all = enclosed(prof.support_radius());
  return (inside + q_all * q_all / prof.support_radius()) / (8.0 * pi * k.eps0);
}

double kinetic_energy_spectral(const GaussianPacket& p) {
  const auto& k = p.constants();
  const double b = p.width();
  const double amp = std::pow(8.0 * pi * b * b, 3) / std::pow(4.0 * pi * b * b, 1.5);
  const double i = radial_integral([](double u) { return u * u * u * u * std::exp(-4.0 * u * u); }, 0.0, kUMax);
  const double moment = 4.0 * pi * amp * i / std::pow(b, 5) / std::pow(2.0 * pi, 3);
  return k.hbar * k.hbar / (2.0 * p.mass()) * moment;
}

double uniform_ball_form_factor(double x) {
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    return 1.0 - x2 / 10.0 + x2 * x2 / 280.0;
  }
  return 3.0 * (std::sin(x) - x * std::cos(x)) / (x * x * x);
}

double brute_force_minimum(const std::function<double(double)>& f, double lo, double hi, int scan_points) {
  if (!(lo > 0.0) || !(hi > lo) || scan_points < 3) {
    throw Error(ErrorKind::InvalidArgument, "brute-force scan needs 0 < lo < hi and >= 3 points");
  }
  const double llo = std::log(lo), lhi = std::log(hi);
  const double step = (lhi - llo) / (scan_points - 1);
  int best = 0;
  double fbest = f(lo);
  for (int i = 1; i < scan_points; ++i) {
    const double v = f(std::exp(llo + step * i));
    if (v < fbest) {
      fbest = v;
      best = i;
    }
  }
  const double a = llo + step * std::max(0, best - 1);
  const double b = llo + step * std::min(scan_points - 1, best + 1);
  const auto r = boost::math::tools::brent_find_minima([&](double lx) { return f(std::exp(lx)); }, a, b,
                                                       std::numeric_limits<double>::digits);
  return std::exp(r.first);
}

Vec3 lattice_vector_potential(const GaussianPacket& p, int n, double box, const Vec3& r) {
  const double dk = 2.0 * pi / box;
  const int m = n / 2 - 1;
  Vec3 sum;
  for (int iz = -m; iz <= m; ++iz) {
    for (int iy = -m; iy <= m; ++iy) {
      for (int ix = -m; ix <= m; ++ix) {
        if (ix == 0 && iy == 0 && iz == 0) continue;
        const Vec3 q{ix * dk, iy * dk, iz * dk};
        const auto a = vector_potential_fourier(p, q).value;
        const std::complex<double> ph = std::polar(1.0, dot(q, r));
        sum += Vec3{std::real(a.x * ph), std::real(a.y * ph), std::real(a.z * ph)};
      }
    }
  }
  return sum / (box * box * box);
}

Vec3 continuum_vector_potential_at_centre(const GaussianPacket& p) {
  Vec3 out;
  for (int c = 0; c < 3; ++c) {
    out[c] = spectral_integral([&](const Vec3& q) { return std::real(vector_potential_fourier(p, q).value[c]); },
                               p.width());
  }
  return out;
}

}  // namespace selffield::oracle
