#include "selffield/coherent_field.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "selffield/energy_budget.hpp"
#include "selffield/error.hpp"
#include "selffield/quadrature.hpp"

namespace selffield {

using std::numbers::pi;

namespace {

// Gaussian tail exp(-2 u^2) is below 1e-300 past u = 40.
constexpr double kUMax = 40.0;

double require_nonzero(const Vec3& q) {
  const double q2 = dot(q, q);
  if (!(q2 > 0.0)) throw Error(ErrorKind::SingularWavevector, "wavevector q = 0 has no transverse projection");
  return q2;
}

// charge / (M c^2 eps0)
double potential_prefactor(const GaussianPacket& p) {
  const auto& k = p.constants();
  return p.charge() / (p.mass() * k.c * k.c * k.eps0);
}

}  // namespace

Vec3 transverse_project(const Vec3& q, const Vec3& v) {
  const double q2 = require_nonzero(q);
  return v - q * (dot(q, v) / q2);
}

SpectralVector classical_current_fourier(const GaussianPacket& p, const Vec3& q) {
  const double rho = density_fourier(p, norm(q));
  return {q, to_complex(p.momentum() * (p.charge() / p.mass() * rho))};
}

SpectralVector vector_potential_fourier(const GaussianPacket& p, const Vec3& q) {
  const double q2 = require_nonzero(q);
  const double rho = density_fourier(p, std::sqrt(q2));
  const Vec3 perp = transverse_project(q, p.momentum());
  return {q, to_complex(perp * (potential_prefactor(p) * rho / q2))};
}

SpectralVector transverse_efield_fourier(const GaussianPacket& p, const Vec3& q) {
  SpectralVector a = vector_potential_fourier(p, q);
  const std::complex<double> factor{0.0, dot(q, p.velocity())};
  a.value = factor * a.value;
  return a;
}

double spectral_weight_integral(const GaussianPacket& p) {
  const double u_integral = quad::integral([](double u) { return std::exp(-2.0 * u * u); }, 0.0, kUMax);
  return u_integral / p.width();
}

MeanPotential mean_vector_potential(const GaussianPacket& p) {
  // (2 pi)^-3 int d^3q q^-2 |rho^|^2 [p - q^ (q^.p)] = (2 pi)^-3 (8 pi / 3) I p
  const double angular = 8.0 * pi / 3.0;
  const double radial = spectral_weight_integral(p) / std::pow(2.0 * pi, 3);
  MeanPotential m;
  m.potential = p.momentum() * (potential_prefactor(p) * angular * radial);
  m.momentum_shift = m.potential * (-p.charge());
  m.momentum_shift_closed_form = p.momentum() * (-(4.0 / 3.0) * electrostatic_energy(p) / p.rest_energy());
  return m;
}

Vec3 renormalized_momentum(const GaussianPacket& p) {
  return p.velocity() * (p.mass() * (1.0 + (4.0 / 3.0) * electrostatic_energy(p) / p.rest_energy()));
}

Vec3 field_momentum(const GaussianPacket& p) {
  // eps0 (2 pi)^-3 int q (q.v) |A^|^2 d^3q. Along v only; the angular factor
  // int cos^2 (1 - cos^2) dOmega = 8 pi / 15.
  const auto& k = p.constants();
  const double pref = potential_prefactor(p);
  const double pc = norm(p.momentum());
  const double angular = 8.0 * pi / 15.0;
  const double radial = spectral_weight_integral(p) / std::pow(2.0 * pi, 3);
  return p.velocity() * (k.eps0 * pref * pref * pc * pc * angular * radial);
}

Vec3 total_momentum(const GaussianPacket& p) { return p.momentum() + field_momentum(p); }

Vec3 total_momentum_closed_form(const GaussianPacket& p) {
  const double beta = p.beta();
  return p.momentum() * (1.0 + (4.0 / 15.0) * beta * beta * electrostatic_energy(p) / p.rest_energy());
}

RetardationCheck retardation_check(const GaussianPacket& p) {
  const double c = p.constants().c;
  RetardationCheck r;
  r.retardation_time = p.width() / c;
  r.convective_time =
      p.beta() > 0.0 ? p.width() / (p.beta() * c) : std::numeric_limits<double>::infinity();
  r.ratio = p.beta();
  return r;
}

}  // namespace selffield
