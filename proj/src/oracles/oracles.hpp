#pragma once

// Independent reference computations used by the tests, the acceptance
// binary and the CLI self-check. Radial integrals use tanh-sinh quadrature
// (the library uses Gauss-Kronrod); angular integrals run over the full
// sphere with no symmetry reduction.

#include <functional>

#include "selffield/coherent_field.hpp"
#include "selffield/wavepacket.hpp"

namespace selffield::oracle {

/// int dOmega f(n) with 20-point Gauss-Legendre in cos(theta) and a 32-point
/// trapezoid in phi. Exact for polynomials in n of degree < 32.
double sphere_integral(const std::function<double(const Vec3&)>& f);

/// Tanh-sinh on [a, b].
double radial_integral(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-13);

/// (2 pi)^-3 int d^3q f(q) for integrands decaying on the scale 1/width.
double spectral_integral(const std::function<double(const Vec3&)>& f, double width);

/// Dimensionless coefficients extracted from 3D quadrature of the field
/// operators: mean-potential momentum shift / ((E_el/Mc^2) |p_c|), current
/// potential / (beta^2 E_el), transverse field / (beta^4 E_el) and field
/// momentum / ((beta^2 E_el / Mc^2) |p_c|). Requires beta > 0.
struct Coefficients {
  double mean_potential = 0.0;
  double current_potential = 0.0;
  double transverse_field = 0.0;
  double field_momentum = 0.0;
};
Coefficients extract_coefficients(const GaussianPacket& p);

/// (Ze)^2/(4 pi^2 eps0) int exp(-2 b^2 q^2) dq by tanh-sinh.
double electrostatic_energy_spectral(const GaussianPacket& p);

/// Real-space self-energy (1/(8 pi eps0)) int_0^inf Q(r)^2 / r^2 dr with Q the
/// enclosed charge of `prof` carrying total charge z e.
double electrostatic_energy_real_space(const RadialProfile& prof, double z,
                                       const PhysicalConstants& k = codata2018());

/// (hbar^2/2M) (2 pi)^-3 int q^2 |phi^(q)|^2 d^3q for the Gaussian amplitude.
double kinetic_energy_spectral(const GaussianPacket& p);

/// 3 (sin x - x cos x) / x^3.
double uniform_ball_form_factor(double x);

/// Minimizes f over [lo, hi] by a log-spaced scan followed by Boost's Brent
/// search. Returns the abscissa.
double brute_force_minimum(const std::function<double(double)>& f, double lo, double hi, int scan_points = 400);

/// A at position r for the periodized Gaussian current on an n^3 grid of edge
/// box: lattice sum of the analytic transform over the modes the grid keeps.
Vec3 lattice_vector_potential(const GaussianPacket& p, int n, double box, const Vec3& r = {});

/// A at the packet centre in open space, (2 pi)^-3 int A^(q) d^3q.
Vec3 continuum_vector_potential_at_centre(const GaussianPacket& p);

}  // namespace selffield::oracle
