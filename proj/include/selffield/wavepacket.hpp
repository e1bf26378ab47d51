#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "selffield/scales.hpp"
#include "selffield/vec3.hpp"

namespace selffield {

/// Gaussian internal profile phi(r) = (4 pi b^2)^(-3/4) exp(-r^2 / 8 b^2) carried
/// by a plane wave of classical momentum p_c. Expressed in the packet frame: the
/// centre r_c is the origin.
class GaussianPacket {
 public:
  GaussianPacket(ParticleSpec particle, double width, double beta, Vec3 direction = {1.0, 0.0, 0.0},
                 const PhysicalConstants& constants = codata2018());

  double width() const { return b_; }
  double beta() const { return beta_; }
  const Vec3& direction() const { return direction_; }
  const ParticleSpec& particle() const { return particle_; }
  const PhysicalConstants& constants() const { return constants_; }

  double charge() const { return particle_.z * constants_.e_charge; }
  double mass() const { return particle_.mass; }
  Vec3 velocity() const { return direction_ * (beta_ * constants_.c); }
  /// Lowest-order classical momentum M v_c.
  Vec3 momentum() const { return velocity() * particle_.mass; }
  double rest_energy() const { return particle_.mass * constants_.c * constants_.c; }

  GaussianPacket with_width(double width) const;

 private:
  ParticleSpec particle_;
  double b_;
  double beta_;
  Vec3 direction_;
  PhysicalConstants constants_;
};

/// Isotropic probability density rho(r) on [0, support_radius].
class RadialProfile {
 public:
  /// `breakpoints` are radii where rho is not smooth (kinks, jumps); the
  /// quadratures split there.
  RadialProfile(std::function<double(double)> rho, double support_radius, std::vector<double> breakpoints = {});

  static RadialProfile gaussian(double width);
  static RadialProfile uniform_ball(double radius);
  /// Piecewise-linear interpolation of samples; r strictly increasing.
  static RadialProfile sampled(std::vector<double> r, std::vector<double> rho);
  /// Two-column CSV (r_m, rho_per_m3). A single leading '#' line is allowed.
  static RadialProfile from_csv(const std::filesystem::path& path);

  double density(double r) const { return r > support_ ? 0.0 : rho_(r); }
  double support_radius() const { return support_; }
  const std::vector<double>& breakpoints() const { return breaks_; }
  /// 4 pi int r^2 rho dr.
  double norm() const { return norm_; }
  RadialProfile normalized() const;

  /// Integrate g(r) over [0, support] piecewise between breakpoints.
  double integrate_radial(const std::function<double(double)>& g, double rel_tol = 1e-12) const;

 private:
  std::function<double(double)> rho_;
  double support_;
  std::vector<double> breaks_;
  double norm_ = 0.0;
};

/// Tolerance on |norm - 1| accepted by the spectral routines.
inline constexpr double kNormalizationTolerance = 1e-10;

/// Fourier transform of the Gaussian density, exp(-b^2 q^2).
double density_fourier(const GaussianPacket& p, double q);

/// 4 pi int r^2 rho(r) sin(qr)/(qr) dr by adaptive quadrature.
double fourier_density_numeric(const RadialProfile& prof, double q);

/// 3 hbar^2 / (16 M b^2).
double internal_kinetic_energy(const GaussianPacket& p);

}  // namespace selffield
