#pragma once

#include "selffield/vec3.hpp"
#include "selffield/wavepacket.hpp"

namespace selffield {

/// A Fourier-space vector field sample.
struct SpectralVector {
  Vec3 q;       // 1/m
  CVec3 value;  // field-dependent units
};

/// v - q (q.v)/|q|^2. Throws SingularWavevector at q = 0.
Vec3 transverse_project(const Vec3& q, const Vec3& v);

/// Convective current (charge/M) p_c rho^(q), before transverse projection.
/// Units A m (Fourier transform of A/m^2).
SpectralVector classical_current_fourier(const GaussianPacket& p, const Vec3& q);

/// Quasi-static Coulomb-gauge potential
///   A^(q) = charge / (M c^2 eps0 q^2) rho^(q) [p_c - q (q.p_c)/q^2].
SpectralVector vector_potential_fourier(const GaussianPacket& p, const Vec3& q);

/// Transverse electric field i (q.v_c) A^(q), with the breathing term dropped.
SpectralVector transverse_efield_fourier(const GaussianPacket& p, const Vec3& q);

/// int_0^inf |rho^(q)|^2 dq by adaptive quadrature in u = q b (units 1/m).
double spectral_weight_integral(const GaussianPacket& p);

struct MeanPotential {
  Vec3 potential;       // <A> over the internal density, V s/m
  Vec3 momentum_shift;  // -charge <A>; M v_c = p_c + momentum_shift
  Vec3 momentum_shift_closed_form;  // -(4/3) (E_el / M c^2) p_c
};

/// Internal-density average of the self potential. The radial integral is
/// evaluated by quadrature; the angular factor 2/3 analytically.
MeanPotential mean_vector_potential(const GaussianPacket& p);

/// M (1 + (4/3) E_el / M c^2) v_c.
Vec3 renormalized_momentum(const GaussianPacket& p);

/// Field momentum eps0 (2 pi)^-3 int q (q.v_c) |A^|^2 d^3q, radial quadrature.
Vec3 field_momentum(const GaussianPacket& p);

/// p_c + field momentum, p_c taken at lowest order (M v_c).
Vec3 total_momentum(const GaussianPacket& p);

/// p_c [1 + (4/15) beta^2 E_el / M c^2].
Vec3 total_momentum_closed_form(const GaussianPacket& p);

/// Quasi-static validity: retardation time b/c against the convective time b/v_c.
struct RetardationCheck {
  double retardation_time;  // s
  double convective_time;   // s, infinite at beta = 0
  double ratio;             // retardation / convective = beta
};
RetardationCheck retardation_check(const GaussianPacket& p);

}  // namespace selffield
