#include "selffield/atom.hpp"

#include <cmath>
#include <numbers>

#include "selffield/error.hpp"
#include "selffield/minimizer.hpp"
#include "selffield/quadrature.hpp"

namespace selffield {

using std::numbers::pi;

void NeutralAtom::validate() const {
  if (z_nucleus < 1) throw Error(ErrorKind::InvalidArgument, "z_nucleus must be >= 1");
  if (!(gamma > 0.0)) throw Error(ErrorKind::InvalidArgument, "gamma must be positive");
  if (!(mass_total > 0.9 * z_nucleus * reference::kProtonMass)) {
    throw Error(ErrorKind::InvalidArgument, "mass_total below 0.9 Z m_p");
  }
}

NeutralAtom hydrogen_atom() {
  return {1, reference::kProtonMass + codata2018().m_electron, reference::kBohrRadius, "H"};
}

NeutralAtom helium_atom() { return {2, 6.646479073e-27, reference::kBohrRadius / 1.69, "He"}; }

NeutralAtom atom_preset(const std::string& name) {
  if (name == "H") return hydrogen_atom();
  if (name == "He") return helium_atom();
  throw Error(ErrorKind::InvalidArgument, "unknown atom preset '" + name + "'");
}

namespace {

double pointlike_prefactor(int z, const PhysicalConstants& k) {
  const double q = z * k.e_charge;
  return q * q / (8.0 * std::sqrt(2.0) * std::pow(pi, 1.5) * k.eps0);
}

}  // namespace

double atom_charge_density_fourier(const NeutralAtom& a, double b, double q, const PhysicalConstants& k) {
  a.validate();
  if (!(b > 0.0) || !(q >= 0.0)) throw Error(ErrorKind::InvalidArgument, "need b > 0 and q >= 0");
  const double u = b * q, g = a.gamma * q;
  return a.z_nucleus * k.e_charge * std::exp(-u * u) * (-std::expm1(-g * g));
}

double atom_screening_bracket(double b, double gamma) {
  // 1/b - sqrt2/s2 and sqrt2/s2 - 1/s1 each rationalized, then subtracted.
  const double g2 = gamma * gamma;
  const double s2 = std::sqrt(2.0 * b * b + g2);
  const double s1 = std::sqrt(b * b + g2);
  const double first = g2 / (b * s2 * (s2 + std::sqrt(2.0) * b));
  const double second = g2 / (s2 * s1 * (std::sqrt(2.0) * s1 + s2));
  return first - second;
}

double atom_screening_bracket_slope(double b, double gamma) {
  const double g2 = gamma * gamma;
  const double s2 = 2.0 * b * b + g2;
  const double s1 = b * b + g2;
  return -1.0 / (b * b) + 4.0 * std::sqrt(2.0) * b / (s2 * std::sqrt(s2)) - b / (s1 * std::sqrt(s1));
}

double atom_electrostatic_energy(const NeutralAtom& a, double b, const PhysicalConstants& k) {
  a.validate();
  if (!(b > 0.0)) throw Error(ErrorKind::InvalidArgument, "b must be positive");
  return pointlike_prefactor(a.z_nucleus, k) * atom_screening_bracket(b, a.gamma);
}

double atom_electrostatic_energy_quadrature(const NeutralAtom& a, double b, const PhysicalConstants& k) {
  a.validate();
  if (!(b > 0.0)) throw Error(ErrorKind::InvalidArgument, "b must be positive");
  const double ratio = a.gamma / b;
  auto integrand = [ratio](double u) {
    const double screen = -std::expm1(-ratio * ratio * u * u);
    return std::exp(-2.0 * u * u) * screen * screen;
  };
  const double q = a.z_nucleus * k.e_charge;
  return q * q / (4.0 * pi * pi * k.eps0) * quad::integral(integrand, 0.0, 40.0) / b;
}

double bare_nucleus_energy(const NeutralAtom& a, double b, const PhysicalConstants& k) {
  return pointlike_prefactor(a.z_nucleus, k) / b;
}

LocalizationResult atom_minimize(const NeutralAtom& a, double beta, const PhysicalConstants& k) {
  a.validate();
  require_subluminal(beta);
  if (beta == 0.0) throw Error(ErrorKind::NoLocalization, "beta = 0: no convective attraction");

  const double kinetic = 3.0 * k.hbar * k.hbar / (16.0 * a.mass_total);
  const double attraction = (2.0 / 3.0) * beta * beta * pointlike_prefactor(a.z_nucleus, k);
  auto energy = [&](double b) { return kinetic / (b * b) - attraction * atom_screening_bracket(b, a.gamma); };
  auto slope = [&](double b) {
    return -2.0 * kinetic / (b * b * b) - attraction * atom_screening_bracket_slope(b, a.gamma);
  };

  // bare-nucleus minimizer 2 K / C as the seed
  const double seed = 2.0 * kinetic / attraction;
  ScalarMinimum m;
  try {
    m = minimize_positive(energy, seed, {}, slope);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BracketFailure) throw;
    throw Error(ErrorKind::NoLocalization, std::string("screening removes the minimum: ") + e.what());
  }
  if (!(m.fx < 0.0)) {
    throw Error(ErrorKind::NoLocalization, "minimum lies above the delocalized state: screening wins");
  }

  const ParticleSpec composite{0.0, a.mass_total, a.label.empty() ? "atom" : a.label};
  LocalizationResult r;
  r.b_star = m.x;
  r.binding_energy = -m.fx;
  r.beta = beta;
  r.particle = composite;
  r.mode = BudgetMode::PaperQuoted;
  r.bracket_used = {m.bracket_low, m.bracket_high};
  r.b_over_de_broglie = r.b_star / *derived_scales(composite, beta, k).de_broglie_length;
  r.beta_warning = beta > kBetaWarningThreshold;
  return r;
}

}  // namespace selffield
