#pragma once

#include <string>

#include "selffield/localization.hpp"

namespace selffield {

/// Neutral atom: Gaussian centre-of-mass packet of width b carrying a nucleus
/// of charge Z e, screened by a Gaussian electron cloud of radius gamma.
struct NeutralAtom {
  int z_nucleus = 1;
  double mass_total = 0.0;  // kg
  double gamma = 0.0;       // m
  std::string label;

  void validate() const;
};

NeutralAtom hydrogen_atom();
/// Helium with a 1s cloud of radius a_B / 1.69 (screened effective charge).
NeutralAtom helium_atom();
/// "H" or "He".
NeutralAtom atom_preset(const std::string& name);

/// Z e exp(-b^2 q^2) [1 - exp(-gamma^2 q^2)], in coulombs.
double atom_charge_density_fourier(const NeutralAtom& a, double b, double q,
                                   const PhysicalConstants& k = codata2018());

/// 1/b - 2 sqrt2 / sqrt(2 b^2 + gamma^2) + 1/sqrt(b^2 + gamma^2), evaluated in
/// a cancellation-free form. Lies in [0, 1/b].
double atom_screening_bracket(double b, double gamma);
double atom_screening_bracket_slope(double b, double gamma);

/// (Z e)^2 / (8 sqrt2 pi^{3/2} eps0) times the screening bracket.
double atom_electrostatic_energy(const NeutralAtom& a, double b, const PhysicalConstants& k = codata2018());
/// Spectral integral (Z e)^2/(4 pi^2 eps0) int exp(-2 b^2 q^2)(1 - exp(-gamma^2 q^2))^2 dq.
double atom_electrostatic_energy_quadrature(const NeutralAtom& a, double b,
                                            const PhysicalConstants& k = codata2018());

/// Bare-nucleus limit (Z e)^2 / (8 sqrt2 pi^{3/2} eps0 b).
double bare_nucleus_energy(const NeutralAtom& a, double b, const PhysicalConstants& k = codata2018());

/// Centre-of-mass localization:
///   3 hbar^2 / (16 M b^2) - (2/3) beta^2 E_atom(b).
/// Throws NoLocalization when screening leaves no bound minimum.
LocalizationResult atom_minimize(const NeutralAtom& a, double beta, const PhysicalConstants& k = codata2018());

}  // namespace selffield
