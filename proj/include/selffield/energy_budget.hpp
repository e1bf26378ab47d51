#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "selffield/wavepacket.hpp"

namespace selffield {

/// PaperQuoted keeps kinetic + current-potential terms only (the truncation
/// whose minimizer is the closed-form radius); Assembled adds the transverse
/// field energy.
enum class BudgetMode { PaperQuoted, Assembled };

std::string_view to_string(BudgetMode mode) noexcept;
/// Accepts "paper", "paper_quoted", "assembled".
BudgetMode parse_budget_mode(std::string_view text);

struct EnergyBudget {
  double convective = 0.0;          // P^2/2M, held b-independent
  double internal_kinetic = 0.0;
  double electrostatic_E_el = 0.0;  // reference scale, not part of the sum
  double current_potential = 0.0;
  double transverse_field = 0.0;
  double a_squared_rate = 0.0;
  bool a_squared_included = false;
  double total = 0.0;
  BudgetMode mode = BudgetMode::Assembled;

  /// Width-dependent part summed without the convective constant, which is
  /// ~10^7 times larger for a slow electron and would swamp it in rounding.
  double localization_energy() const;
  /// convective + localization_energy(); assemble_budget stores exactly this.
  double sum_of_parts() const { return convective + localization_energy(); }
};

/// Gaussian closed form (Ze)^2 / (8 sqrt2 pi^{3/2} eps0 b).
double electrostatic_energy(const GaussianPacket& p);
/// (Ze)^2 / (4 pi^2 eps0) int_0^inf |rho^(q)|^2 dq for the Gaussian, by quadrature.
double electrostatic_energy_quadrature(const GaussianPacket& p);
/// Same spectral integral for an arbitrary isotropic profile of charge z e.
/// Throws DivergenceError when |rho^|^2 is not integrable.
double electrostatic_energy(const RadialProfile& prof, double z, const PhysicalConstants& k = codata2018());

/// -(1/2) int j_c . A_c = -(2/3) beta^2 E_el.
double current_potential_energy(const GaussianPacket& p);
double current_potential_energy_quadrature(const GaussianPacket& p);

/// eps0 int E_perp^2 = (4/15) beta^4 E_el.
double transverse_field_energy(const GaussianPacket& p);
double transverse_field_energy_quadrature(const GaussianPacket& p);

/// (eps0/4) d^2/dt^2 int A_c^2 for a breathing Gaussian:
/// (4/3) (beta^2/c^2) d/dt(E_el b db/dt) = (4/3) (beta^2/c^2) (E_el b) d^2b/dt^2,
/// since E_el b does not depend on b.
double a_squared_rate_term(const GaussianPacket& p, double d2b_dt2);

/// Width acceleration hbar^2 / (16 M^2 b^3) of a freely spreading Gaussian.
double free_spreading_width_acceleration(const GaussianPacket& p);

struct BudgetOptions {
  bool include_a_squared_rate = false;
  double d2b_dt2 = 0.0;  // m/s^2
};

EnergyBudget assemble_budget(const GaussianPacket& p, BudgetMode mode, const BudgetOptions& opt = {});

/// Flat JSON with energies in eV and a `mode` string.
nlohmann::ordered_json to_json(const EnergyBudget& budget, const PhysicalConstants& k = codata2018());

}  // namespace selffield
