#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "selffield/energy_budget.hpp"
#include "selffield/scales.hpp"

namespace selffield {

struct LocalizationResult {
  double b_star = 0.0;          // m
  double binding_energy = 0.0;  // J, positive depth below the delocalized state
  double beta = 0.0;
  ParticleSpec particle;
  BudgetMode mode = BudgetMode::PaperQuoted;
  double b_over_de_broglie = 0.0;
  std::pair<double, double> bracket_used{0.0, 0.0};
  /// beta above 0.3, where dropped beta^4 terms stop being small.
  bool beta_warning = false;
};

/// Above this beta the results carry a warning flag.
inline constexpr double kBetaWarningThreshold = 0.3;

/// (9 sqrt(pi) / 4 sqrt 2) beta^-2 times the particle's Bohr-like radius.
double closed_form_radius(const ParticleSpec& p, double beta, const PhysicalConstants& k = codata2018());
/// (4 / 27 pi) beta^4 times the particle's Rydberg-like energy.
double closed_form_binding(const ParticleSpec& p, double beta, const PhysicalConstants& k = codata2018());

/// Width-dependent part of the energy and its slope d/db, as minimized over b.
struct LocalizationFunctional {
  ParticleSpec particle;
  double beta;
  BudgetMode mode;
  PhysicalConstants constants;

  double value(double b) const;
  double slope(double b) const;
};

/// Numerically minimizes the localization energy over the packet width.
LocalizationResult minimize_radius(const ParticleSpec& p, double beta, BudgetMode mode,
                                   const PhysicalConstants& k = codata2018());

/// Rescales a result to charge z e and mass M: b ~ 1/(M z^2), binding ~ M z^4.
LocalizationResult scale_to_particle(const LocalizationResult& res, int z, double mass,
                                     const PhysicalConstants& k = codata2018());

/// b* / lambda_deBroglie; independent of the mass at fixed beta.
double debroglie_ratio(const ParticleSpec& p, double beta, const PhysicalConstants& k = codata2018());

struct SweepRow {
  double beta = 0.0;
  std::optional<LocalizationResult> result;
  std::string status = "ok";  // "ok" or an error-kind name
  std::string message;
};

/// One row per beta, in input order. Row failures are recorded, never thrown.
std::vector<SweepRow> sweep(const ParticleSpec& p, const std::vector<double>& beta_grid, BudgetMode mode,
                            unsigned threads = 1, const PhysicalConstants& k = codata2018());

}  // namespace selffield
