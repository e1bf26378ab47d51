#include "selffield/localization.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "selffield/error.hpp"
#include "selffield/minimizer.hpp"
#include "selffield/parallel.hpp"
#include "selffield/wavepacket.hpp"

namespace selffield {

using std::numbers::pi;

unsigned default_thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SELFFIELD_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<unsigned>(std::min<long>(v, hw));
  }
  return hw;
}

double closed_form_radius(const ParticleSpec& p, double beta, const PhysicalConstants& k) {
  const auto s = derived_scales(p, beta, k);
  return 9.0 * std::sqrt(pi) / (4.0 * std::sqrt(2.0)) / (beta * beta) * s.bohr_like_length;
}

double closed_form_binding(const ParticleSpec& p, double beta, const PhysicalConstants& k) {
  const auto s = derived_scales(p, beta, k);
  const double b2 = beta * beta;
  return 4.0 / (27.0 * pi) * b2 * b2 * s.rydberg_like_energy;
}

double LocalizationFunctional::value(double b) const {
  const GaussianPacket packet(particle, b, beta, {1.0, 0.0, 0.0}, constants);
  return assemble_budget(packet, mode).localization_energy();
}

double LocalizationFunctional::slope(double b) const {
  // Kinetic term scales as b^-2, every self-field term as b^-1.
  const GaussianPacket packet(particle, b, beta, {1.0, 0.0, 0.0}, constants);
  const EnergyBudget e = assemble_budget(packet, mode);
  double d = -2.0 * e.internal_kinetic - e.current_potential;
  if (mode == BudgetMode::Assembled) d -= e.transverse_field;
  return d / b;
}

LocalizationResult minimize_radius(const ParticleSpec& p, double beta, BudgetMode mode,
                                   const PhysicalConstants& k) {
  p.validate();
  require_subluminal(beta);
  if (!p.charged()) {
    throw Error(ErrorKind::NotApplicable, "neutral particle: use the atom module");
  }
  if (beta == 0.0) {
    throw Error(ErrorKind::NoMinimum, "beta = 0: the localization energy decreases monotonically in b");
  }

  const LocalizationFunctional functional{p, beta, mode, k};
  const double seed = closed_form_radius(p, beta, k);
  const ScalarMinimum m = minimize_positive([&](double b) { return functional.value(b); }, seed, {},
                                            [&](double b) { return functional.slope(b); });
  if (!(m.fx < 0.0)) {
    throw Error(ErrorKind::NoMinimum, "energy minimum is not below the delocalized state");
  }

  LocalizationResult r;
  r.b_star = m.x;
  r.binding_energy = -m.fx;
  r.beta = beta;
  r.particle = p;
  r.mode = mode;
  r.bracket_used = {m.bracket_low, m.bracket_high};
  r.b_over_de_broglie = r.b_star / *derived_scales(p, beta, k).de_broglie_length;
  r.beta_warning = beta > kBetaWarningThreshold;
  return r;
}

LocalizationResult scale_to_particle(const LocalizationResult& res, int z, double mass,
                                     const PhysicalConstants& k) {
  if (z == 0) throw Error(ErrorKind::NotApplicable, "z = 0: neutral species belong to the atom module");
  ParticleSpec target{static_cast<double>(z), mass, "scaled"};
  target.validate();
  const double mass_ratio = res.particle.mass / mass;
  const double charge_ratio = std::abs(res.particle.z) / std::abs(static_cast<double>(z));
  LocalizationResult out = res;
  out.particle = target;
  out.b_star = res.b_star * mass_ratio * charge_ratio * charge_ratio;
  const double c2 = 1.0 / (charge_ratio * charge_ratio);
  out.binding_energy = res.binding_energy / mass_ratio * c2 * c2;
  out.b_over_de_broglie = out.b_star / *derived_scales(target, res.beta, k).de_broglie_length;
  const double scale = mass_ratio * charge_ratio * charge_ratio;
  out.bracket_used = {res.bracket_used.first * scale, res.bracket_used.second * scale};
  return out;
}

double debroglie_ratio(const ParticleSpec& p, double beta, const PhysicalConstants& k) {
  if (!(beta > 0.0)) throw Error(ErrorKind::InvalidArgument, "de Broglie ratio needs beta > 0");
  return minimize_radius(p, beta, BudgetMode::PaperQuoted, k).b_over_de_broglie;
}

std::vector<SweepRow> sweep(const ParticleSpec& p, const std::vector<double>& beta_grid, BudgetMode mode,
                            unsigned threads, const PhysicalConstants& k) {
  std::vector<SweepRow> rows(beta_grid.size());
  parallel_for_index(beta_grid.size(), threads, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.beta = beta_grid[i];
    try {
      row.result = minimize_radius(p, row.beta, mode, k);
    } catch (const Error& e) {
      row.status = std::string(to_string(e.kind()));
      row.message = e.what();
    }
  });
  return rows;
}

}  // namespace selffield
