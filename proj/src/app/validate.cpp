#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "selffield/atom.hpp"
#include "selffield/cli.hpp"
#include "selffield/coherent_field.hpp"
#include "selffield/dynamics.hpp"
#include "selffield/energy_budget.hpp"
#include "selffield/error.hpp"
#include "selffield/localization.hpp"
#include "selffield/parallel.hpp"

namespace selffield::cli {

using std::numbers::pi;

bool ValidationReport::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const ValidationEntry& e) { return e.pass; });
}

namespace {

struct Check {
  std::string name;
  double tolerance;
  std::function<double()> residual;
};

double rel(double got, double want) { return std::abs(got / want - 1.0); }

std::vector<Check> build_checks(const PhysicalConstants& k) {
  const ParticleSpec e = electron(k);
  const double a_b = reference::kBohrRadius;
  const GaussianPacket unit(e, a_b, 0.1, {1.0, 0.0, 0.0}, k);
  std::vector<Check> c;

  c.push_back({"constants_positive", 0.0, [k] {
                 try {
                   k.validate();
                   return 0.0;
                 } catch (const Error&) {
                   return 1.0;
                 }
               }});
  c.push_back({"bohr_radius_reference", 1e-9,
               [=] { return rel(derived_scales(e, 0.0, k).bohr_like_length, reference::kBohrRadius); }});
  c.push_back({"rydberg_energy_reference", 1e-9, [=] {
                 return rel(to_ev(derived_scales(e, 0.0, k).rydberg_like_energy, k), reference::kRydbergEnergyEv);
               }});
  c.push_back({"compton_identity", 1e-15, [=] {
                 return std::abs(derived_scales(e, 0.0, k).compton_length * e.mass * k.c / k.hbar - 1.0);
               }});
  c.push_back({"localization_radius_closed_form", 1e-6, [=] {
                 const double beta = 0.1;
                 const double want = 9.0 * std::sqrt(pi) / (4.0 * std::sqrt(2.0)) / (beta * beta) * a_b;
                 return rel(minimize_radius(e, beta, BudgetMode::PaperQuoted, k).b_star, want);
               }});
  c.push_back({"binding_energy_closed_form", 1e-6, [=] {
                 const double beta = 0.1;
                 const double want = 4.0 / (27.0 * pi) * std::pow(beta, 4) * reference::kRydbergEnergyEv;
                 return rel(to_ev(minimize_radius(e, beta, BudgetMode::PaperQuoted, k).binding_energy, k), want);
               }});
  c.push_back({"mean_potential_coefficient", 1e-8, [=] {
                 const auto m = mean_vector_potential(unit);
                 const double scale = electrostatic_energy(unit) / unit.rest_energy() * norm(unit.momentum());
                 return rel(dot(m.momentum_shift, unit.direction()) / scale, -4.0 / 3.0);
               }});
  c.push_back({"current_potential_coefficient", 1e-8, [=] {
                 return rel(current_potential_energy_quadrature(unit) / (0.01 * electrostatic_energy(unit)),
                            -2.0 / 3.0);
               }});
  c.push_back({"transverse_field_coefficient", 1e-8, [=] {
                 return rel(transverse_field_energy_quadrature(unit) / (1e-4 * electrostatic_energy(unit)),
                            4.0 / 15.0);
               }});
  c.push_back({"field_momentum_coefficient", 1e-8, [=] {
                 const double scale = 0.01 * electrostatic_energy(unit) / unit.rest_energy() * norm(unit.momentum());
                 return rel(dot(field_momentum(unit), unit.direction()) / scale, 4.0 / 15.0);
               }});
  c.push_back({"electrostatic_closed_vs_quadrature", 1e-10, [=] {
                 double worst = 0.0;
                 for (double b : {1e-12, 1e-9, 1e-6}) {
                   const GaussianPacket p(e, b, 0.1, {1.0, 0.0, 0.0}, k);
                   worst = std::max(worst, rel(electrostatic_energy_quadrature(p), electrostatic_energy(p)));
                 }
                 return worst;
               }});
  c.push_back({"kinetic_closed_vs_spectral", 1e-10, [=] {
                 double worst = 0.0;
                 for (double b : {1e-12, 1e-9, 1e-6}) {
                   const GaussianPacket p(e, b, 0.1, {1.0, 0.0, 0.0}, k);
                   worst = std::max(worst, rel(oracle::kinetic_energy_spectral(p), internal_kinetic_energy(p)));
                 }
                 return worst;
               }});
  c.push_back({"fourier_density_gaussian", 1e-10, [=] {
                 const auto prof = RadialProfile::gaussian(a_b);
                 double worst = 0.0;
                 for (double u : {0.0, 1.0, 3.0}) {
                   worst = std::max(worst, std::abs(fourier_density_numeric(prof, u / a_b) - std::exp(-u * u)));
                 }
                 return worst;
               }});
  c.push_back({"vector_potential_transversality", 1e-12, [=] {
                 std::mt19937_64 rng(12345);
                 std::normal_distribution<double> g(0.0, 1.0);
                 double worst = 0.0;
                 for (int i = 0; i < 200; ++i) {
                   const Vec3 q = Vec3{g(rng), g(rng), g(rng)} / a_b;
                   const auto a = vector_potential_fourier(unit, q).value;
                   const double an = norm(a);
                   if (an == 0.0) continue;
                   worst = std::max(worst, std::abs(q.x * a.x + q.y * a.y + q.z * a.z) / (norm(q) * an));
                 }
                 return worst;
               }});
  c.push_back({"virial_kinetic", 1e-9, [=] {
                 const auto r = minimize_radius(e, 0.1, BudgetMode::PaperQuoted, k);
                 const GaussianPacket p(e, r.b_star, 0.1, {1.0, 0.0, 0.0}, k);
                 return rel(internal_kinetic_energy(p), r.binding_energy);
               }});
  c.push_back({"virial_current", 1e-9, [=] {
                 const auto r = minimize_radius(e, 0.1, BudgetMode::PaperQuoted, k);
                 const GaussianPacket p(e, r.b_star, 0.1, {1.0, 0.0, 0.0}, k);
                 return rel(-current_potential_energy(p), 2.0 * r.binding_energy);
               }});
  c.push_back({"debroglie_mass_independence", 1e-12,
               [=] { return rel(debroglie_ratio(proton(), 0.1, k), debroglie_ratio(e, 0.1, k)); }});
  c.push_back({"scale_to_particle_vs_direct", 1e-9, [=] {
                 const auto el = minimize_radius(e, 0.1, BudgetMode::PaperQuoted, k);
                 const auto pr = minimize_radius(proton(), 0.1, BudgetMode::PaperQuoted, k);
                 const auto sc = scale_to_particle(el, 1, reference::kProtonMass, k);
                 return std::max(rel(sc.b_star, pr.b_star), rel(sc.binding_energy, pr.binding_energy));
               }});
  c.push_back({"atom_bracket_bounds", 1e-12, [] {
                 double worst = 0.0;
                 for (int i = 0; i < 20; ++i) {
                   const double b = std::pow(10.0, -3.0 + 6.0 * i / 19.0);
                   double prev = -1.0;
                   for (int j = 0; j < 20; ++j) {
                     const double gam = std::pow(10.0, -3.0 + 6.0 * j / 19.0);
                     const double v = atom_screening_bracket(b, gam) * b;
                     worst = std::max({worst, -v, v - 1.0});
                     if (prev >= 0.0) worst = std::max(worst, prev - v);
                     prev = v;
                   }
                 }
                 return worst;
               }});
  c.push_back({"atom_large_b_limit", 1e-5, [k] {
                 const auto h = hydrogen_atom();
                 const double b = 1e3 * h.gamma;
                 return atom_electrostatic_energy(h, b, k) / bare_nucleus_energy(h, b, k);
               }});
  c.push_back({"atom_small_b_limit", 2e-3, [k] {
                 const auto h = hydrogen_atom();
                 const double b = 1e-3 * h.gamma;
                 return rel(atom_electrostatic_energy(h, b, k), bare_nucleus_energy(h, b, k));
               }});
  c.push_back({"grid_norm_drift_per_step", 1e-12, [=] {
                 const double b = fit_width_to_grid(e, 0.1, 32, 1.2e-11, 4.0, k);
                 GridSpec g;
                 g.n = 32;
                 g.box = 8.0 * b;
                 g.dt = 2e-21;
                 g.particle = e;
                 g.constants = k;
                 GridSolver s(g);
                 auto st = s.init(GaussianPacket(e, b, 0.1, {1.0, 0.0, 0.0}, k));
                 double worst = 0.0, last = s.norm(st);
                 for (int i = 0; i < 5; ++i) {
                   s.step(st);
                   const double now = s.norm(st);
                   worst = std::max(worst, std::abs(now - last));
                   last = now;
                 }
                 return worst;
               }});
  c.push_back({"grid_transversality", 1e-10, [=] {
                 const double b = fit_width_to_grid(e, 0.1, 32, 1.2e-11, 4.0, k);
                 GridSpec g;
                 g.n = 32;
                 g.box = 8.0 * b;
                 g.dt = 2e-21;
                 g.particle = e;
                 g.constants = k;
                 GridSolver s(g);
                 auto st = s.init(GaussianPacket(e, b, 0.1, {1.0, 0.0, 0.0}, k));
                 s.step(st);
                 return s.transversality_residual(st);
               }});
  return c;
}

}  // namespace

ValidationReport validate(const PhysicalConstants& constants, unsigned threads) {
  const auto checks = build_checks(constants);
  ValidationReport report;
  report.entries.resize(checks.size());
  parallel_for_index(checks.size(), threads, [&](std::size_t i) {
    auto& entry = report.entries[i];
    entry.name = checks[i].name;
    entry.tolerance = checks[i].tolerance;
    try {
      entry.residual = checks[i].residual();
      entry.pass = std::isfinite(entry.residual) && entry.residual <= entry.tolerance;
    } catch (const std::exception& ex) {
      entry.residual = std::numeric_limits<double>::quiet_NaN();
      entry.pass = false;
      entry.detail = ex.what();
    }
  });
  return report;
}

nlohmann::ordered_json to_json(const ValidationReport& r) {
  nlohmann::ordered_json j;
  j["tool"] = "selffield";
  j["version"] = SELFFIELD_VERSION;
  j["passed"] = r.passed();
  j["constants_version"] = kConstantsVersion;
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : r.entries) {
    nlohmann::ordered_json x;
    x["name"] = e.name;
    x["pass"] = e.pass;
    x["residual"] = std::isfinite(e.residual) ? nlohmann::ordered_json(e.residual) : nlohmann::ordered_json(nullptr);
    x["tolerance"] = e.tolerance;
    if (!e.detail.empty()) x["detail"] = e.detail;
    j["entries"].push_back(x);
  }
  return j;
}

ValidationReport report_from_json(const nlohmann::json& j) {
  ValidationReport r;
  std::string path = "$.entries";
  try {
    const auto& entries = j.at("entries");
    if (!entries.is_array()) throw Error(ErrorKind::SchemaError, path + ": expected an array");
    for (std::size_t i = 0; i < entries.size(); ++i) {
      path = "$.entries[" + std::to_string(i) + "]";
      const auto& x = entries[i];
      ValidationEntry e;
      e.name = x.at("name").get<std::string>();
      e.pass = x.at("pass").get<bool>();
      e.residual = x.at("residual").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                               : x.at("residual").get<double>();
      e.tolerance = x.at("tolerance").get<double>();
      if (x.contains("detail")) e.detail = x["detail"].get<std::string>();
      r.entries.push_back(e);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::SchemaError, path + ": " + ex.what());
  }
  return r;
}

}  // namespace selffield::cli
