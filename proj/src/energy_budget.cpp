#include "selffield/energy_budget.hpp"

#include <cmath>
#include <numbers>

#include "selffield/coherent_field.hpp"
#include "selffield/error.hpp"
#include "selffield/quadrature.hpp"

namespace selffield {

using std::numbers::pi;

std::string_view to_string(BudgetMode mode) noexcept {
  return mode == BudgetMode::PaperQuoted ? "paper_quoted" : "assembled";
}

BudgetMode parse_budget_mode(std::string_view text) {
  if (text == "paper" || text == "paper_quoted" || text == "PaperQuoted") return BudgetMode::PaperQuoted;
  if (text == "assembled" || text == "Assembled") return BudgetMode::Assembled;
  throw Error(ErrorKind::InvalidArgument, "unknown budget mode '" + std::string(text) + "'");
}

double EnergyBudget::localization_energy() const {
  double t = internal_kinetic + current_potential;
  if (mode == BudgetMode::Assembled) t += transverse_field;
  if (a_squared_included) t += a_squared_rate;
  return t;
}

namespace {

double coulomb_scale(double z, const PhysicalConstants& k) {
  const double q = z * k.e_charge;
  return q * q / (4.0 * pi * pi * k.eps0);
}

// charge^2 v^2 / (eps0 c^2) (2 pi)^-3 I, shared by the field-energy quadratures.
double field_scale(const GaussianPacket& p) {
  const auto& k = p.constants();
  const double v = p.beta() * k.c;
  const double q = p.charge();
  return q * q * v * v / (k.eps0 * k.c * k.c) * spectral_weight_integral(p) / std::pow(2.0 * pi, 3);
}

}  // namespace

double electrostatic_energy(const GaussianPacket& p) {
  const auto& k = p.constants();
  const double q = p.charge();
  return q * q / (8.0 * std::sqrt(2.0) * std::pow(pi, 1.5) * k.eps0 * p.width());
}

double electrostatic_energy_quadrature(const GaussianPacket& p) {
  return coulomb_scale(p.particle().z, p.constants()) * spectral_weight_integral(p);
}

double electrostatic_energy(const RadialProfile& prof, double z, const PhysicalConstants& k) {
  auto weight = [&](double q) {
    const double f = fourier_density_numeric(prof, q);
    return f * f;
  };
  quad::Options opt;
  opt.rel_tol = 1e-10;
  opt.max_depth = 18;

  // Integrate over doubling shells [X, 2X] until a shell is negligible.
  // Shells that stop shrinking signal a non-integrable |rho^|^2.
  double x = 8.0 / prof.support_radius();
  double total = quad::integral(weight, 0.0, x, opt);
  double previous = total;
  int flat_shells = 0;
  for (int shell = 0; shell < 48; ++shell) {
    // Far shells sit at the ~1e-34 noise floor of |rho^|^2; judge them
    // against the running total rather than their own size.
    opt.abs_tol = 1e-12 * std::abs(total);
    const double c = quad::integral(weight, x, 2.0 * x, opt);
    total += c;
    if (std::abs(c) <= 1e-10 * std::abs(total)) return coulomb_scale(z, k) * total;
    flat_shells = (c > 0.9 * previous) ? flat_shells + 1 : 0;
    if (flat_shells >= 4) {
      throw Error(ErrorKind::DivergenceError,
                  "|rho^(q)|^2 shells stop decaying near q = " + std::to_string(2.0 * x) + " 1/m");
    }
    previous = c;
    x *= 2.0;
  }
  throw Error(ErrorKind::DivergenceError, "spectral self-energy integral did not converge");
}

double current_potential_energy(const GaussianPacket& p) {
  return -(2.0 / 3.0) * p.beta() * p.beta() * electrostatic_energy(p);
}

double current_potential_energy_quadrature(const GaussianPacket& p) {
  // -(1/2) (2 pi)^-3 int j^*.A^ d^3q; angular factor 8 pi / 3.
  return -0.5 * field_scale(p) * (8.0 * pi / 3.0);
}

double transverse_field_energy(const GaussianPacket& p) {
  const double b2 = p.beta() * p.beta();
  return (4.0 / 15.0) * b2 * b2 * electrostatic_energy(p);
}

double transverse_field_energy_quadrature(const GaussianPacket& p) {
  // eps0 (2 pi)^-3 int (q.v)^2 |A^|^2 d^3q; angular factor 8 pi / 15.
  const double beta2 = p.beta() * p.beta();
  return field_scale(p) * beta2 * (8.0 * pi / 15.0);
}

double a_squared_rate_term(const GaussianPacket& p, double d2b_dt2) {
  const double c = p.constants().c;
  return (4.0 / 3.0) * p.beta() * p.beta() / (c * c) * electrostatic_energy(p) * p.width() * d2b_dt2;
}

double free_spreading_width_acceleration(const GaussianPacket& p) {
  const double s = p.constants().hbar / (4.0 * p.mass());
  const double b = p.width();
  return s * s / (b * b * b);
}

EnergyBudget assemble_budget(const GaussianPacket& p, BudgetMode mode, const BudgetOptions& opt) {
  EnergyBudget e;
  e.mode = mode;
  const double P = norm(total_momentum_closed_form(p));
  e.convective = P * P / (2.0 * p.mass());
  e.internal_kinetic = internal_kinetic_energy(p);
  e.electrostatic_E_el = electrostatic_energy(p);
  e.current_potential = current_potential_energy(p);
  e.transverse_field = transverse_field_energy(p);
  e.a_squared_rate = a_squared_rate_term(p, opt.d2b_dt2);
  e.a_squared_included = opt.include_a_squared_rate;
  e.total = e.sum_of_parts();
  return e;
}

nlohmann::ordered_json to_json(const EnergyBudget& b, const PhysicalConstants& k) {
  nlohmann::ordered_json j;
  j["convective_eV"] = to_ev(b.convective, k);
  j["internal_kinetic_eV"] = to_ev(b.internal_kinetic, k);
  j["electrostatic_eV"] = to_ev(b.electrostatic_E_el, k);
  j["current_potential_eV"] = to_ev(b.current_potential, k);
  j["transverse_field_eV"] = to_ev(b.transverse_field, k);
  j["a_squared_rate_eV"] = to_ev(b.a_squared_rate, k);
  j["a_squared_included"] = b.a_squared_included;
  j["total_eV"] = to_ev(b.total, k);
  j["mode"] = std::string(to_string(b.mode));
  return j;
}

}  // namespace selffield
