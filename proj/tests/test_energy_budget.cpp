#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "selffield/energy_budget.hpp"
#include "selffield/localization.hpp"
#include "support.hpp"

using namespace selffield;
using selffield::test::kind_of;
using selffield::test::rel;
using std::numbers::pi;

namespace {
const double a_b = reference::kBohrRadius;
}

TEST_CASE("electrostatic energy of the Gaussian") {
  const auto& k = codata2018();
  const GaussianPacket p(electron(), a_b, 0.1);
  const double e_el = electrostatic_energy(p);
  CHECK(rel(to_ev(e_el), 5.428) < 1e-3);
  const double closed = k.e_charge * k.e_charge / (8.0 * std::sqrt(2.0) * std::pow(pi, 1.5) * k.eps0 * a_b);
  CHECK(rel(e_el, closed) < 1e-14);
  CHECK(rel(oracle::electrostatic_energy_spectral(p), e_el) < 1e-10);
  CHECK(rel(electrostatic_energy(p.with_width(2.0 * a_b)), e_el / 2.0) < 1e-14);
  const GaussianPacket z2(ParticleSpec{2.0, 4.0 * proton().mass, "z2"}, a_b, 0.1);
  CHECK(rel(electrostatic_energy(z2), 4.0 * e_el) < 1e-14);
}

TEST_CASE("electrostatic energy of general profiles") {
  const auto& k = codata2018();
  const double closed = electrostatic_energy(GaussianPacket(electron(), a_b, 0.0));
  CHECK(rel(electrostatic_energy(RadialProfile::gaussian(a_b), -1.0), closed) < 1e-10);

  // Uniform ball: 3 Q^2 / (20 pi eps0 R), and the real-space shell integral.
  const double radius = 3.0 * a_b;
  const auto ball = RadialProfile::uniform_ball(radius);
  const double want = 3.0 * k.e_charge * k.e_charge / (20.0 * pi * k.eps0 * radius);
  const double got = electrostatic_energy(ball, 1.0);
  CHECK(rel(got, want) < 1e-8);
  CHECK(rel(oracle::electrostatic_energy_real_space(ball, 1.0, k), want) < 1e-10);
  CHECK(rel(oracle::electrostatic_energy_real_space(RadialProfile::gaussian(a_b), 1.0, k), closed) < 1e-10);
}

TEST_CASE("a non-square-integrable transform is reported as divergent") {
  // rho ~ r^-2.5 is normalizable but rho^(q) ~ q^-1/2, so |rho^|^2 ~ 1/q.
  const RadialProfile cusp([](double r) { return std::pow(r, -2.5); }, 1.0);
  const auto normalized = cusp.normalized();
  CHECK(kind_of([&] { electrostatic_energy(normalized, 1.0); }) == ErrorKind::DivergenceError);
}

TEST_CASE("current-potential energy") {
  const GaussianPacket rest(electron(), a_b, 0.0);
  CHECK(current_potential_energy(rest) == 0.0);
  CHECK(current_potential_energy_quadrature(rest) == 0.0);
  const GaussianPacket p(electron(), a_b, 0.1);
  const double e = current_potential_energy(p);
  CHECK(rel(to_ev(e), -3.619e-2) < 1e-3);
  CHECK(rel(current_potential_energy_quadrature(p), e) < 1e-10);
  CHECK(rel(oracle::extract_coefficients(p).current_potential, -2.0 / 3.0) < 1e-8);
  for (int i = 0; i < 7; ++i) {
    const auto q = p.with_width(test::log_point(1e-12, 1e-6, i, 7));
    CHECK(rel(current_potential_energy(q) / electrostatic_energy(q), -(2.0 / 3.0) * 0.01) < 1e-14);
  }
}

TEST_CASE("transverse field energy") {
  const GaussianPacket rest(electron(), a_b, 0.0);
  CHECK(transverse_field_energy(rest) == 0.0);
  const GaussianPacket p(electron(), a_b, 0.1);
  const double e = transverse_field_energy(p);
  CHECK(rel(to_ev(e), 1.447e-4) < 1e-3);
  CHECK(rel(transverse_field_energy_quadrature(p), e) < 1e-10);
  CHECK(rel(oracle::extract_coefficients(p).transverse_field, 4.0 / 15.0) < 1e-8);
  for (double beta : {0.01, 0.05, 0.2}) {
    const GaussianPacket q(proton(), 1e-11, beta);
    CHECK(rel(transverse_field_energy(q) / std::abs(current_potential_energy(q)), 0.4 * beta * beta) < 1e-14);
  }
}

TEST_CASE("A^2 rate term is negligible") {
  const auto& k = codata2018();
  const GaussianPacket p(electron(), a_b, 0.1);
  CHECK(a_squared_rate_term(p, 0.0) == 0.0);
  CHECK(a_squared_rate_term(GaussianPacket(electron(), a_b, 0.0), 1e20) == 0.0);
  const double cp = std::abs(current_potential_energy(p));
  // Free spreading, and a width changing at 1e-3 c over one width.
  CHECK(std::abs(a_squared_rate_term(p, free_spreading_width_acceleration(p))) / cp < 1e-4);
  const double db_dt = 1e-3 * k.c;
  CHECK(std::abs(a_squared_rate_term(p, db_dt * db_dt / a_b)) / cp < 1e-4);
  // b d^2b/dt^2 of the free Gaussian: hbar^2 / (16 M^2 b^2).
  const double acc = free_spreading_width_acceleration(p);
  CHECK(rel(acc * a_b, k.hbar * k.hbar / (16.0 * k.m_electron * k.m_electron * a_b * a_b)) < 1e-14);
}

TEST_CASE("budget assembly") {
  const GaussianPacket rest(electron(), a_b, 0.0);
  const auto b0 = assemble_budget(rest, BudgetMode::Assembled);
  CHECK(b0.total - b0.convective == b0.internal_kinetic);

  const double b_star = 1.492e-8;
  const GaussianPacket p(electron(), b_star, 0.1);
  const auto paper = assemble_budget(p, BudgetMode::PaperQuoted);
  CHECK(rel(to_ev(paper.internal_kinetic), 6.42e-5) < 2e-3);
  CHECK(rel(paper.internal_kinetic, std::abs(paper.current_potential) / 2.0) < 1e-3);

  const auto assembled = assemble_budget(p, BudgetMode::Assembled);
  const double shift = (4.0 / 15.0) * 1e-4 * electrostatic_energy(p);
  CHECK(rel(assembled.localization_energy() - paper.localization_energy(), shift) < 1e-12);
  CHECK(assembled.total == assembled.sum_of_parts());
  CHECK(paper.total == paper.sum_of_parts());

  BudgetOptions opt;
  opt.include_a_squared_rate = true;
  opt.d2b_dt2 = free_spreading_width_acceleration(p);
  const auto with_rate = assemble_budget(p, BudgetMode::Assembled, opt);
  CHECK(with_rate.a_squared_included);
  CHECK(with_rate.total == with_rate.sum_of_parts());
  CHECK(with_rate.a_squared_rate != 0.0);
}

TEST_CASE("budget sign invariants") {
  for (int i = 0; i < 13; ++i) {
    for (double beta : {0.0, 0.01, 0.2}) {
      const GaussianPacket p(proton(), test::log_point(1e-12, 1e-6, i, 13), beta);
      const auto b = assemble_budget(p, BudgetMode::Assembled);
      CHECK(b.current_potential <= 0.0);
      CHECK(b.internal_kinetic > 0.0);
      CHECK(b.electrostatic_E_el > 0.0);
      CHECK(b.transverse_field >= 0.0);
    }
  }
}

TEST_CASE("closed forms agree with quadrature across widths and speeds") {
  for (int i = 0; i < 25; ++i) {
    const double b = test::log_point(1e-12, 1e-6, i, 25);
    for (double beta : {0.01, 0.05, 0.1, 0.2}) {
      const GaussianPacket p(electron(), b, beta);
      INFO("b = " << b << ", beta = " << beta);
      CHECK(rel(electrostatic_energy_quadrature(p), electrostatic_energy(p)) < 1e-10);
      CHECK(rel(current_potential_energy_quadrature(p), current_potential_energy(p)) < 1e-10);
      CHECK(rel(transverse_field_energy_quadrature(p), transverse_field_energy(p)) < 1e-10);
      CHECK(rel(oracle::kinetic_energy_spectral(p), internal_kinetic_energy(p)) < 1e-10);
    }
  }
}

TEST_CASE("virial identities at the minimizer") {
  for (const auto& part : {electron(), proton()}) {
    for (double beta : {0.02, 0.1, 0.25}) {
      const auto r = minimize_radius(part, beta, BudgetMode::PaperQuoted);
      const GaussianPacket p(part, r.b_star, beta);
      CHECK(rel(internal_kinetic_energy(p), r.binding_energy) < 1e-9);
      CHECK(rel(std::abs(current_potential_energy(p)), 2.0 * r.binding_energy) < 1e-9);
    }
  }
}

TEST_CASE("budget JSON is flat, in eV, with a mode") {
  const GaussianPacket p(electron(), a_b, 0.1);
  const auto b = assemble_budget(p, BudgetMode::PaperQuoted);
  const auto j = to_json(b);
  CHECK(j["mode"] == "paper_quoted");
  CHECK(rel(j["internal_kinetic_eV"].get<double>(), to_ev(b.internal_kinetic)) < 1e-15);
  CHECK(rel(j["electrostatic_eV"].get<double>(), 5.428) < 1e-3);
  for (const auto& [key, value] : j.items()) CHECK_FALSE(value.is_structured());
}

TEST_CASE("budget modes parse") {
  CHECK(parse_budget_mode("paper") == BudgetMode::PaperQuoted);
  CHECK(parse_budget_mode("paper_quoted") == BudgetMode::PaperQuoted);
  CHECK(parse_budget_mode("assembled") == BudgetMode::Assembled);
  CHECK(kind_of([] { parse_budget_mode("exact"); }) == ErrorKind::InvalidArgument);
}
