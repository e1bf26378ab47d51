#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "selffield/coherent_field.hpp"
#include "selffield/energy_budget.hpp"
#include "support.hpp"

using namespace selffield;
using selffield::test::kind_of;
using selffield::test::rel;

namespace {

const double a_b = reference::kBohrRadius;

double dist(const Vec3& a, const Vec3& b) { return norm(a - b); }

Vec3 real_part(const CVec3& v) { return {std::real(v.x), std::real(v.y), std::real(v.z)}; }

}  // namespace

TEST_CASE("transverse projector") {
  CHECK(dist(transverse_project({1, 0, 0}, {1, 0, 0}), {0, 0, 0}) == 0.0);
  CHECK(dist(transverse_project({1, 0, 0}, {0, 1, 0}), {0, 1, 0}) == 0.0);
  const double s = 1.0 / std::sqrt(2.0);
  // Explicit matrix (delta_ij - n_i n_j) applied to (1, 0, 0).
  const double n[3] = {s, s, 0.0};
  Vec3 by_matrix;
  for (int i = 0; i < 3; ++i) by_matrix[i] = (i == 0 ? 1.0 : 0.0) - n[i] * n[0];
  const Vec3 got = transverse_project({s, s, 0.0}, {1, 0, 0});
  CHECK(dist(got, by_matrix) < 1e-15);
  CHECK(dist(got, {0.5, -0.5, 0.0}) < 1e-15);
  CHECK(kind_of([] { transverse_project({0, 0, 0}, {1, 2, 3}); }) == ErrorKind::SingularWavevector);
}

TEST_CASE("projector is idempotent") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 q{g(rng), g(rng), g(rng)}, v{g(rng), g(rng), g(rng)};
    const Vec3 once = transverse_project(q, v);
    CHECK(dist(transverse_project(q, once), once) <= 1e-14 * std::max(1.0, norm(v)));
    CHECK(std::abs(dot(q, once)) <= 1e-14 * norm(q) * norm(v));
  }
}

TEST_CASE("classical current") {
  const auto& k = codata2018();
  const GaussianPacket rest(electron(), a_b, 0.0);
  for (const Vec3& q : {Vec3{0, 0, 0}, Vec3{1.0 / a_b, 0, 0}, Vec3{0.3 / a_b, -2.0 / a_b, 1.0 / a_b}}) {
    CHECK(norm(classical_current_fourier(rest, q).value) == 0.0);
  }
  const GaussianPacket moving(electron(), a_b, 0.1);
  const double at_zero = norm(classical_current_fourier(moving, {0, 0, 0}).value);
  CHECK(rel(at_zero, k.e_charge * 0.1 * k.c) < 1e-14);
  const double at_q = norm(classical_current_fourier(moving, {0, 1.0 / a_b, 0}).value);
  CHECK(rel(at_q, k.e_charge * 0.1 * k.c * std::exp(-1.0)) < 1e-14);
  // Electron current runs against its velocity.
  CHECK(std::real(classical_current_fourier(moving, {0, 0, 0}).value.x) < 0.0);
}

TEST_CASE("vector potential") {
  const auto& k = codata2018();
  const GaussianPacket p(electron(), a_b, 0.1);
  CHECK(norm(vector_potential_fourier(p, {2.0 / a_b, 0, 0}).value) == 0.0);
  CHECK(kind_of([&] { vector_potential_fourier(p, {0, 0, 0}); }) == ErrorKind::SingularWavevector);

  const Vec3 q{0, 1.0 / a_b, 0};
  const double got = norm(vector_potential_fourier(p, q).value);
  const double by_formula =
      k.e_charge / (k.m_electron * k.c * k.c * k.eps0) * a_b * a_b * std::exp(-1.0) * (k.m_electron * 0.1 * k.c);
  CHECK(rel(got, by_formula) < 1e-14);

  // P_perp j / (eps0 c^2 q^2) from the two lower-level pieces.
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Vec3 qq = Vec3{g(rng), g(rng), g(rng)} / a_b;
    const Vec3 j = real_part(classical_current_fourier(p, qq).value);
    const Vec3 want = transverse_project(qq, j) / (k.eps0 * k.c * k.c * dot(qq, qq));
    const Vec3 a = real_part(vector_potential_fourier(p, qq).value);
    CHECK(dist(a, want) <= 1e-13 * norm(want));
  }
}

TEST_CASE("vector potential ratio under doubling q") {
  const GaussianPacket p(electron(), a_b, 0.1);
  for (double u : {0.2, 0.7, 1.0, 1.9}) {
    const Vec3 q{0.6 * u / a_b, 0.8 * u / a_b, 0.0};
    const double ratio = norm(vector_potential_fourier(p, q * 2.0).value) / norm(vector_potential_fourier(p, q).value);
    CHECK(rel(ratio, std::exp(-3.0 * u * u) / 4.0) < 1e-12);
  }
}

TEST_CASE("transverse electric field") {
  const GaussianPacket p(electron(), a_b, 0.1);
  CHECK(norm(transverse_efield_fourier(p, {0, 1.0 / a_b, 0}).value) == 0.0);
  const GaussianPacket rest(electron(), a_b, 0.0);
  CHECK(norm(transverse_efield_fourier(rest, {1.0 / a_b, 1.0 / a_b, 0}).value) == 0.0);
  const double s = 1.0 / std::sqrt(2.0);
  const Vec3 q{s / a_b, s / a_b, 0.0};
  const auto e = transverse_efield_fourier(p, q).value;
  const auto a = vector_potential_fourier(p, q).value;
  CHECK(rel(norm(e), norm(q) * norm(p.velocity()) * s * norm(a)) < 1e-14);
  // i (q.v) A componentwise.
  const std::complex<double> factor(0.0, dot(q, p.velocity()));
  for (int c = 0; c < 3; ++c) CHECK(std::abs(e[c] - factor * a[c]) <= 1e-15 * norm(e));
  CHECK(kind_of([&] { transverse_efield_fourier(p, {0, 0, 0}); }) == ErrorKind::SingularWavevector);
}

TEST_CASE("field outputs are transverse over random samples") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double b = std::pow(10.0, -13.0 + 7.0 * u(rng));
    const double beta = 0.3 * u(rng) + 1e-3;
    const ParticleSpec part = (i % 2 == 0) ? electron() : proton();
    const GaussianPacket p(part, b, beta, {g(rng), g(rng), g(rng)});
    const Vec3 q = Vec3{g(rng), g(rng), g(rng)} * (u(rng) * 4.0 / b);
    for (const auto& v : {vector_potential_fourier(p, q).value, transverse_efield_fourier(p, q).value}) {
      const double scale = norm(v) * norm(q);
      if (scale == 0.0) continue;
      worst = std::max(worst, std::abs(dot(q, v)) / scale);
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("mean vector potential") {
  const auto& k = codata2018();
  const GaussianPacket rest(electron(), a_b, 0.0);
  CHECK(norm(mean_vector_potential(rest).momentum_shift) == 0.0);

  const GaussianPacket p(electron(), a_b, 0.1);
  const double e_el = electrostatic_energy(p);
  CHECK(rel(to_ev(e_el), 5.428) < 1e-3);
  const auto m = mean_vector_potential(p);
  const double coeff = dot(m.momentum_shift, p.direction()) / norm(p.momentum());
  CHECK(rel(coeff, -1.416e-5) < 1e-3);
  CHECK(rel(coeff, -(4.0 / 3.0) * to_ev(e_el) / (to_ev(k.m_electron * k.c * k.c))) < 1e-12);
  // Full 3D angular and radial quadrature.
  const auto c = oracle::extract_coefficients(p);
  CHECK(rel(c.mean_potential, -4.0 / 3.0) < 1e-8);
  CHECK(rel(coeff, c.mean_potential * e_el / p.rest_energy()) < 1e-8);
}

TEST_CASE("mean potential: closed form and quadrature agree") {
  for (double s : {0.1, 1.0, 10.0}) {
    const GaussianPacket p(electron(), s * a_b, 0.1);
    const auto m = mean_vector_potential(p);
    CHECK(dist(m.momentum_shift, m.momentum_shift_closed_form) <= 1e-8 * norm(m.momentum_shift_closed_form));
  }
}

TEST_CASE("mean potential coefficient over a width grid") {
  // Least-squares slope of the shift against (E_el/Mc^2) p_c through the origin.
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 9; ++i) {
    const GaussianPacket p(electron(), test::log_point(0.1 * a_b, 10.0 * a_b, i, 9), 0.1);
    const double x = electrostatic_energy(p) / p.rest_energy() * norm(p.momentum());
    const double y = dot(mean_vector_potential(p).momentum_shift, p.direction());
    sxy += x * y;
    sxx += x * x;
  }
  CHECK(rel(sxy / sxx, -4.0 / 3.0) < 1e-8);
}

TEST_CASE("renormalized momentum") {
  CHECK(norm(renormalized_momentum(GaussianPacket(electron(), a_b, 0.0))) == 0.0);
  const GaussianPacket p(electron(), a_b, 0.1);
  const double factor = norm(renormalized_momentum(p)) / (p.mass() * norm(p.velocity()));
  CHECK(rel(factor - 1.0, 1.416e-5) < 1e-3);
  const double mean_coeff = -dot(mean_vector_potential(p).momentum_shift, p.direction()) / norm(p.momentum());
  CHECK(rel(factor - 1.0, mean_coeff) < 1e-8);
  for (double beta : {0.01, 0.1, 0.2}) {
    const GaussianPacket q(electron(), a_b, beta);
    const double f = norm(renormalized_momentum(q)) / (q.mass() * norm(q.velocity()));
    CHECK(rel(f - 1.0, factor - 1.0) < 1e-8);
  }
}

TEST_CASE("total momentum") {
  CHECK(norm(total_momentum(GaussianPacket(electron(), a_b, 0.0))) == 0.0);
  const GaussianPacket p(electron(), a_b, 0.1);
  const double field = norm(field_momentum(p)) / norm(p.momentum());
  // (4/15)(1e-2)(5.428 / 5.110e5) = 2.83e-8.
  CHECK(rel(field, 2.83e-8) < 2e-3);
  const double coeff = field / (0.01 * electrostatic_energy(p) / p.rest_energy());
  CHECK(rel(coeff, 4.0 / 15.0) < 1e-8);
  CHECK(rel(oracle::extract_coefficients(p).field_momentum, 4.0 / 15.0) < 1e-8);
  const Vec3 total = total_momentum(p), closed = total_momentum_closed_form(p);
  CHECK(dist(total, closed) <= 1e-15 * norm(closed));
}

TEST_CASE("field momentum is parallel to the packet momentum") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const GaussianPacket p(electron(), a_b, 0.05, {g(rng), g(rng), g(rng)});
    const Vec3 f = field_momentum(p);
    const Vec3 cross{f.y * p.direction().z - f.z * p.direction().y, f.z * p.direction().x - f.x * p.direction().z,
                     f.x * p.direction().y - f.y * p.direction().x};
    CHECK(norm(cross) <= 1e-14 * norm(f));
    CHECK(dot(f, p.direction()) > 0.0);
  }
}

TEST_CASE("retardation check") {
  const auto& k = codata2018();
  const GaussianPacket p(electron(), a_b, 0.1);
  const auto r = retardation_check(p);
  CHECK(rel(r.retardation_time, a_b / k.c) < 1e-15);
  CHECK(rel(r.ratio, 0.1) < 1e-14);
  CHECK(std::isinf(retardation_check(GaussianPacket(electron(), a_b, 0.0)).convective_time));
}
