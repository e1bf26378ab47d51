#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "oracles.hpp"
#include "selffield/wavepacket.hpp"
#include "support.hpp"

using namespace selffield;
using selffield::test::kind_of;
using selffield::test::rel;
using std::numbers::pi;

namespace {
const double a_b = reference::kBohrRadius;
}

TEST_CASE("packet invariants are enforced") {
  CHECK(kind_of([] { GaussianPacket(electron(), 0.0, 0.1); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { GaussianPacket(electron(), -1e-10, 0.1); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { GaussianPacket(electron(), a_b, 1.0); }) == ErrorKind::InvalidRelativisticVelocity);
  CHECK(kind_of([] { GaussianPacket(electron(), a_b, 0.1, {0.0, 0.0, 0.0}); }) == ErrorKind::InvalidArgument);
  const GaussianPacket p(electron(), a_b, 0.1, {3.0, 4.0, 0.0});
  CHECK(std::abs(norm(p.direction()) - 1.0) < 1e-12);
  CHECK(density_fourier(p, 0.0) == 1.0);
}

TEST_CASE("Gaussian density in Fourier space") {
  const GaussianPacket unit(electron(), 1.0, 0.0);
  CHECK(density_fourier(unit, 0.0) == 1.0);
  CHECK(std::abs(density_fourier(unit, 1.0) - 0.367879) < 1e-6);
  const GaussianPacket atomic(electron(), a_b, 0.0);
  const double closed = density_fourier(atomic, 1.0 / a_b);
  CHECK(std::abs(closed - 0.367879) < 1e-6);
  CHECK(std::abs(fourier_density_numeric(RadialProfile::gaussian(a_b), 1.0 / a_b) - closed) < 1e-10);
  CHECK(kind_of([&] { density_fourier(atomic, -1.0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("density_fourier decreases in q and in b") {
  double prev = 2.0;
  for (int i = 0; i <= 50; ++i) {
    const double q = 0.1 * i / a_b;
    const double v = density_fourier(GaussianPacket(electron(), a_b, 0.0), q);
    CHECK(v <= 1.0);
    CHECK(v > 0.0);
    if (i > 0) CHECK(v < prev);
    prev = v;
  }
  const double q = 1.0 / a_b;
  prev = 2.0;
  for (double b : {0.1 * a_b, 0.5 * a_b, a_b, 2.0 * a_b}) {
    const double v = density_fourier(GaussianPacket(electron(), b, 0.0), q);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("numeric transform of the Gaussian profile matches the closed form") {
  for (double b : {1e-12, a_b, 1e-6}) {
    const auto prof = RadialProfile::gaussian(b);
    CHECK(std::abs(prof.norm() - 1.0) < 1e-12);
    CHECK(fourier_density_numeric(prof, 0.0) == 1.0);
    for (int i = 0; i <= 100; ++i) {
      const double u = 0.1 * i;
      const double exact = std::exp(-u * u);
      const double got = fourier_density_numeric(prof, u / b);
      INFO("b = " << b << ", qb = " << u);
      // Relative where the value is representable against the O(1) integrand
      // (the oscillatory cancellation floor is ~1e-17); absolute beyond.
      if (exact > 1e-6) {
        CHECK(rel(got, exact) < 1e-10);
      } else {
        CHECK(std::abs(got - exact) < 1e-16);
      }
      CHECK(std::abs(got) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("uniform ball form factor") {
  const double radius = 2.0 * a_b;
  const auto ball = RadialProfile::uniform_ball(radius);
  CHECK(std::abs(ball.norm() - 1.0) < 1e-12);
  const double at_pi = fourier_density_numeric(ball, pi / radius);
  CHECK(std::abs(at_pi - 3.0 / (pi * pi)) < 1e-10);
  CHECK(std::abs(at_pi - 0.30396) < 1e-5);
  for (double x : {0.0, 0.3, 1.0, 4.0, 9.5, 20.0}) {
    CHECK(std::abs(fourier_density_numeric(ball, x / radius) - oracle::uniform_ball_form_factor(x)) < 1e-10);
  }
}

TEST_CASE("non-normalized profile reports its deficit") {
  const RadialProfile half([](double) { return 0.5 * 3.0 / (4.0 * pi); }, 1.0);
  try {
    fourier_density_numeric(half, 1.0);
    FAIL("expected normalization-error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NormalizationError);
    CHECK(std::string(e.what()).find("-0.5") != std::string::npos);
  }
  CHECK(std::abs(fourier_density_numeric(half.normalized(), 0.0) - 1.0) < 1e-12);
}

TEST_CASE("sampled profile from CSV") {
  test::TempDir dir("csv");
  const auto path = dir / "ball.csv";
  {
    std::ofstream f(path);
    f.precision(17);
    f << "# r_m, rho_per_m3\n";
    const double rho0 = 3.0 / (4.0 * pi);
    for (int i = 0; i <= 10; ++i) f << 0.1 * i << "," << rho0 << "\n";
  }
  const auto prof = RadialProfile::from_csv(path);
  CHECK(std::abs(prof.norm() - 1.0) < 1e-10);
  CHECK(std::abs(fourier_density_numeric(prof, pi) - 3.0 / (pi * pi)) < 1e-9);

  const auto bad = dir / "bad.csv";
  {
    std::ofstream f(bad);
    f << "0,1\n0.2,1\n0.1,1\n";
  }
  CHECK(kind_of([&] { RadialProfile::from_csv(bad); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { RadialProfile::from_csv(dir / "missing.csv"); }) == ErrorKind::IoError);
}

TEST_CASE("internal kinetic energy") {
  const double e_r = from_ev(reference::kRydbergEnergyEv);
  const GaussianPacket el(electron(), a_b, 0.0);
  const double t = internal_kinetic_energy(el);
  CHECK(rel(to_ev(t), 5.1021) < 1e-4);
  CHECK(rel(t, 3.0 / 16.0 * 2.0 * e_r) < 1e-8);
  CHECK(rel(t, oracle::kinetic_energy_spectral(el)) < 1e-10);
  CHECK(rel(internal_kinetic_energy(el.with_width(2.0 * a_b)), t / 4.0) < 1e-14);
  const GaussianPacket pr(proton(), a_b, 0.0);
  CHECK(rel(internal_kinetic_energy(pr), t / reference::kProtonElectronMassRatio) < 1e-9);
}

TEST_CASE("kinetic energy times b^2 is constant") {
  const GaussianPacket base(electron(), a_b, 0.1);
  const double ref = internal_kinetic_energy(base) * a_b * a_b;
  for (int i = 0; i < 25; ++i) {
    const double b = test::log_point(1e-12, 1e-6, i, 25);
    CHECK(rel(internal_kinetic_energy(base.with_width(b)) * b * b, ref) < 1e-14);
  }
}
