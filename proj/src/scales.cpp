#include "selffield/scales.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "selffield/error.hpp"

namespace selffield {

void PhysicalConstants::validate() const {
  if (!(hbar > 0 && c > 0 && eps0 > 0 && e_charge > 0 && m_electron > 0)) {
    throw Error(ErrorKind::InvalidArgument, "physical constants must be strictly positive");
  }
}

const PhysicalConstants& codata2018() {
  static const PhysicalConstants k{};
  return k;
}

void ParticleSpec::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw Error(ErrorKind::InvalidArgument, "particle mass must be positive, got " + std::to_string(mass));
  }
  if (!std::isfinite(z) || std::round(z) != z) {
    throw Error(ErrorKind::InvalidArgument, "charge multiple must be an integer");
  }
}

ParticleSpec electron(const PhysicalConstants& k) { return {-1.0, k.m_electron, "electron"}; }

ParticleSpec proton() { return {1.0, reference::kProtonMass, "proton"}; }

ParticleSpec particle_preset(const std::string& name, const PhysicalConstants& k) {
  if (name == "electron") return electron(k);
  if (name == "proton") return proton();
  throw Error(ErrorKind::InvalidArgument, "unknown particle preset '" + name + "'");
}

void require_subluminal(double beta) {
  if (!std::isfinite(beta) || beta < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "beta must be finite and non-negative");
  }
  if (beta >= 1.0) {
    throw Error(ErrorKind::InvalidRelativisticVelocity, "beta = " + std::to_string(beta) + " is not below 1");
  }
}

ScaleSet derived_scales(const ParticleSpec& p, double beta, const PhysicalConstants& k) {
  p.validate();
  require_subluminal(beta);
  const double charge = std::abs(p.z) * k.e_charge;
  const double coulomb = 4.0 * std::numbers::pi * k.eps0;

  ScaleSet s;
  if (p.charged()) {
    s.bohr_like_length = coulomb * k.hbar * k.hbar / (p.mass * charge * charge);
    const double q2 = charge * charge;
    s.rydberg_like_energy = p.mass * q2 * q2 / (2.0 * (coulomb * k.hbar) * (coulomb * k.hbar));
  } else {
    s.bohr_like_length = std::numeric_limits<double>::infinity();
  }
  s.compton_length = k.hbar / (p.mass * k.c);
  if (beta > 0.0) s.de_broglie_length = 2.0 * std::numbers::pi * k.hbar / (p.mass * beta * k.c);
  return s;
}

}  // namespace selffield
