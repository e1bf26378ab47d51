#pragma once

#include <optional>
#include <string>

namespace selffield {

/// SI constants shared by every model quantity. CODATA-2018, ten significant digits.
struct PhysicalConstants {
  double hbar = 1.054571818e-34;       // J s
  double c = 2.997924580e8;            // m/s
  double eps0 = 8.854187813e-12;       // F/m
  double e_charge = 1.602176634e-19;   // C
  double m_electron = 9.109383702e-31; // kg

  /// Throws InvalidArgument unless every value is strictly positive.
  void validate() const;

  double electron_volt() const { return e_charge; }
};

/// Label of the constants set recorded in output metadata.
inline constexpr const char* kConstantsVersion = "CODATA-2018/10sig";

const PhysicalConstants& codata2018();

/// Published CODATA-2018 derived values, kept separate from the constants so
/// the closed forms can be checked against an independent reference.
namespace reference {
inline constexpr double kBohrRadius = 5.29177210903e-11;  // m
inline constexpr double kRydbergEnergyEv = 13.605693122994;
inline constexpr double kProtonMass = 1.67262192369e-27;  // kg
inline constexpr double kProtonElectronMassRatio = 1836.15267343;
}  // namespace reference

/// A point particle of charge z*e and mass `mass`. z = 0 is reserved for the
/// neutral composite handled by the atom module.
struct ParticleSpec {
  double z = -1.0;
  double mass = 0.0;  // kg
  std::string label;

  void validate() const;
  bool charged() const { return z != 0.0; }
};

ParticleSpec electron(const PhysicalConstants& k = codata2018());
ParticleSpec proton();

/// Looks up "electron" / "proton"; throws InvalidArgument otherwise.
ParticleSpec particle_preset(const std::string& name, const PhysicalConstants& k = codata2018());

struct ScaleSet {
  double bohr_like_length = 0.0;     // m
  double rydberg_like_energy = 0.0;  // J
  double compton_length = 0.0;       // m, reduced: hbar/(M c)
  std::optional<double> de_broglie_length;  // m, absent at beta = 0
};

/// Bohr-like radius 4 pi eps0 hbar^2 / (M (Z e)^2), Rydberg-like energy
/// M (Z e)^4 / (2 (4 pi eps0 hbar)^2), reduced Compton length hbar/(M c) and
/// de Broglie length 2 pi hbar / (M beta c).
ScaleSet derived_scales(const ParticleSpec& p, double beta, const PhysicalConstants& k = codata2018());

/// Rejects beta outside [0, 1).
void require_subluminal(double beta);

inline double to_ev(double joules, const PhysicalConstants& k = codata2018()) { return joules / k.e_charge; }
inline double from_ev(double ev, const PhysicalConstants& k = codata2018()) { return ev * k.e_charge; }

}  // namespace selffield
