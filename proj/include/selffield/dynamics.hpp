#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "selffield/scales.hpp"
#include "selffield/vec3.hpp"
#include "selffield/wavepacket.hpp"

namespace selffield {

/// Allocator returning FFTW-aligned storage so buffers can be handed to any plan.
template <class T>
struct FftwAllocator {
  using value_type = T;
  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}
  T* allocate(std::size_t n);
  void deallocate(T* p, std::size_t) noexcept;
  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

using ComplexField = std::vector<std::complex<double>, FftwAllocator<std::complex<double>>>;
using RealField = std::vector<double, FftwAllocator<double>>;

/// Periodic cubic grid of n^3 points, x fastest, coordinates
/// x_i = (i - n/2) h with h = box / n.
struct GridSpec {
  int n = 64;
  double box = 0.0;  // m
  double dt = 0.0;   // s
  ParticleSpec particle;
  bool coupling = true;
  bool include_diagonal_nA = false;
  PhysicalConstants constants = codata2018();

  /// Throws InvalidArgument / TimestepTooLarge.
  void validate() const;
  double spacing() const { return box / n; }
  std::size_t points() const { return static_cast<std::size_t>(n) * n * n; }
};

struct GridState {
  int n = 0;
  double box = 0.0;
  ComplexField psi;                 // m^-3/2
  std::array<RealField, 3> a_field; // V s/m, divergence-free
  double t = 0.0;
  long step = 0;
  /// int A^2 d^3r after the most recent steps, oldest first (at most three).
  std::vector<double> a2_history;
  /// Last recorded energy, for the flux residual.
  std::optional<double> last_energy_t;
  double last_energy = 0.0;
  double last_flux_residual = 0.0;
};

struct GridDiagnostics {
  long step = 0;
  double t = 0.0;
  double norm = 0.0;
  double energy = 0.0;             // J, sum of the four parts below
  double kinetic = 0.0;            // <-hbar^2 lap / 2M>
  double current_potential = 0.0;  // -(1/2) int j.A
  double transverse_field = 0.0;   // eps0 int E_perp^2
  double a_squared_term = 0.0;     // -(eps0/4) d^2/dt^2 int A^2, backward difference
  Vec3 matter_momentum;            // -i hbar <grad>
  Vec3 field_momentum;             // eps0 sum_j int E_j grad A_j
  Vec3 momentum;                   // total
  double flux_residual = 0.0;      // W, dE/dt between records; zero flux on a torus
  double transversality = 0.0;     // max |q.A^| / (|q||A^|)
};

/// Modes with |A^(q)| below this fraction of the largest mode are skipped by
/// the transversality residual: their direction is set by FFT roundoff
/// (~1e-16 of the peak), not by the projector.
inline constexpr double kTransversalityFloor = 1e-5;

struct PositionMoments {
  Vec3 mean;      // m, circular mean in (-L/2, L/2]
  Vec3 variance;  // m^2 per axis
};

/// Spectral Schroedinger-Maxwell integrator. Owns the FFT plans and scratch
/// buffers; one solver per driver thread.
class GridSolver {
 public:
  explicit GridSolver(GridSpec spec);
  ~GridSolver();
  GridSolver(GridSolver&&) noexcept;
  GridSolver& operator=(GridSolver&&) noexcept;

  const GridSpec& spec() const;

  /// Gaussian packet sampled at the grid points times exp(i p_c.r/hbar).
  /// The momentum is snapped to the reciprocal lattice; more than 0.1 %
  /// snapping, or a packet that does not fit/resolve, is a GridMismatch.
  GridState init(const GaussianPacket& packet);

  /// A^(q) = j_perp^(q) / (eps0 c^2 q^2), A^(0) = 0, from the current of psi.
  void solve_vector_potential(GridState& state);

  /// One Strang step: potential half step, exact kinetic step, potential half step.
  void step(GridState& state);

  GridDiagnostics diagnostics(const GridState& state);

  /// Steps n_steps times, recording diagnostics at step 0 and every
  /// `record_stride` steps (plus the final step). `on_record` sees the state
  /// right after each record.
  std::vector<GridDiagnostics> evolve(GridState& state, long n_steps, long record_stride,
                                      const std::function<void(const GridState&)>& on_record = {});

  /// max |q.A^| / (|q||A^|) over modes above `floor_rel` of the peak.
  double transversality_residual(const GridState& state, double floor_rel = kTransversalityFloor);
  PositionMoments position_moments(const GridState& state) const;
  double norm(const GridState& state) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

GridState init_grid(const GridSpec& spec, const GaussianPacket& packet);
void solve_vector_potential(GridState& state, const GridSpec& spec);
void step(GridState& state, const GridSpec& spec);
GridDiagnostics diagnostics(const GridState& state, const GridSpec& spec);
std::vector<GridDiagnostics> evolve(GridState& state, const GridSpec& spec, long n_steps, long record_stride);

/// Width b' close to `target_width` for which an axis-aligned packet's momentum
/// is a reciprocal-lattice vector of the box n b' / cells_per_width.
double fit_width_to_grid(const ParticleSpec& p, double beta, int n, double target_width,
                         double cells_per_width = 4.0, const PhysicalConstants& k = codata2018());

/// Snapshot: one JSON header line, then psi as (Re, Im) float64 pairs and the
/// three A components, little-endian, x fastest.
void write_snapshot(const std::filesystem::path& path, const GridSpec& spec, const GridState& state);
std::pair<GridSpec, GridState> read_snapshot(const std::filesystem::path& path);

/// CSV: step,t_s,norm,energy_J,px,py,pz,flux_residual_W
void write_trajectory_csv(std::ostream& out, const std::vector<GridDiagnostics>& records);

}  // namespace selffield
