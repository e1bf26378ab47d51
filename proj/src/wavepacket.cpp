#include "selffield/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "selffield/error.hpp"
#include "selffield/quadrature.hpp"

namespace selffield {

using std::numbers::pi;

GaussianPacket::GaussianPacket(ParticleSpec particle, double width, double beta, Vec3 direction,
                               const PhysicalConstants& constants)
    : particle_(std::move(particle)), b_(width), beta_(beta), direction_(direction), constants_(constants) {
  particle_.validate();
  constants_.validate();
  require_subluminal(beta_);
  if (!(b_ > 0.0) || !std::isfinite(b_)) {
    throw Error(ErrorKind::InvalidArgument, "packet width must be positive");
  }
  const double len = norm(direction_);
  if (!(len > 0.0)) throw Error(ErrorKind::InvalidArgument, "direction must be nonzero");
  direction_ = direction_ / len;
}

GaussianPacket GaussianPacket::with_width(double width) const {
  return GaussianPacket(particle_, width, beta_, direction_, constants_);
}

RadialProfile::RadialProfile(std::function<double(double)> rho, double support_radius,
                             std::vector<double> breakpoints)
    : rho_(std::move(rho)), support_(support_radius), breaks_(std::move(breakpoints)) {
  if (!(support_ > 0.0)) throw Error(ErrorKind::InvalidArgument, "support radius must be positive");
  breaks_.push_back(0.0);
  breaks_.push_back(support_);
  std::erase_if(breaks_, [&](double r) { return r < 0.0 || r > support_; });
  std::sort(breaks_.begin(), breaks_.end());
  breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());
  norm_ = 4.0 * pi * integrate_radial([this](double r) { return r * r * rho_(r); });
}

double RadialProfile::integrate_radial(const std::function<double(double)>& g, double rel_tol) const {
  double sum = 0.0;
  quad::Options opt;
  opt.rel_tol = rel_tol;
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    sum += quad::integral(g, breaks_[i], breaks_[i + 1], opt);
  }
  return sum;
}

RadialProfile RadialProfile::normalized() const {
  const double s = 1.0 / norm_;
  auto rho = rho_;
  auto inner = breaks_;
  return RadialProfile([rho, s](double r) { return s * rho(r); }, support_, inner);
}

RadialProfile RadialProfile::gaussian(double width) {
  if (!(width > 0.0)) throw Error(ErrorKind::InvalidArgument, "Gaussian width must be positive");
  const double amp = std::pow(4.0 * pi * width * width, -1.5);
  const double inv = 1.0 / (4.0 * width * width);
  // exp(-r^2/4b^2) underflows below 1e-300 past r = 52.6 b.
  return RadialProfile([amp, inv](double r) { return amp * std::exp(-r * r * inv); }, 56.0 * width,
                       {4.0 * width, 12.0 * width});
}

RadialProfile RadialProfile::uniform_ball(double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "ball radius must be positive");
  const double rho0 = 3.0 / (4.0 * pi * radius * radius * radius);
  return RadialProfile([rho0](double) { return rho0; }, radius);
}

RadialProfile RadialProfile::sampled(std::vector<double> r, std::vector<double> rho) {
  if (r.size() != rho.size() || r.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "sampled profile needs at least two (r, rho) pairs");
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (rho[i] < 0.0 || !std::isfinite(rho[i])) throw Error(ErrorKind::InvalidArgument, "density must be >= 0");
    if (i > 0 && !(r[i] > r[i - 1])) throw Error(ErrorKind::InvalidArgument, "radii must be strictly increasing");
  }
  if (r.front() < 0.0) throw Error(ErrorKind::InvalidArgument, "radii must be non-negative");
  const double support = r.back();
  auto breaks = r;
  auto interp = [r = std::move(r), rho = std::move(rho)](double x) {
    if (x <= r.front()) return rho.front();
    if (x >= r.back()) return rho.back();
    const auto it = std::upper_bound(r.begin(), r.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - r.begin()) - 1;
    const double t = (x - r[i]) / (r[i + 1] - r[i]);
    return rho[i] + t * (rho[i + 1] - rho[i]);
  };
  return RadialProfile(std::move(interp), support, std::move(breaks));
}

RadialProfile RadialProfile::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open profile '" + path.string() + "'");
  std::vector<double> r, rho;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (lineno == 1) continue;
      throw Error(ErrorKind::InvalidArgument, "comment allowed on the first line only (line " +
                                                  std::to_string(lineno) + ")");
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a = 0.0, b = 0.0;
    std::string extra;
    if (!(ls >> a >> b) || (ls >> extra)) {
      throw Error(ErrorKind::InvalidArgument, "expected two numeric columns at line " + std::to_string(lineno));
    }
    r.push_back(a);
    rho.push_back(b);
  }
  return sampled(std::move(r), std::move(rho));
}

double density_fourier(const GaussianPacket& p, double q) {
  if (!(q >= 0.0)) throw Error(ErrorKind::InvalidArgument, "wavenumber must be non-negative");
  const double u = p.width() * q;
  return std::exp(-u * u);
}

double fourier_density_numeric(const RadialProfile& prof, double q) {
  if (!(q >= 0.0)) throw Error(ErrorKind::InvalidArgument, "wavenumber must be non-negative");
  const double deficit = prof.norm() - 1.0;
  if (std::abs(deficit) > kNormalizationTolerance) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "profile norm deviates from 1 by " << deficit;
    throw Error(ErrorKind::NormalizationError, msg.str());
  }
  if (q == 0.0) return 1.0;
  auto integrand = [&](double r) {
    const double x = q * r;
    const double sinc = x < 1e-6 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    return r * r * prof.density(r) * sinc;
  };
  return 4.0 * pi * prof.integrate_radial(integrand);
}

double internal_kinetic_energy(const GaussianPacket& p) {
  const double hbar = p.constants().hbar;
  return 3.0 * hbar * hbar / (16.0 * p.mass() * p.width() * p.width());
}

}  // namespace selffield
