#include "selffield/dynamics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <new>
#include <nlohmann/json.hpp>
#include <numbers>
#include <ostream>
#include <sstream>
#include <utility>

#include "selffield/error.hpp"

namespace selffield {

using std::numbers::pi;
using cplx = std::complex<double>;

template <class T>
T* FftwAllocator<T>::allocate(std::size_t n) {
  void* p = fftw_malloc(n * sizeof(T));
  if (p == nullptr && n != 0) throw std::bad_alloc();
  return static_cast<T*>(p);
}

template <class T>
void FftwAllocator<T>::deallocate(T* p, std::size_t) noexcept {
  fftw_free(p);
}

template struct FftwAllocator<double>;
template struct FftwAllocator<cplx>;

namespace {

// Planning is not thread-safe in FFTW; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::string strip_kind(const Error& e) {
  const std::string what = e.what();
  const std::string prefix = std::string(to_string(e.kind())) + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

}  // namespace

void GridSpec::validate() const {
  if (n < 32 || n > 512 || !is_power_of_two(n)) {
    throw Error(ErrorKind::InvalidArgument, "grid n must be a power of two in [32, 512], got " + std::to_string(n));
  }
  if (!(box > 0.0) || !std::isfinite(box)) throw Error(ErrorKind::InvalidArgument, "box must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  particle.validate();
  constants.validate();
  const double kmax = pi * n / box;
  const double phase = dt * constants.hbar * kmax * kmax / (2.0 * particle.mass);
  if (phase > 0.8 * pi) {
    std::ostringstream os;
    os << "dt*hbar*(pi n/box)^2/(2M) = " << phase << " exceeds 0.8*pi; dt must be <= "
       << dt * 0.8 * pi / phase << " s";
    throw Error(ErrorKind::TimestepTooLarge, os.str());
  }
}

struct GridSolver::Impl {
  GridSpec spec;
  int n = 0;
  std::size_t count = 0;
  double h = 0.0;
  double dv = 0.0;
  double charge = 0.0;
  std::vector<double> k;   // full wavenumbers, Nyquist at -pi n / box
  std::vector<double> kd;  // first-derivative wavenumbers, Nyquist zeroed
  std::vector<cplx> kin_full, kin_half;  // 1D factors of exp(-i hbar k^2 t / 2M)
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  std::array<ComplexField, 3> g;  // gradient of psi
  std::array<ComplexField, 3> c;  // currents and their transforms
  ComplexField tmp, tmp2, acc, term, next, pred;
  std::array<RealField, 3> a_mid;

  explicit Impl(GridSpec s) : spec(std::move(s)) {
    spec.validate();
    if (!spec.particle.charged() && spec.coupling) {
      throw Error(ErrorKind::NotApplicable, "coupling requires a charged particle");
    }
    n = spec.n;
    count = spec.points();
    h = spec.spacing();
    dv = h * h * h;
    charge = spec.particle.z * spec.constants.e_charge;
    k.resize(n);
    kd.resize(n);
    for (int i = 0; i < n; ++i) {
      const int m = i < n / 2 ? i : i - n;
      k[i] = 2.0 * pi * m / spec.box;
      kd[i] = (i == n / 2) ? 0.0 : k[i];
    }
    const double w = spec.constants.hbar / (2.0 * spec.particle.mass);
    kin_full.resize(n);
    kin_half.resize(n);
    for (int i = 0; i < n; ++i) {
      kin_full[i] = std::polar(1.0, -w * k[i] * k[i] * spec.dt);
      kin_half[i] = std::polar(1.0, -w * k[i] * k[i] * 0.5 * spec.dt);
    }
    for (auto* b : {&g[0], &g[1], &g[2], &c[0], &c[1], &c[2], &tmp, &tmp2, &acc, &term, &next}) {
      b->assign(count, cplx{});
    }
    if (spec.coupling) {
      pred.assign(count, cplx{});
      for (auto& f : a_mid) f.assign(count, 0.0);
    }
    std::lock_guard lock(planner_mutex());
    auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
    fwd = fftw_plan_dft_3d(n, n, n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_3d(n, n, n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (fwd == nullptr || bwd == nullptr) throw Error(ErrorKind::InvalidArgument, "FFT planning failed");
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }

  void fft(ComplexField& b) const {
    auto* p = reinterpret_cast<fftw_complex*>(b.data());
    fftw_execute_dft(fwd, p, p);
  }

  // Unnormalized inverse; callers fold in 1/count.
  void ifft_raw(ComplexField& b) const {
    auto* p = reinterpret_cast<fftw_complex*>(b.data());
    fftw_execute_dft(bwd, p, p);
  }

  void ifft(ComplexField& b) const {
    ifft_raw(b);
    const double s = 1.0 / static_cast<double>(count);
    for (auto& v : b) v *= s;
  }

  // Visits every grid index with its (ix, iy, iz).
  template <class F>
  void for_each_mode(F&& f) const {
    std::size_t idx = 0;
    for (int iz = 0; iz < n; ++iz) {
      for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix, ++idx) f(idx, ix, iy, iz);
      }
    }
  }

  // dst (+)= i kd_axis src in Fourier space.
  template <bool Accumulate>
  void derivative(const ComplexField& src, int axis, ComplexField& dst) const {
    std::size_t idx = 0;
    for (int iz = 0; iz < n; ++iz) {
      for (int iy = 0; iy < n; ++iy) {
        const double* kx = kd.data();
        const double kfix = axis == 1 ? kd[iy] : kd[iz];
        for (int ix = 0; ix < n; ++ix, ++idx) {
          const double q = axis == 0 ? kx[ix] : kfix;
          const cplx v(-q * src[idx].imag(), q * src[idx].real());
          if constexpr (Accumulate) {
            dst[idx] += v;
          } else {
            dst[idx] = v;
          }
        }
      }
    }
  }

  void kinetic(ComplexField& psi, const std::vector<cplx>& f) const {
    fft(psi);
    for_each_mode([&](std::size_t idx, int ix, int iy, int iz) { psi[idx] *= f[ix] * f[iy] * f[iz]; });
    ifft(psi);
  }

  // out[a] = d_a src for the requested axes; uses tmp.
  void gradient(const ComplexField& src, std::array<ComplexField, 3>& out) {
    std::copy(src.begin(), src.end(), tmp.begin());
    fft(tmp);
    for (int a = 0; a < 3; ++a) {
      derivative<false>(tmp, a, out[a]);
      ifft(out[a]);
    }
  }

  // c[a] <- paramagnetic current (q hbar / M) Im(psi* d_a psi), requires g = grad psi.
  void paramagnetic_current(const ComplexField& psi) {
    const double s = charge * spec.constants.hbar / spec.particle.mass;
    for (int a = 0; a < 3; ++a) {
      for (std::size_t i = 0; i < count; ++i) c[a][i] = s * std::imag(std::conj(psi[i]) * g[a][i]);
    }
  }

  // Replaces the real current held in c[0..2] by its transverse Poisson solve
  // P j^ / (eps0 c^2 q^2), written back to out. q = 0 and Nyquist planes are zeroed.
  void transverse_solve(std::array<RealField, 3>& out) {
    for (int a = 0; a < 3; ++a) fft(c[a]);
    const double inv = 1.0 / (spec.constants.eps0 * spec.constants.c * spec.constants.c);
    const int nyq = n / 2;
    for_each_mode([&](std::size_t idx, int ix, int iy, int iz) {
      if (ix == nyq || iy == nyq || iz == nyq || (ix == 0 && iy == 0 && iz == 0)) {
        c[0][idx] = c[1][idx] = c[2][idx] = 0.0;
        return;
      }
      const double qx = k[ix], qy = k[iy], qz = k[iz];
      const double q2 = qx * qx + qy * qy + qz * qz;
      const cplx qj = qx * c[0][idx] + qy * c[1][idx] + qz * c[2][idx];
      const cplx l = qj / q2;
      const double f = inv / q2;
      c[0][idx] = f * (c[0][idx] - qx * l);
      c[1][idx] = f * (c[1][idx] - qy * l);
      c[2][idx] = f * (c[2][idx] - qz * l);
    });
    for (int a = 0; a < 3; ++a) {
      ifft(c[a]);
      for (std::size_t i = 0; i < count; ++i) out[a][i] = c[a][i].real();
    }
  }

  // Solves A = S[src - (q^2/M) n A] where S is the transverse Poisson solve.
  // Without the diagonal term this is one solve.
  void solve_field(const std::array<RealField, 3>& src, const ComplexField& psi, std::array<RealField, 3>& out) {
    auto load = [&](const std::array<RealField, 3>* prev) {
      const double s = charge * charge / spec.particle.mass;
      for (int a = 0; a < 3; ++a) {
        for (std::size_t i = 0; i < count; ++i) {
          double v = src[a][i];
          if (prev) v -= s * std::norm(psi[i]) * (*prev)[a][i];
          c[a][i] = v;
        }
      }
    };
    load(nullptr);
    transverse_solve(out);
    if (!spec.include_diagonal_nA) return;
    std::array<RealField, 3> prev;
    for (int it = 0; it < 20; ++it) {
      prev = out;
      load(&prev);
      transverse_solve(out);
      double diff = 0.0, scale = 0.0;
      for (int a = 0; a < 3; ++a) {
        for (std::size_t i = 0; i < count; ++i) {
          diff = std::max(diff, std::abs(out[a][i] - prev[a][i]));
          scale = std::max(scale, std::abs(out[a][i]));
        }
      }
      if (diff <= 1e-15 * scale) return;
    }
    throw Error(ErrorKind::DivergenceError, "diagonal n A iteration did not converge in 20 sweeps");
  }

  void solve_a(const ComplexField& psi, std::array<RealField, 3>& a_out) {
    gradient(psi, g);
    paramagnetic_current(psi);
    if (!spec.include_diagonal_nA) {
      transverse_solve(a_out);
      return;
    }
    std::array<RealField, 3> jp;
    for (int a = 0; a < 3; ++a) {
      jp[a].resize(count);
      for (std::size_t i = 0; i < count; ++i) jp[a][i] = c[a][i].real();
    }
    solve_field(jp, psi, a_out);
  }

  // out = (1/2)(A.grad + grad.A) in; uses tmp, tmp2, acc. Anti-Hermitian on the grid.
  void apply_b(const std::array<RealField, 3>& a, const ComplexField& in, ComplexField& out) {
    std::copy(in.begin(), in.end(), tmp.begin());
    fft(tmp);
    cplx* o = out.data();
    cplx* t2 = tmp2.data();
    const cplx* src = in.data();
    for (int ax = 0; ax < 3; ++ax) {
      const double* av = a[ax].data();
      derivative<false>(tmp, ax, tmp2);
      ifft_raw(tmp2);
      // Gather A_ax d_ax psi, then reuse the buffer for A_ax psi.
      if (ax == 0) {
        for (std::size_t i = 0; i < count; ++i) {
          o[i] = av[i] * t2[i];
          t2[i] = av[i] * src[i];
        }
      } else {
        for (std::size_t i = 0; i < count; ++i) {
          o[i] += av[i] * t2[i];
          t2[i] = av[i] * src[i];
        }
      }
      fft(tmp2);
      if (ax == 0) {
        derivative<false>(tmp2, ax, acc);
      } else {
        derivative<true>(tmp2, ax, acc);
      }
    }
    ifft_raw(acc);
    const double s = 0.5 / static_cast<double>(count);
    const cplx* ac = acc.data();
    for (std::size_t i = 0; i < count; ++i) o[i] = s * (o[i] + ac[i]);
  }

  static double l2(const ComplexField& v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
  }

  // psi <- exp(s B) psi by a Taylor series, stopped once the predicted next
  // term is below 1e-15 of psi. For anti-Hermitian B the order-m polynomial
  // deviates from unitarity only at order 2m in sB.
  void exp_b(const std::array<RealField, 3>& a, double s, ComplexField& psi) {
    std::copy(psi.begin(), psi.end(), term.begin());
    const double base = l2(psi);
    double last = base;
    for (int m = 1; m <= 60; ++m) {
      apply_b(a, term, next);
      const double f = s / m;
      for (std::size_t i = 0; i < count; ++i) {
        next[i] *= f;
        psi[i] += next[i];
      }
      std::swap(term, next);
      const double cur = l2(term);
      const double ratio = cur / last;
      if (cur == 0.0 || (ratio < 0.5 && cur * ratio <= 1e-15 * base)) return;
      last = cur;
    }
    throw Error(ErrorKind::TimestepTooLarge, "A.grad substep series did not converge; reduce dt");
  }

  void a2_phase(const std::array<RealField, 3>& a, double tau, ComplexField& psi) const {
    const double w = tau * charge * charge / (2.0 * spec.particle.mass * spec.constants.hbar);
    for (std::size_t i = 0; i < count; ++i) {
      const double a2 = a[0][i] * a[0][i] + a[1][i] * a[1][i] + a[2][i] * a[2][i];
      psi[i] *= std::polar(1.0, -w * a2);
    }
  }

  double integral_a2(const std::array<RealField, 3>& a) const {
    double s = 0.0;
    for (int ax = 0; ax < 3; ++ax) {
      for (double v : a[ax]) s += v * v;
    }
    return s * dv;
  }

  static void push_history(GridState& st, double v) {
    st.a2_history.push_back(v);
    if (st.a2_history.size() > 3) st.a2_history.erase(st.a2_history.begin());
  }

  void check_state(const GridState& st) const {
    if (st.n != n || std::abs(st.box - spec.box) > 1e-15 * spec.box || st.psi.size() != count) {
      throw Error(ErrorKind::GridMismatch, "state grid does not match the solver grid");
    }
    for (const auto& f : st.a_field) {
      if (f.size() != count) throw Error(ErrorKind::GridMismatch, "a_field size does not match the grid");
    }
  }

  void do_step(GridState& st) {
    check_state(st);
    const double tau = 0.5 * spec.dt;
    if (!spec.coupling) {
      kinetic(st.psi, kin_full);
    } else {
      // Midpoint field from a kinetic predictor.
      std::copy(st.psi.begin(), st.psi.end(), pred.begin());
      kinetic(pred, kin_half);
      solve_a(pred, a_mid);

      // H_A = (i hbar q / M) B, so exp(-i tau H_A / hbar) = exp(tau q / M B).
      const double s = tau * charge / spec.particle.mass;
      a2_phase(a_mid, tau, st.psi);
      exp_b(a_mid, s, st.psi);
      kinetic(st.psi, kin_full);
      exp_b(a_mid, s, st.psi);
      a2_phase(a_mid, tau, st.psi);
      solve_a(st.psi, st.a_field);
    }
    st.t += spec.dt;
    st.step += 1;
    push_history(st, integral_a2(st.a_field));
  }

  GridDiagnostics diag(const GridState& st) {
    check_state(st);
    GridDiagnostics d;
    d.step = st.step;
    d.t = st.t;
    const auto& K = spec.constants;
    const double M = spec.particle.mass;
    const ComplexField& psi = st.psi;

    double nsum = 0.0;
    for (const auto& v : psi) nsum += std::norm(v);
    d.norm = nsum * dv;

    std::copy(psi.begin(), psi.end(), next.begin());
    fft(next);
    double t_sum = 0.0;
    double px = 0.0, py = 0.0, pz = 0.0;
    for_each_mode([&](std::size_t idx, int ix, int iy, int iz) {
      const double w = std::norm(next[idx]);
      t_sum += (k[ix] * k[ix] + k[iy] * k[iy] + k[iz] * k[iz]) * w;
      px += kd[ix] * w;
      py += kd[iy] * w;
      pz += kd[iz] * w;
    });
    const double pf = dv / static_cast<double>(count);
    d.kinetic = t_sum * pf * K.hbar * K.hbar / (2.0 * M);
    d.matter_momentum = Vec3{px, py, pz} * (pf * K.hbar);

    if (spec.coupling) {
      const auto& a = st.a_field;
      // Current at this instant and -1/2 int j.A.
      gradient(psi, g);
      paramagnetic_current(psi);
      const double dq = charge * charge / M;
      double ja = 0.0;
      for (std::size_t i = 0; i < count; ++i) {
        const double n_i = std::norm(psi[i]);
        for (int ax = 0; ax < 3; ++ax) {
          double j = c[ax][i].real();
          if (spec.include_diagonal_nA) j -= dq * n_i * a[ax][i];
          ja += j * a[ax][i];
        }
      }
      d.current_potential = -0.5 * ja * dv;

      // d psi/dt = -i H psi / hbar with H = p^2/2M + (i hbar q/M) B + q^2 A^2/2M.
      for_each_mode([&](std::size_t idx, int ix, int iy, int iz) {
        next[idx] *= K.hbar * K.hbar * (k[ix] * k[ix] + k[iy] * k[iy] + k[iz] * k[iz]) / (2.0 * M);
      });
      ifft(next);
      apply_b(a, psi, term);
      const cplx bcoef(0.0, K.hbar * charge / M);
      const double a2c = charge * charge / (2.0 * M);
      for (std::size_t i = 0; i < count; ++i) {
        const double a2 = a[0][i] * a[0][i] + a[1][i] * a[1][i] + a[2][i] * a[2][i];
        const cplx hpsi = next[i] + bcoef * term[i] + a2c * a2 * psi[i];
        term[i] = cplx(0.0, -1.0 / K.hbar) * hpsi;
      }
      // d j_a/dt = (q hbar/M) Im(dpsi* d_a psi + psi* d_a dpsi).
      std::array<ComplexField, 3> gd;
      for (auto& f : gd) f.assign(count, cplx{});
      gradient(term, gd);
      const double s = charge * K.hbar / M;
      std::array<RealField, 3> src;
      for (int ax = 0; ax < 3; ++ax) {
        src[ax].resize(count);
        for (std::size_t i = 0; i < count; ++i) {
          double v = s * std::imag(std::conj(term[i]) * g[ax][i] + std::conj(psi[i]) * gd[ax][i]);
          if (spec.include_diagonal_nA) v -= dq * 2.0 * std::real(std::conj(psi[i]) * term[i]) * a[ax][i];
          src[ax][i] = v;
        }
      }
      gd = {};
      std::array<RealField, 3> dadt;
      for (auto& f : dadt) f.assign(count, 0.0);
      solve_field(src, psi, dadt);

      double e2 = 0.0;
      for (int ax = 0; ax < 3; ++ax) {
        for (double v : dadt[ax]) e2 += v * v;
      }
      d.transverse_field = K.eps0 * e2 * dv;

      // Field momentum eps0 sum_j int E_j grad A_j via Parseval, E = -dA/dt.
      Vec3 pfield;
      for (int ax = 0; ax < 3; ++ax) {
        for (std::size_t i = 0; i < count; ++i) {
          c[0][i] = -dadt[ax][i];
          c[1][i] = a[ax][i];
        }
        fft(c[0]);
        fft(c[1]);
        double sx = 0.0, sy = 0.0, sz = 0.0;
        for_each_mode([&](std::size_t idx, int ix, int iy, int iz) {
          const double im = std::imag(std::conj(c[0][idx]) * c[1][idx]);
          // Re(conj(E^) i q A^) = -q Im(conj(E^) A^)
          sx -= kd[ix] * im;
          sy -= kd[iy] * im;
          sz -= kd[iz] * im;
        });
        pfield += Vec3{sx, sy, sz};
      }
      d.field_momentum = pfield * (K.eps0 * pf);

      const auto& hist = st.a2_history;
      if (hist.size() == 3) {
        const double dt = spec.dt;
        d.a_squared_term = -0.25 * K.eps0 * (hist[2] - 2.0 * hist[1] + hist[0]) / (dt * dt);
      }
      d.transversality = transversality(st);
    }
    d.energy = d.kinetic + d.current_potential + d.transverse_field + d.a_squared_term;
    d.momentum = d.matter_momentum + d.field_momentum;
    if (st.last_energy_t && d.t > *st.last_energy_t) {
      d.flux_residual = (d.energy - st.last_energy) / (d.t - *st.last_energy_t);
    } else {
      d.flux_residual = st.last_flux_residual;
    }
    return d;
  }

  double transversality(const GridState& st, double floor_rel = kTransversalityFloor) {
    for (int ax = 0; ax < 3; ++ax) {
      for (std::size_t i = 0; i < count; ++i) c[ax][i] = st.a_field[ax][i];
      fft(c[ax]);
    }
    double amax = 0.0;
    for (int ax = 0; ax < 3; ++ax) {
      for (const auto& v : c[ax]) amax = std::max(amax, std::abs(v));
    }
    if (amax == 0.0) return 0.0;
    double worst = 0.0;
    for_each_mode([&](std::size_t idx, int ix, int iy, int iz) {
      const double qx = k[ix], qy = k[iy], qz = k[iz];
      const double qn = std::sqrt(qx * qx + qy * qy + qz * qz);
      const double an = std::sqrt(std::norm(c[0][idx]) + std::norm(c[1][idx]) + std::norm(c[2][idx]));
      if (qn == 0.0 || an <= floor_rel * amax) return;
      const double r = std::abs(qx * c[0][idx] + qy * c[1][idx] + qz * c[2][idx]) / (qn * an);
      worst = std::max(worst, r);
    });
    return worst;
  }
};

GridSolver::GridSolver(GridSpec spec) : impl_(std::make_unique<Impl>(std::move(spec))) {}
GridSolver::~GridSolver() = default;
GridSolver::GridSolver(GridSolver&&) noexcept = default;
GridSolver& GridSolver::operator=(GridSolver&&) noexcept = default;

const GridSpec& GridSolver::spec() const { return impl_->spec; }

GridState GridSolver::init(const GaussianPacket& packet) {
  auto& im = *impl_;
  const auto& spec = im.spec;
  if (packet.particle().z != spec.particle.z || packet.mass() != spec.particle.mass) {
    throw Error(ErrorKind::InvalidArgument, "packet particle differs from the grid particle");
  }
  const double b = packet.width();
  const double h = spec.spacing();
  const double L = spec.box;
  if (b < 4.0 * h) {
    std::ostringstream os;
    os << "resolution requires b >= 4*box/n: b = " << b << " m < " << 4.0 * h << " m";
    throw Error(ErrorKind::GridMismatch, os.str());
  }
  if (b > L / 8.0) {
    std::ostringstream os;
    os << "packet must fit: b <= box/8: b = " << b << " m > " << L / 8.0 << " m";
    throw Error(ErrorKind::GridMismatch, os.str());
  }
  const Vec3 p = packet.momentum();
  const double kx = p.x / spec.constants.hbar, ky = p.y / spec.constants.hbar, kz = p.z / spec.constants.hbar;
  const double kn = std::sqrt(kx * kx + ky * ky + kz * kz);
  const double dk = 2.0 * pi / L;
  const double ks[3] = {std::round(kx / dk) * dk, std::round(ky / dk) * dk, std::round(kz / dk) * dk};
  const double snap = std::hypot(ks[0] - kx, ks[1] - ky, ks[2] - kz);
  if (snap > 1e-3 * kn) {
    std::ostringstream os;
    os << "momentum is not commensurate with the box: |k_lattice - k| / |k| = " << snap / kn << " > 1e-3";
    throw Error(ErrorKind::GridMismatch, os.str());
  }
  const double band = pi * spec.n / L;
  for (double kv : ks) {
    if (std::abs(kv) + 4.0 / b > band) {
      std::ostringstream os;
      os << "momentum band requires |k| + 4/b <= pi n/box: " << std::abs(kv) + 4.0 / b << " > " << band;
      throw Error(ErrorKind::GridMismatch, os.str());
    }
  }

  const int n = spec.n;
  std::array<std::vector<cplx>, 3> f;
  for (int ax = 0; ax < 3; ++ax) {
    f[ax].resize(n);
    for (int i = 0; i < n; ++i) {
      // Sampled, not periodized: image overlap at the cell edge would add
      // ~5e-6 to the variance when b = 4h.
      const double x = (i - n / 2) * h;
      f[ax][i] = std::exp(-x * x / (8.0 * b * b)) * std::polar(1.0, ks[ax] * x);
    }
  }
  GridState st;
  st.n = n;
  st.box = L;
  st.psi.resize(spec.points());
  double nsum = 0.0;
  im.for_each_mode([&](std::size_t idx, int ix, int iy, int iz) {
    st.psi[idx] = f[0][ix] * f[1][iy] * f[2][iz];
    nsum += std::norm(st.psi[idx]);
  });
  const double s = 1.0 / std::sqrt(nsum * im.dv);
  for (auto& v : st.psi) v *= s;
  for (auto& a : st.a_field) a.assign(spec.points(), 0.0);
  if (spec.coupling) im.solve_a(st.psi, st.a_field);
  Impl::push_history(st, im.integral_a2(st.a_field));
  return st;
}

void GridSolver::solve_vector_potential(GridState& state) {
  impl_->check_state(state);
  if (!impl_->spec.particle.charged()) {
    for (auto& a : state.a_field) std::fill(a.begin(), a.end(), 0.0);
    return;
  }
  impl_->solve_a(state.psi, state.a_field);
}

void GridSolver::step(GridState& state) { impl_->do_step(state); }

GridDiagnostics GridSolver::diagnostics(const GridState& state) { return impl_->diag(state); }

double GridSolver::transversality_residual(const GridState& state, double floor_rel) {
  impl_->check_state(state);
  return impl_->transversality(state, floor_rel);
}

double GridSolver::norm(const GridState& state) const {
  double s = 0.0;
  for (const auto& v : state.psi) s += std::norm(v);
  return s * impl_->dv;
}

PositionMoments GridSolver::position_moments(const GridState& state) const {
  const auto& im = *impl_;
  const int n = im.n;
  const double L = im.spec.box;
  std::array<std::vector<double>, 3> marg;
  for (auto& m : marg) m.assign(n, 0.0);
  im.for_each_mode([&](std::size_t idx, int ix, int iy, int iz) {
    const double w = std::norm(state.psi[idx]);
    marg[0][ix] += w;
    marg[1][iy] += w;
    marg[2][iz] += w;
  });
  double mean[3], var[3];
  for (int ax = 0; ax < 3; ++ax) {
    cplx z{};
    double tot = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = (i - n / 2) * im.h;
      z += marg[ax][i] * std::polar(1.0, 2.0 * pi * x / L);
      tot += marg[ax][i];
    }
    const double c0 = L / (2.0 * pi) * std::arg(z);
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double u = (i - n / 2) * im.h - c0;
      u -= L * std::floor(u / L + 0.5);
      m1 += marg[ax][i] * u;
      m2 += marg[ax][i] * u * u;
    }
    m1 /= tot;
    m2 /= tot;
    // The circular mean is exact for a packet symmetric on the torus; adding
    // the minimum-image first moment would pick up the unpaired point at L/2.
    mean[ax] = c0;
    var[ax] = m2 - m1 * m1;
  }
  return {Vec3{mean[0], mean[1], mean[2]}, Vec3{var[0], var[1], var[2]}};
}

std::vector<GridDiagnostics> GridSolver::evolve(GridState& state, long n_steps, long record_stride,
                                                const std::function<void(const GridState&)>& on_record) {
  if (n_steps < 1) throw Error(ErrorKind::InvalidArgument, "n_steps must be >= 1");
  if (record_stride < 1) throw Error(ErrorKind::InvalidArgument, "record_stride must be >= 1");
  std::vector<GridDiagnostics> out;
  auto record = [&] {
    auto d = diagnostics(state);
    state.last_energy_t = d.t;
    state.last_energy = d.energy;
    state.last_flux_residual = d.flux_residual;
    out.push_back(d);
    if (on_record) on_record(state);
  };
  record();
  for (long s = 1; s <= n_steps; ++s) {
    try {
      step(state);
    } catch (const Error& e) {
      throw Error(e.kind(), "at step " + std::to_string(state.step + 1) + ": " + strip_kind(e));
    }
    if (s % record_stride == 0 || s == n_steps) record();
  }
  return out;
}

GridState init_grid(const GridSpec& spec, const GaussianPacket& packet) { return GridSolver(spec).init(packet); }

void solve_vector_potential(GridState& state, const GridSpec& spec) { GridSolver(spec).solve_vector_potential(state); }

void step(GridState& state, const GridSpec& spec) { GridSolver(spec).step(state); }

GridDiagnostics diagnostics(const GridState& state, const GridSpec& spec) { return GridSolver(spec).diagnostics(state); }

std::vector<GridDiagnostics> evolve(GridState& state, const GridSpec& spec, long n_steps, long record_stride) {
  return GridSolver(spec).evolve(state, n_steps, record_stride);
}

double fit_width_to_grid(const ParticleSpec& p, double beta, int n, double target_width, double cells_per_width,
                         const PhysicalConstants& k) {
  if (!(target_width > 0.0) || !(cells_per_width > 0.0) || n <= 0) {
    throw Error(ErrorKind::InvalidArgument, "width, cells per width and n must be positive");
  }
  require_subluminal(beta);
  if (beta == 0.0) return target_width;
  // box = n b / cells and k box = 2 pi m  =>  b = 2 pi m cells / (n k).
  const double kk = p.mass * beta * k.c / k.hbar;
  const double unit = 2.0 * pi * cells_per_width / (n * kk);
  const double m = std::max(1.0, std::round(target_width / unit));
  return m * unit;
}

namespace {

void write_le(std::ostream& out, const double* data, std::size_t count) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      auto u = std::bit_cast<std::uint64_t>(data[i]);
      unsigned char b[8];
      for (int j = 0; j < 8; ++j) b[j] = static_cast<unsigned char>(u >> (8 * j));
      out.write(reinterpret_cast<const char*>(b), 8);
    }
  }
}

void read_le(std::istream& in, double* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
  if constexpr (std::endian::native != std::endian::little) {
    for (std::size_t i = 0; i < count; ++i) {
      auto u = std::bit_cast<std::uint64_t>(data[i]);
      std::uint64_t r = 0;
      for (int j = 0; j < 8; ++j) r |= ((u >> (8 * j)) & 0xffu) << (8 * (7 - j));
      data[i] = std::bit_cast<double>(r);
    }
  }
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const GridSpec& spec, const GridState& state) {
  nlohmann::ordered_json h;
  h["version"] = 1;
  h["n"] = spec.n;
  h["box_m"] = spec.box;
  h["dt_s"] = spec.dt;
  h["t_s"] = state.t;
  h["particle"] = {{"z", spec.particle.z}, {"mass_kg", spec.particle.mass}};
  h["coupling"] = spec.coupling;
  h["include_diagonal_nA"] = spec.include_diagonal_nA;
  h["step"] = state.step;
  h["a2_history"] = state.a2_history;
  if (state.last_energy_t) {
    h["last_record"] = {{"t_s", *state.last_energy_t},
                        {"energy_J", state.last_energy},
                        {"flux_residual_W", state.last_flux_residual}};
  } else {
    h["last_record"] = nullptr;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open snapshot for writing: " + path.string());
  out << h.dump() << '\n';
  write_le(out, reinterpret_cast<const double*>(state.psi.data()), 2 * state.psi.size());
  for (const auto& a : state.a_field) write_le(out, a.data(), a.size());
  if (!out) throw Error(ErrorKind::IoError, "failed writing snapshot: " + path.string());
}

std::pair<GridSpec, GridState> read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open snapshot: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::IoError, "snapshot has no header: " + path.string());
  GridSpec spec;
  GridState st;
  try {
    const auto h = nlohmann::json::parse(line);
    if (h.at("version").get<int>() != 1) throw Error(ErrorKind::SchemaError, "unsupported snapshot version");
    spec.n = h.at("n").get<int>();
    spec.box = h.at("box_m").get<double>();
    spec.dt = h.at("dt_s").get<double>();
    spec.particle.z = h.at("particle").at("z").get<double>();
    spec.particle.mass = h.at("particle").at("mass_kg").get<double>();
    spec.particle.label = "snapshot";
    spec.coupling = h.at("coupling").get<bool>();
    spec.include_diagonal_nA = h.at("include_diagonal_nA").get<bool>();
    st.t = h.at("t_s").get<double>();
    st.step = h.value("step", 0L);
    if (h.contains("a2_history")) st.a2_history = h["a2_history"].get<std::vector<double>>();
    if (h.contains("last_record") && !h["last_record"].is_null()) {
      const auto& r = h["last_record"];
      st.last_energy_t = r.at("t_s").get<double>();
      st.last_energy = r.at("energy_J").get<double>();
      st.last_flux_residual = r.at("flux_residual_W").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("bad snapshot header: ") + e.what());
  }
  spec.validate();
  st.n = spec.n;
  st.box = spec.box;
  const std::size_t count = spec.points();
  st.psi.resize(count);
  read_le(in, reinterpret_cast<double*>(st.psi.data()), 2 * count);
  for (auto& a : st.a_field) {
    a.resize(count);
    read_le(in, a.data(), count);
  }
  if (!in) throw Error(ErrorKind::IoError, "snapshot truncated: " + path.string());
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorKind::IoError, "snapshot has trailing bytes: " + path.string());
  }
  return {spec, std::move(st)};
}

void write_trajectory_csv(std::ostream& out, const std::vector<GridDiagnostics>& records) {
  out << "step,t_s,norm,energy_J,px,py,pz,flux_residual_W\n";
  const auto old = out.precision(12);
  for (const auto& r : records) {
    out << r.step << ',' << r.t << ',' << r.norm << ',' << r.energy << ',' << r.momentum.x << ',' << r.momentum.y
        << ',' << r.momentum.z << ',' << r.flux_residual << '\n';
  }
  out.precision(old);
}

}  // namespace selffield
