#include "couette/nls2d.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <random>

#include <fftw3.h>

namespace couette {

FlowState FlowState::zeros(const ChebGrid& grid, Real Lx, int K, Real nu) {
  if (!(Lx > 0.0) || !std::isfinite(Lx)) throw ConfigError("Lx must be positive");
  if (K < 1) throw ConfigError("K must be at least 1");
  FlowState s;
  s.Lx = Lx;
  s.K = K;
  s.nu = nu;
  s.modes.assign(static_cast<std::size_t>(2 * K + 1), ModeField::Zero(grid.size()));
  return s;
}

void FlowState::check_invariants(const ChebGrid& grid, Real tol) const {
  if (modes.size() != static_cast<std::size_t>(2 * K + 1)) throw ConfigError("flow state: wrong number of modes");
  Real scale = 0.0;
  for (const auto& m : modes) {
    grid.check_length(m, "flow state");
    scale = std::max(scale, m.cwiseAbs().maxCoeff());
  }
  for (int j = 0; j <= K; ++j) {
    if ((mode(j) - mode(-j).conjugate()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1e-300)) {
      throw ConfigError("flow state: modes are not conjugate-symmetric");
    }
  }
  for (const auto& m : modes) {
    if (std::abs(m[0]) > tol * scale || std::abs(m[m.size() - 1]) > tol * scale) {
      throw ConfigError("flow state: vorticity does not vanish at the walls");
    }
  }
}

Real theorem_norm(const ChebGrid& grid, const FlowState& s, Real m, Real eps) {
  Real n0 = 0.0, n1 = 0.0;
  const Real nu23 = std::cbrt(s.nu * s.nu);
  for (int j = -s.K; j <= s.K; ++j) {
    if (j == 0) continue;
    const Real k = s.wavenumber(j);
    const Real low = std::pow(1.0 + 1.0 / (k * k), eps);
    const ModeField& w = s.mode(j);
    n0 += std::pow(1.0 + k * k, m) * low * grid.norm_sq(w);
    n1 += nu23 * std::pow(1.0 + k * k, m - 1.0) * low * grid.norm_sq(grid.differentiate(w, 1));
  }
  const Real f = 2.0 * kPi * s.dk();
  return std::sqrt(f * n0) + std::sqrt(f * n1);
}

FlowState init_perturbation(const ChebGrid& grid, Real Lx, int K, Real nu, const InitConfig& cfg) {
  if (!(cfg.amplitude >= 0.0) || !std::isfinite(cfg.amplitude)) throw ConfigError("amplitude must be non-negative");
  if (cfg.max_profile < 1) throw ConfigError("init: need at least one wall-normal profile");
  if (cfg.spectrum == Spectrum::random && (cfg.max_mode < 1 || cfg.max_mode > K)) {
    throw ConfigError("init: active mode range must satisfy 1 <= max_mode <= K");
  }
  FlowState s = FlowState::zeros(grid, Lx, K, nu);
  if (cfg.amplitude == 0.0) return s;

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<Real> normal;
  auto cnormal = [&] {
    const Real re = normal(rng);
    const Real im = normal(rng);
    return Complex(re, im) / std::sqrt(2.0);
  };
  std::vector<ModeField> profiles;
  for (int p = 1; p <= cfg.max_profile; ++p) {
    profiles.push_back(sample(grid, [p](Real y) { return Complex(std::sin(p * kPi * (y + 1.0) / 2.0)); }));
    profiles.back()[0] = 0.0;
    profiles.back()[grid.n()] = 0.0;
  }

  if (cfg.spectrum == Spectrum::random) {
    for (int j = 1; j <= cfg.max_mode; ++j) {
      for (int p = 1; p <= cfg.max_profile; ++p) s.mode(j) += cnormal() * profiles[p - 1];
    }
  } else {
    std::uniform_real_distribution<Real> phase(-kPi, kPi);
    std::vector<Complex> b;
    std::vector<Real> theta;
    for (int p = 1; p <= cfg.max_profile; ++p) {
      b.push_back(cnormal());
      theta.push_back(phase(rng));
    }
    for (int j = 1; j <= K; ++j) {
      const Real q = s.wavenumber(j) / cfg.smooth_scale;
      const Real envelope = q * std::exp(-0.5 * q * q);
      for (int p = 1; p <= cfg.max_profile; ++p) {
        s.mode(j) += b[p - 1] * std::polar(envelope / p, theta[p - 1] * q) * profiles[p - 1];
      }
    }
  }
  for (int j = 1; j <= K; ++j) s.mode(-j) = s.mode(j).conjugate();

  const Real norm = theorem_norm(grid, s, cfg.m, cfg.eps);
  if (!(norm > 0.0)) throw NumericalError("init: generated field has zero norm");
  for (auto& m : s.modes) m *= cfg.amplitude / norm;
  return s;
}

int dealiased_points(int K) {
  int n = 1;
  while (n < 3 * K + 1) n *= 2;
  return n;
}

Velocity velocity_from_vorticity(const ChebGrid& grid, const FlowState& s) {
  Velocity v;
  for (int j = -s.K; j <= s.K; ++j) {
    const Real k = s.wavenumber(j);
    const ModeField phi = helmholtz_solve(grid, k, s.mode(j));
    v.u1.push_back(grid.differentiate(phi, 1));
    v.u2.push_back(Complex(0.0, -k) * phi);
  }
  return v;
}

std::vector<ModeField> nonlinear_term_direct(const ChebGrid& grid, const FlowState& s) {
  const int K = s.K;
  std::vector<ModeField> phi, dphi, dw;
  for (int j = -K; j <= K; ++j) {
    phi.push_back(helmholtz_solve(grid, s.wavenumber(j), s.mode(j)));
    dphi.push_back(grid.differentiate(phi.back(), 1));
    dw.push_back(grid.differentiate(s.mode(j), 1));
  }
  auto at = [K](const std::vector<ModeField>& v, int j) -> const ModeField& { return v[static_cast<std::size_t>(j + K)]; };
  std::vector<ModeField> out;
  for (int j = -K; j <= K; ++j) {
    ModeField acc = ModeField::Zero(grid.size());
    for (int l = -K; l <= K; ++l) {
      const int r = j - l;
      if (r < -K || r > K) continue;
      const Complex il(0.0, s.wavenumber(l));
      const Complex ir(0.0, s.wavenumber(r));
      acc += (il * at(phi, l)).cwiseProduct(at(dw, r)) - at(dphi, l).cwiseProduct(ir * s.mode(r));
    }
    out.push_back(s.dk() * acc);
  }
  return out;
}

namespace {
// the FFTW planner is not thread-safe; fftw_execute is
std::mutex planner_mutex;
}  // namespace

// FFTW buffers and plans for (n + 1) simultaneous transforms of length nx.
struct NonlinearSolver::Fft {
  int rows;
  int nx;
  int nh;
  fftw_complex* spec = nullptr;
  double* phys = nullptr;
  fftw_plan to_phys = nullptr;
  fftw_plan to_spec = nullptr;

  Fft(int rows_, int nx_) : rows(rows_), nx(nx_), nh(nx_ / 2 + 1) {
    const std::lock_guard<std::mutex> lock(planner_mutex);
    spec = fftw_alloc_complex(static_cast<std::size_t>(rows) * nh);
    phys = fftw_alloc_real(static_cast<std::size_t>(rows) * nx);
    if (spec == nullptr || phys == nullptr) throw NumericalError("fftw allocation failed");
    int len[1] = {nx};
    to_phys = fftw_plan_many_dft_c2r(1, len, rows, spec, nullptr, 1, nh, phys, nullptr, 1, nx, FFTW_ESTIMATE);
    to_spec = fftw_plan_many_dft_r2c(1, len, rows, phys, nullptr, 1, nx, spec, nullptr, 1, nh, FFTW_ESTIMATE);
    if (to_phys == nullptr || to_spec == nullptr) throw NumericalError("fftw planning failed");
  }
  ~Fft() {
    const std::lock_guard<std::mutex> lock(planner_mutex);
    if (to_phys) fftw_destroy_plan(to_phys);
    if (to_spec) fftw_destroy_plan(to_spec);
    fftw_free(spec);
    fftw_free(phys);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  // fields[j] for j = 0..K, scaled by `scale`, into a rows x nx physical array
  void synthesize(const std::vector<ModeField>& fields, Real scale, std::vector<double>& out) {
    std::memset(spec, 0, sizeof(fftw_complex) * static_cast<std::size_t>(rows) * nh);
    for (std::size_t j = 0; j < fields.size(); ++j) {
      for (int i = 0; i < rows; ++i) {
        const Complex v = scale * fields[j][i];
        spec[static_cast<std::size_t>(i) * nh + j][0] = v.real();
        spec[static_cast<std::size_t>(i) * nh + j][1] = j == 0 ? 0.0 : v.imag();
      }
    }
    fftw_execute(to_phys);
    out.assign(phys, phys + static_cast<std::size_t>(rows) * nx);
  }
};

NonlinearSolver::NonlinearSolver(const ChebGrid& grid, Real Lx, int K, Real nu, Real dt)
    : grid_(&grid), Lx_(Lx), K_(K), nu_(nu), dt_(dt), nx_(dealiased_points(K)) {
  if (!(Lx > 0.0)) throw ConfigError("Lx must be positive");
  if (K < 1) throw ConfigError("K must be at least 1");
  const Real dk = 2.0 * kPi / Lx;
  for (int j = 0; j <= K; ++j) {
    steppers_.emplace_back(grid, dk * j, nu, dt);
    elliptic_.emplace_back(grid, dk * j);
  }
  fft_ = std::make_unique<Fft>(grid.size(), nx_);
}

NonlinearSolver::~NonlinearSolver() = default;

std::vector<ModeField> NonlinearSolver::stream_functions(const FlowState& s) const {
  std::vector<ModeField> out(static_cast<std::size_t>(2 * K_ + 1));
  for (int j = 0; j <= K_; ++j) {
    out[static_cast<std::size_t>(j + K_)] = elliptic_[static_cast<std::size_t>(j)].solve(s.mode(j));
    if (j > 0) out[static_cast<std::size_t>(K_ - j)] = out[static_cast<std::size_t>(j + K_)].conjugate();
  }
  return out;
}

std::vector<ModeField> NonlinearSolver::nonlinear_term(const FlowState& s) {
  if (s.K != K_ || s.Lx != Lx_) throw ConfigError("nonlinear_term: state does not match solver");
  const ChebGrid& g = *grid_;
  const Real dk = s.dk();
  std::vector<ModeField> u1, u2, wx, wy;
  for (int j = 0; j <= K_; ++j) {
    const Real k = dk * j;
    const ModeField phi = elliptic_[static_cast<std::size_t>(j)].solve(s.mode(j));
    u1.push_back(g.d1().cast<Complex>() * phi);
    u2.push_back(Complex(0.0, -k) * phi);
    wx.push_back(Complex(0.0, k) * s.mode(j));
    wy.push_back(g.d1().cast<Complex>() * s.mode(j));
  }
  std::vector<double> pu1, pu2, pwx, pwy;
  fft_->synthesize(u1, dk, pu1);
  fft_->synthesize(u2, dk, pu2);
  fft_->synthesize(wx, dk, pwx);
  fft_->synthesize(wy, dk, pwy);

  const int rows = g.size();
  max_speed_ = 0.0;
  for (int i = 0; i < rows; ++i) {
    const Real y = g.nodes()[i];
    for (int q = 0; q < nx_; ++q) {
      const std::size_t idx = static_cast<std::size_t>(i) * nx_ + q;
      fft_->phys[idx] = -(pu1[idx] * pwx[idx] + pu2[idx] * pwy[idx]);
      max_speed_ = std::max(max_speed_, std::abs(pu1[idx] + y));
    }
  }
  fftw_execute(fft_->to_spec);

  const Real norm = 1.0 / (dk * nx_);
  std::vector<ModeField> out(static_cast<std::size_t>(2 * K_ + 1), ModeField::Zero(rows));
  for (int j = 0; j <= K_; ++j) {
    ModeField& m = out[static_cast<std::size_t>(j + K_)];
    for (int i = 0; i < rows; ++i) {
      const fftw_complex& c = fft_->spec[static_cast<std::size_t>(i) * fft_->nh + j];
      m[i] = Complex(c[0], j == 0 ? 0.0 : c[1]) * norm;
    }
    if (j > 0) out[static_cast<std::size_t>(K_ - j)] = m.conjugate();
  }
  return out;
}

Real NonlinearSolver::cfl_limit(const FlowState& s) {
  nonlinear_term(s);
  return 0.5 * (Lx_ / nx_) / std::max(max_speed_, 1e-300);
}

void NonlinearSolver::step(FlowState& s, bool linear_only) {
  std::vector<ModeField> forcing;
  if (!linear_only) {
    forcing = nonlinear_term(s);
    const Real limit = 0.5 * (Lx_ / nx_) / std::max(max_speed_, 1e-300);
    if (dt_ > limit) {
      throw InconclusiveError("CFL violated: dt = " + std::to_string(dt_) + " exceeds " + std::to_string(limit) +
                              "; refine the x grid or reduce dt");
    }
  }
  for (int j = 0; j <= K_; ++j) {
    LinearStepper& st = steppers_[static_cast<std::size_t>(j)];
    ModeField next = linear_only ? st.step(s.mode(j)) : st.step(s.mode(j), forcing[static_cast<std::size_t>(j + K_)]);
    if (j == 0) next = next.real().cast<Complex>();
    s.mode(j) = std::move(next);
    if (j > 0) s.mode(-j) = s.mode(j).conjugate();
  }
  s.t += dt_;
}

std::vector<ModeField> nonlinear_term(const ChebGrid& grid, const FlowState& s) {
  NonlinearSolver solver(grid, s.Lx, s.K, s.nu, 0.01);
  return solver.nonlinear_term(s);
}

FlowState step_nonlinear(const ChebGrid& grid, const FlowState& s, Real dt) {
  NonlinearSolver solver(grid, s.Lx, s.K, s.nu, dt);
  FlowState out = s;
  solver.step(out);
  return out;
}

namespace {

constexpr char kMagic[4] = {'C', 'F', 'L', 'W'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw ConfigError("checkpoint: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const FlowState& s, int n) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("checkpoint: cannot open " + path.string() + " for writing");
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kVersion);
  put<double>(os, s.Lx);
  put<std::int32_t>(os, s.K);
  put<std::int32_t>(os, n);
  put<double>(os, s.nu);
  put<double>(os, s.t);
  for (const auto& m : s.modes) {
    if (m.size() != n + 1) throw ConfigError("checkpoint: mode length does not match n");
    for (int i = 0; i <= n; ++i) {
      put<double>(os, m[i].real());
      put<double>(os, m[i].imag());
    }
  }
  if (!os) throw NumericalError("checkpoint: write failed");
}

FlowState load_checkpoint(const std::filesystem::path& path, int* n_out) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("checkpoint: cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw ConfigError("checkpoint: bad magic");
  if (get<std::uint32_t>(is) != kVersion) throw ConfigError("checkpoint: unsupported version");
  FlowState s;
  s.Lx = get<double>(is);
  s.K = get<std::int32_t>(is);
  const int n = get<std::int32_t>(is);
  s.nu = get<double>(is);
  s.t = get<double>(is);
  if (s.K < 1 || n < 2 || !(s.Lx > 0.0) || !std::isfinite(s.nu)) throw ConfigError("checkpoint: invalid header");
  s.modes.assign(static_cast<std::size_t>(2 * s.K + 1), ModeField(n + 1));
  for (auto& m : s.modes) {
    for (int i = 0; i <= n; ++i) {
      const double re = get<double>(is);
      const double im = get<double>(is);
      m[i] = Complex(re, im);
    }
  }
  if (is.peek() != std::char_traits<char>::eof()) throw ConfigError("checkpoint: trailing bytes");
  if (n_out) *n_out = n;
  return s;
}

}  // namespace couette
