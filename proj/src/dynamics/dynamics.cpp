#include "detproc/dynamics/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "detproc/error.hpp"
#include "detproc/kernels/spec.hpp"
#include "detproc/parallel.hpp"
#include "detproc/rng.hpp"

namespace detproc::dynamics {
namespace {

constexpr double kMinGap = 1e-12;

// One generator per particle, plus a separate one for the matrix start.
struct Noise {
  std::vector<SplitMix64> gen;
  std::vector<std::normal_distribution<double>> nd;
  Noise(std::uint64_t seed, std::uint64_t r, int N) {
    for (int j = 0; j < N; ++j) gen.push_back(SplitMix64::stream(seed, r, j + 1));
    nd.resize(N);
  }
  double operator()(int j) { return nd[j](gen[j]); }
};

std::vector<double> gue_eigenvalues(int N, double t, std::uint64_t seed, std::uint64_t r) {
  auto g = SplitMix64::stream(seed, r, 0);
  std::normal_distribution<double> Z;
  Eigen::MatrixXcd H(N, N);
  const double sd = std::sqrt(t), so = std::sqrt(t / 2);
  for (int i = 0; i < N; ++i) {
    H(i, i) = sd * Z(g);
    for (int j = i + 1; j < N; ++j) {
      const std::complex<double> z(so * Z(g), so * Z(g));
      H(i, j) = z;
      H(j, i) = std::conj(z);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  return {ev.data(), ev.data() + N};
}

// Eigenvalues of M*M for an (N+ν)×N complex Gaussian M with E|M_ij|² = 2t.
std::vector<double> chgue_eigenvalues(int N, int nu, double t, std::uint64_t seed, std::uint64_t r) {
  auto g = SplitMix64::stream(seed, r, 0);
  std::normal_distribution<double> Z;
  const double sd = std::sqrt(t);
  Eigen::MatrixXcd M(N + nu, N);
  for (int i = 0; i < N + nu; ++i)
    for (int j = 0; j < N; ++j) M(i, j) = {sd * Z(g), sd * Z(g)};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M.adjoint() * M, Eigen::EigenvaluesOnly);
  std::vector<double> out(N);
  for (int j = 0; j < N; ++j) out[j] = std::max(0.0, es.eigenvalues()[j]);
  return out;
}

bool ordered(const std::vector<double>& y, bool nonneg) {
  if (nonneg && y.front() < 0.0) return false;
  for (std::size_t j = 1; j < y.size(); ++j)
    if (!(y[j] - y[j - 1] >= kMinGap)) return false;
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

struct Model1 {
  bool besq = false;
  double nu = 0.0;
};

// Euler–Maruyama from t0 to t1 with gap-controlled sub-steps; a step that
// breaks the ordering (or positivity) is redrawn with half the size.
void advance(std::vector<double>& x, double t0, double t1, const Model1& m, const SimParams& p, Noise& noise,
             long& rejected, int replica) {
  const int N = static_cast<int>(x.size());
  std::vector<double> drift(N), y(N);
  double t = t0;
  while (t < t1) {
    double gap = std::numeric_limits<double>::infinity();
    for (int j = 1; j < N; ++j) {
      // besq: the noise is unit-size in √x, so measure gaps there
      const double d = m.besq ? std::sqrt(x[j]) - std::sqrt(x[j - 1]) : x[j] - x[j - 1];
      gap = std::min(gap, d);
    }
    double h = std::min({p.dt_max, p.gap_factor * gap * gap, t1 - t});
    for (int j = 0; j < N; ++j) {
      double s = 0.0;
      for (int k = 0; k < N; ++k)
        if (k != j) s += 1.0 / (x[j] - x[k]);
      drift[j] = m.besq ? 2.0 * (m.nu + 1.0) + 4.0 * x[j] * s : s;
    }
    for (int tries = 0;; ++tries) {
      const double sh = std::sqrt(h);
      for (int j = 0; j < N; ++j) {
        const double z = noise(j);
        y[j] = x[j] + h * drift[j] + (m.besq ? 2.0 * std::sqrt(std::max(x[j], 0.0)) : 1.0) * sh * z;
        if (m.besq && m.nu < 0.0) y[j] = std::abs(y[j]);
      }
      if (m.besq && m.nu < 0.0) std::sort(y.begin(), y.end());  // reflection may swap a pair at the wall
      if (ordered(y, m.besq)) break;
      ++rejected;
      if (tries >= p.max_halvings) {
        std::ostringstream os;
        os << "simulation: could not keep particles ordered (replica " << replica << ", t = " << t
           << ", min gap " << gap << ", step " << h << ")";
        throw SimulationError(os.str());
      }
      h *= 0.5;
    }
    x.swap(y);
    t = (h >= t1 - t) ? t1 : t + h;
  }
}

void check_grid(std::span<const double> t_grid) {
  if (t_grid.empty() || t_grid.front() != 0.0) throw ParameterError("simulate: time grid must start at 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]) || !std::isfinite(t_grid[i]))
      throw ParameterError("simulate: time grid must be strictly increasing");
}

void check_params(int N, const SimParams& p) {
  if (N < 1) throw ParameterError("simulate: N must be >= 1");
  if (!(p.dt_max > 0.0)) throw ParameterError("simulate: dt_max must be > 0");
  if (p.replicas < 1) throw ParameterError("simulate: replicas must be >= 1");
  if (!(p.gap_factor > 0.0)) throw ParameterError("simulate: gap_factor must be > 0");
}

std::vector<double> explicit_start(int N, const std::vector<double>& x0, bool nonneg) {
  if (static_cast<int>(x0.size()) != N) throw ParameterError("simulate: x0 must have N entries");
  std::vector<double> x = x0;
  std::sort(x.begin(), x.end());
  for (std::size_t j = 1; j < x.size(); ++j)
    if (!(x[j] > x[j - 1])) throw DomainError("simulate: initial points must be distinct");
  if (nonneg && x.front() < 0.0) throw DomainError("simulate_besq: initial points must be >= 0");
  return x;
}

PathEnsemble run(int N, const Model1& m, const Initial& x0, std::span<const double> t_grid, const SimParams& p) {
  check_params(N, p);
  check_grid(t_grid);
  PathEnsemble ens;
  ens.replicas = p.replicas;
  ens.particles = N;
  ens.time_grid.assign(t_grid.begin(), t_grid.end());
  ens.model = m.besq ? Model::besq : Model::dyson;
  ens.nu = m.nu;
  ens.seed = p.seed;
  ens.dt_max = p.dt_max;
  ens.positions.assign(static_cast<std::size_t>(p.replicas) * t_grid.size() * N, 0.0);

  const bool origin = std::holds_alternative<Origin>(x0);
  const bool integer_nu = m.nu >= 0.0 && m.nu == std::floor(m.nu);
  std::vector<double> start;
  if (!origin) start = explicit_start(N, std::get<std::vector<double>>(x0), m.besq);
  // exact matrix draw at the first positive grid time
  const bool matrix_start = origin && N > 1 && (!m.besq || integer_nu);
  if (origin && !matrix_start) {
    start.resize(N);
    for (int j = 0; j < N; ++j) start[j] = m.besq ? 1e-6 * (j + 1) : 0.0;
    if (m.besq && integer_nu) std::fill(start.begin(), start.end(), 0.0);  // N = 1
  }

  std::vector<long> rej(p.replicas, 0);
  parallel_for(p.replicas, p.threads, [&](long r) {
    const int ri = static_cast<int>(r);
    const std::uint64_t key = p.first_replica + static_cast<std::uint64_t>(r);
    Noise noise(p.seed, key, N);
    std::vector<double> x = matrix_start ? std::vector<double>(N, 0.0) : start;
    auto store = [&](std::size_t ti) {
      std::copy(x.begin(), x.end(), ens.positions.begin() + (r * t_grid.size() + ti) * N);
    };
    store(0);
    for (std::size_t ti = 1; ti < t_grid.size(); ++ti) {
      if (matrix_start && ti == 1) {
        x = m.besq ? chgue_eigenvalues(N, static_cast<int>(m.nu), t_grid[1], p.seed, key)
                   : gue_eigenvalues(N, t_grid[1], p.seed, key);
      } else {
        advance(x, t_grid[ti - 1], t_grid[ti], m, p, noise, rej[r], ri);
      }
      store(ti);
    }
  });
  for (long v : rej) ens.rejected_steps += v;
  return ens;
}

}  // namespace

std::string to_string(Model m) {
  switch (m) {
    case Model::dyson: return "dyson";
    case Model::besq: return "besq";
    case Model::drifted: return "drifted";
  }
  return "?";
}

std::size_t PathEnsemble::time_index(double t) const {
  for (std::size_t i = 0; i < time_grid.size(); ++i)
    if (std::abs(time_grid[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
  throw ParameterError("time " + kernels::format_double(t) + " is not on the ensemble's time grid");
}

long PathEnsemble::violations() const {
  long v = 0;
  for (int r = 0; r < replicas; ++r)
    for (std::size_t ti = 0; ti < times(); ++ti) {
      const auto s = slice(r, ti);
      bool bad = model == Model::besq && s[0] < 0.0;
      for (int j = 1; j < particles; ++j)
        // everything may sit at the origin at t = 0
        if (s[j] < s[j - 1] || (s[j] == s[j - 1] && time_grid[ti] > 0.0)) bad = true;
      v += bad;
    }
  return v;
}

PathEnsemble simulate_dyson(int N, const Initial& x0, std::span<const double> t_grid, const SimParams& p) {
  return run(N, {false, 0.0}, x0, t_grid, p);
}

PathEnsemble simulate_besq(int N, double nu, const Initial& x0, std::span<const double> t_grid, const SimParams& p) {
  if (!(nu > -1.0)) throw DomainError("simulate_besq: nu must be > -1");
  return run(N, {true, nu}, x0, t_grid, p);
}

PathEnsemble simulate_drifted(int N, const Initial& x0, std::span<const double> t_grid, const SimParams& p,
                              const kernels::DriftDensity& drift) {
  if (!std::isfinite(drift.inv_moment)) throw DomainError("simulate_drifted: drift density has no finite ∫ρ/x");
  auto ens = simulate_dyson(N, x0, t_grid, p);
  ens.model = Model::drifted;
  ens.drift_id = drift.id;
  ens.drift_inv_moment = drift.inv_moment;
  for (int r = 0; r < ens.replicas; ++r)
    for (std::size_t ti = 0; ti < ens.times(); ++ti) {
      const double t = ens.time_grid[ti];
      const double shift = t * t / 4.0 + t * drift.inv_moment;
      double* s = ens.positions.data() + (static_cast<std::size_t>(r) * ens.times() + ti) * N;
      for (int j = 0; j < N; ++j) s[j] += shift;
    }
  return ens;
}

Histogram empirical_density(const PathEnsemble& ens, double t, int bins) {
  const auto ti = ens.time_index(t);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int r = 0; r < ens.replicas; ++r)
    for (double v : ens.slice(r, ti)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  return empirical_density(ens, t, bins, lo, hi);
}

Histogram empirical_density(const PathEnsemble& ens, double t, int bins, double lo, double hi) {
  if (bins < 1 || !(hi > lo)) throw ParameterError("empirical_density: need bins >= 1 and hi > lo");
  const auto ti = ens.time_index(t);
  const double w = (hi - lo) / bins;
  Histogram h;
  for (int b = 0; b <= bins; ++b) h.edges.push_back(lo + b * w);
  h.edges.back() = hi;
  std::vector<double> s(bins, 0.0), s2(bins, 0.0), c(bins);
  double out = 0.0;
  for (int r = 0; r < ens.replicas; ++r) {
    std::fill(c.begin(), c.end(), 0.0);
    for (double v : ens.slice(r, ti)) {
      if (v < lo || v > hi) {
        out += 1;
        continue;
      }
      c[std::min(bins - 1, static_cast<int>((v - lo) / w))] += 1;
    }
    for (int b = 0; b < bins; ++b) {
      s[b] += c[b];
      s2[b] += c[b] * c[b];
    }
  }
  const double R = ens.replicas;
  for (int b = 0; b < bins; ++b) {
    const double m = s[b] / R;
    const double var = R > 1 ? std::max(0.0, (s2[b] - R * m * m) / (R - 1)) : 0.0;
    h.density.push_back(m / w);
    h.std_error.push_back(std::sqrt(var / R) / w);
  }
  h.outside = out / R;
  return h;
}

MgfEstimate empirical_mgf(const PathEnsemble& ens, std::span<const double> times,
                          std::span<const std::function<double(double)>> fs) {
  if (times.size() != fs.size()) throw ParameterError("empirical_mgf: one test function per time");
  std::vector<std::size_t> idx;
  for (double t : times) idx.push_back(ens.time_index(t));
  std::vector<double> v(ens.replicas);
  for (int r = 0; r < ens.replicas; ++r) {
    double e = 0.0;
    for (std::size_t m = 0; m < idx.size(); ++m)
      for (double x : ens.slice(r, idx[m])) e += fs[m](x);
    if (!std::isfinite(e) || e > std::log(std::numeric_limits<double>::max()) - 30)
      throw NumericalError("empirical_mgf: exponent " + kernels::format_double(e) + " overflows (replica " +
                           std::to_string(r) + ")");
    v[r] = std::exp(e);
  }
  const double R = ens.replicas;
  double sum = 0.0;
  for (double x : v) sum += x;
  MgfEstimate est;
  est.estimate = sum / R;
  if (ens.replicas > 1) {
    double acc = 0.0;
    for (double x : v) {
      const double loo = (sum - x) / (R - 1) - est.estimate;
      acc += loo * loo;
    }
    est.std_error = std::sqrt((R - 1) / R * acc);
  }
  return est;
}

ScalingMap parse_scaling_map(const std::string& s) {
  if (s == "bulk") return ScalingMap::bulk;
  if (s == "hard_edge") return ScalingMap::hard_edge;
  if (s == "soft_edge") return ScalingMap::soft_edge;
  throw ParameterError("unknown scaling map '" + s + "' (bulk, hard_edge, soft_edge)");
}

SpaceTimePoint scaling_map(SpaceTimePoint p, ScalingMap map, int N) {
  if (N < 1) throw ParameterError("scaling_map: N must be >= 1");
  const double n = N;
  switch (map) {
    case ScalingMap::bulk: return {2 * n / (M_PI * M_PI) + p.t, p.x};
    case ScalingMap::hard_edge: return {n + p.t, p.x};
    case ScalingMap::soft_edge: {
      const double c = std::cbrt(n);
      return {c + p.t, 2 * c * c + c * p.t - p.t * p.t / 4 + p.x};
    }
  }
  return p;
}

// ---- persistence

namespace {

constexpr char kMagic[8] = {'D', 'P', 'E', 'N', 'S', 'M', 'B', 'L'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}
void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}
void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw ParameterError("load_ensemble: truncated file");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw ParameterError("load_ensemble: truncated file");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}
double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

nlohmann::json ensemble_metadata(const PathEnsemble& ens) {
  nlohmann::json j;
  j["format"] = "detproc path ensemble v1; float64 little-endian, (replica, time, particle) order";
  j["model"] = to_string(ens.model);
  j["N"] = ens.particles;
  j["replicas"] = ens.replicas;
  j["time_grid"] = ens.time_grid;
  j["seed"] = ens.seed;
  j["dt_max"] = ens.dt_max;
  j["rejected_steps"] = ens.rejected_steps;
  if (ens.model == Model::besq) j["nu"] = ens.nu;
  if (ens.model == Model::drifted) {
    j["drift_id"] = ens.drift_id;
    j["drift_inv_moment"] = ens.drift_inv_moment;
  }
  return j;
}

void save_ensemble(const PathEnsemble& ens, const std::filesystem::path& stem) {
  auto bin = stem;
  bin += ".bin";
  std::ofstream os(bin, std::ios::binary);
  if (!os) throw ParameterError("save_ensemble: cannot open " + bin.string());
  os.write(kMagic, 8);
  put_u32(os, kVersion);
  put_u32(os, static_cast<std::uint32_t>(ens.model));
  put_u64(os, static_cast<std::uint64_t>(ens.particles));
  put_u64(os, static_cast<std::uint64_t>(ens.replicas));
  put_u64(os, ens.times());
  put_u64(os, ens.seed);
  put_f64(os, ens.nu);
  put_f64(os, ens.drift_inv_moment);
  put_f64(os, ens.dt_max);
  put_u64(os, static_cast<std::uint64_t>(ens.rejected_steps));
  put_u32(os, static_cast<std::uint32_t>(ens.drift_id.size()));
  os.write(ens.drift_id.data(), static_cast<std::streamsize>(ens.drift_id.size()));
  for (double t : ens.time_grid) put_f64(os, t);
  for (double x : ens.positions) put_f64(os, x);
  if (!os) throw ParameterError("save_ensemble: write failed for " + bin.string());

  auto js = stem;
  js += ".json";
  std::ofstream jo(js);
  if (!jo) throw ParameterError("save_ensemble: cannot open " + js.string());
  jo << ensemble_metadata(ens).dump(2) << "\n";
}

PathEnsemble load_ensemble(const std::filesystem::path& bin) {
  std::ifstream is(bin, std::ios::binary);
  if (!is) throw ParameterError("load_ensemble: cannot open " + bin.string());
  char magic[8];
  if (!is.read(magic, 8) || !std::equal(magic, magic + 8, kMagic))
    throw ParameterError("load_ensemble: not a path ensemble file");
  if (get_u32(is) != kVersion) throw ParameterError("load_ensemble: unsupported version");
  PathEnsemble e;
  const auto model = get_u32(is);
  if (model > 2) throw ParameterError("load_ensemble: bad model tag");
  e.model = static_cast<Model>(model);
  e.particles = static_cast<int>(get_u64(is));
  e.replicas = static_cast<int>(get_u64(is));
  const auto T = get_u64(is);
  e.seed = get_u64(is);
  e.nu = get_f64(is);
  e.drift_inv_moment = get_f64(is);
  e.dt_max = get_f64(is);
  e.rejected_steps = static_cast<long>(get_u64(is));
  e.drift_id.resize(get_u32(is));
  if (!is.read(e.drift_id.data(), static_cast<std::streamsize>(e.drift_id.size())))
    throw ParameterError("load_ensemble: truncated file");
  for (std::uint64_t i = 0; i < T; ++i) e.time_grid.push_back(get_f64(is));
  const std::size_t n = static_cast<std::size_t>(e.replicas) * T * e.particles;
  e.positions.resize(n);
  for (auto& x : e.positions) x = get_f64(is);
  return e;
}

void write_slice_csv(std::ostream& os, const PathEnsemble& ens, double t) {
  const auto ti = ens.time_index(t);
  os << "replica,particle,x\n";
  for (int r = 0; r < ens.replicas; ++r) {
    const auto s = ens.slice(r, ti);
    for (int j = 0; j < ens.particles; ++j) os << r << ',' << j << ',' << kernels::format_double(s[j]) << '\n';
  }
}

}  // namespace detproc::dynamics
