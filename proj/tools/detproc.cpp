#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "detproc/acceptance.hpp"
#include "detproc/configspace/configspace.hpp"
#include "detproc/dpp/dpp.hpp"
#include "detproc/dynamics/dynamics.hpp"
#include "detproc/error.hpp"
#include "detproc/kernels/classical.hpp"
#include "detproc/kernels/finite.hpp"
#include "detproc/kernels/spec.hpp"
#include "detproc/quadrature.hpp"
#include "detproc/specfun/asymptotics.hpp"
#include "detproc/specfun/oscillator.hpp"
#include "detproc/specfun/transition.hpp"

#ifndef DETPROC_VERSION
#define DETPROC_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace detproc;

namespace {

constexpr double pi = std::numbers::pi;
constexpr long kCheckpointEvery = 10000;

// ---------------------------------------------------------------- parsing

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos == 0 || pos != s.size() || !std::isfinite(v)) throw ParameterError(what + ": '" + s + "' is not a number");
  return v;
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> v;
  for (const auto& t : split(s, ','))
    if (!t.empty()) v.push_back(to_double(t, what));
  if (v.empty()) throw ParameterError(what + ": empty list");
  return v;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
  std::vector<int> v;
  for (double d : parse_list(s, what)) {
    if (d != std::floor(d) || std::abs(d) > 1e9) throw ParameterError(what + ": expected integers");
    v.push_back(static_cast<int>(d));
  }
  return v;
}

// "lo:hi:step" or a comma list
std::vector<double> parse_grid(const std::string& s, const std::string& what) {
  if (s.find(':') == std::string::npos) return parse_list(s, what);
  const auto p = split(s, ':');
  if (p.size() != 3) throw ParameterError(what + ": expected lo:hi:step");
  const double lo = to_double(p[0], what), hi = to_double(p[1], what), step = to_double(p[2], what);
  if (!(step > 0.0) || hi < lo) throw ParameterError(what + ": need step > 0 and hi >= lo");
  const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (n > 10000000) throw ParameterError(what + ": grid too large");
  std::vector<double> v;
  for (long i = 0; i < n; ++i) v.push_back(lo + static_cast<double>(i) * step);
  return v;
}

// "a,b;c,d"
dpp::Domain parse_domain(const std::string& s, const std::string& what) {
  dpp::Domain d;
  for (const auto& iv : split(s, ';')) {
    if (iv.empty()) continue;
    const auto v = parse_list(iv, what);
    if (v.size() != 2 || !(v[1] >= v[0])) throw ParameterError(what + ": each interval is lo,hi with hi >= lo");
    d.push_back({v[0], v[1]});
  }
  if (d.empty()) throw ParameterError(what + ": no intervals");
  return d;
}

// ---------------------------------------------------------------- run context

struct Common {
  std::string seed;
  std::string output;
  std::string format;
  std::string manifest;
  int threads = 0;
};

struct Run {
  std::string command;
  json parameters = json::object();
  std::optional<std::uint64_t> seed;
  std::vector<std::string> artifacts;
  json summary;
};

std::uint64_t parse_seed(const std::string& s) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos, 0);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size() || s.front() == '-') throw ParameterError("seed: '" + s + "' is not a 64-bit unsigned integer");
  return v;
}

std::uint64_t require_seed(const Common& c, Run& run) {
  if (!c.seed.empty()) return *(run.seed = parse_seed(c.seed));
  if (const char* env = std::getenv("DETPROC_SEED"); env && *env) return *(run.seed = parse_seed(env));
  throw ParameterError(run.command + " is stochastic: give --seed or set DETPROC_SEED");
}

std::string resolve_format(const Common& c, const std::string& dflt, std::initializer_list<const char*> allowed) {
  const std::string f = c.format.empty() ? dflt : c.format;
  for (const char* a : allowed)
    if (f == a) return f;
  throw ParameterError("--format " + f + " is not supported by this command");
}

// Writes to the output file, or stdout when no output was given.
class Sink {
 public:
  Sink(const std::string& path, Run& run) {
    if (path.empty()) return;
    file_.open(path, std::ios::binary);
    if (!file_) throw Error("io", "cannot open output file " + path);
    run.artifacts.push_back(path);
  }
  std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

kernels::KernelSpec make_spec(const std::string& family, int N, double nu, const std::string& xi,
                              const std::string& drift, int drift_N) {
  kernels::KernelSpec spec;
  spec.family = kernels::parse_family(family);
  if (N > 0) spec.N = N;
  if (!std::isnan(nu)) spec.nu = nu;
  if (!xi.empty()) spec.xi = Configuration::from_points(parse_list(xi, "--xi"));
  if (!drift.empty()) {
    if (drift == "semicircle") {
      const int n = drift_N > 0 ? drift_N : (N > 0 ? N : 0);
      if (n < 1) throw ParameterError("--drift semicircle needs --drift-N (or --N)");
      spec.drift = kernels::semicircle_drift(n);
    } else if (drift == "zero") {
      spec.drift = kernels::zero_drift();
    } else {
      throw ParameterError("--drift must be semicircle or zero");
    }
  }
  spec.validate();
  return spec;
}

struct KernelOpts {
  std::string family;
  int N = 0;
  double nu = NAN;
  std::string xi, drift;
  int drift_N = 0;
  int config_nodes = 400;
};

void add_kernel_opts(CLI::App* s, KernelOpts& k) {
  s->add_option("--family", k.family, "sine, airy, bessel, hermiteN, laguerreN, config_dyson, config_besq, config_drifted")
      ->required();
  s->add_option("--N", k.N, "number of particles (finite families)");
  s->add_option("--nu", k.nu, "Bessel / Laguerre index");
  s->add_option("--xi", k.xi, "starting configuration for config families, comma separated");
  s->add_option("--drift", k.drift, "config_drifted: semicircle or zero");
  s->add_option("--drift-N", k.drift_N, "N of the semicircle drift profile (default --N)");
  s->add_option("--config-nodes", k.config_nodes, "Gauss-Legendre nodes of the config-kernel line integral");
}

bool timed_family(kernels::Family f) {
  return f != kernels::Family::sine && f != kernels::Family::airy && f != kernels::Family::bessel;
}

// ---------------------------------------------------------------- commands

struct KernelTableOpts {
  KernelOpts k;
  std::string grid, x_grid, y_grid;
  double s = NAN, t = NAN;
};

void cmd_kernel_table(const KernelTableOpts& o, const Common& c, Run& run) {
  const auto spec = make_spec(o.k.family, o.k.N, o.k.nu, o.k.xi, o.k.drift, o.k.drift_N);
  const std::string xs_s = o.x_grid.empty() ? o.grid : o.x_grid, ys_s = o.y_grid.empty() ? o.grid : o.y_grid;
  if (xs_s.empty() || ys_s.empty()) throw ParameterError("kernel-table: give --grid or both --x-grid and --y-grid");
  const auto xs = parse_grid(xs_s, "--x-grid"), ys = parse_grid(ys_s, "--y-grid");
  double s = o.s;
  if (std::isnan(s)) {
    if (timed_family(spec.family)) throw ParameterError("kernel-table: --s is required for this family");
    s = 0.0;
  }
  const double t = std::isnan(o.t) ? s : o.t;
  std::vector<kernels::KernelQuery> q;
  for (double x : xs)
    for (double y : ys) q.push_back({s, x, t, y});
  kernels::ConfigQuad cq;
  cq.n_nodes = o.k.config_nodes;
  const auto fmt = resolve_format(c, "csv", {"csv", "json"});
  Sink out(c.output, run);
  if (fmt == "csv") {
    kernels::write_kernel_table(out.os(), spec, q, cq);
  } else {
    json rows = json::array();
    for (const auto& k : q) rows.push_back({{"s", k.s}, {"x", k.x}, {"t", k.t}, {"y", k.y},
                                            {"value", kernels::evaluate(spec, k.s, k.x, k.t, k.y, cq)}});
    out.os() << json{{"family", kernels::to_string(spec.family)}, {"rows", rows}}.dump(2) << "\n";
  }
  run.summary = {{"rows", q.size()}};
}

struct GapOpts {
  KernelOpts k;
  std::string interval, z = "1";
  int nodes = 64;
  double t = NAN;
};

void cmd_gap_prob(const GapOpts& o, const Common& c, Run& run) {
  const auto spec = make_spec(o.k.family, o.k.N, o.k.nu, o.k.xi, o.k.drift, o.k.drift_N);
  if (o.interval.empty()) throw ParameterError("gap-prob: --interval is required");
  const auto dom = parse_domain(o.interval, "--interval");
  const auto zs = parse_list(o.z, "--z");
  double t = o.t;
  if (std::isnan(t)) {
    if (timed_family(spec.family)) throw ParameterError("gap-prob: --t is required for this family");
    t = 0.0;
  }
  kernels::ConfigQuad cq;
  cq.n_nodes = o.k.config_nodes;
  const auto K = dpp::time_slice(spec, t, cq);
  const auto fmt = resolve_format(c, "csv", {"csv", "json"});
  Sink out(c.output, run);
  json rows = json::array();
  if (fmt == "csv") dpp::write_fredholm_header(out.os());
  for (const auto& iv : dom) {
    const auto op = dpp::nystrom(K, {iv}, o.nodes);
    for (double z : zs) {
      const double det = dpp::fredholm_det(op, z);
      if (fmt == "csv") dpp::write_fredholm_row(out.os(), iv.lo, iv.hi, o.nodes, z, det);
      rows.push_back({{"domain_lo", iv.lo}, {"domain_hi", iv.hi}, {"n_nodes", o.nodes}, {"z", z}, {"det", det}});
    }
  }
  if (fmt == "json") out.os() << json{{"family", kernels::to_string(spec.family)}, {"t", t}, {"rows", rows}}.dump(2) << "\n";
  run.summary = {{"rows", rows}};
}

// Chunked Monte Carlo with a resumable checkpoint: `work(offset, count)`
// returns a JSON record per chunk, stored in order.
std::vector<json> chunked(long total, const std::string& ckpt, const json& key,
                          const std::function<json(long, long)>& work) {
  std::vector<json> done;
  if (!ckpt.empty() && fs::exists(ckpt)) {
    try {
      std::ifstream is(ckpt);
      const auto j = json::parse(is);
      if (j.at("key") == key) done = j.at("chunks").get<std::vector<json>>();
    } catch (const std::exception&) {
      done.clear();  // unreadable checkpoint: start over
    }
  }
  for (long off = static_cast<long>(done.size()) * kCheckpointEvery; off < total; off += kCheckpointEvery) {
    done.push_back(work(off, std::min(kCheckpointEvery, total - off)));
    if (!ckpt.empty()) {
      std::ofstream os(ckpt);
      os << json{{"key", key}, {"chunks", done}}.dump() << "\n";
    }
  }
  if (!ckpt.empty()) fs::remove(ckpt);
  return done;
}

struct MgfOpts {
  int N = 2;
  std::string times = "0.5,1", intervals = "-0.5,0.5;0,1", theta = "0.6,-0.9";
  long replicas = 20000;
  double dt = 1e-3;
  int nodes = 32;
};

void cmd_mgf_check(const MgfOpts& o, const Common& c, Run& run) {
  const auto seed = require_seed(c, run);
  resolve_format(c, "json", {"json"});
  const auto times = parse_list(o.times, "--times");
  const auto dom = parse_domain(o.intervals, "--intervals");
  const auto th = parse_list(o.theta, "--theta");
  if (dom.size() != times.size() || th.size() != times.size())
    throw ParameterError("mgf-check: --times, --intervals and --theta need one entry per time");
  if (o.replicas < 2) throw ParameterError("mgf-check: --replicas must be >= 2");
  std::vector<double> grid = {0.0};
  grid.insert(grid.end(), times.begin(), times.end());
  std::vector<std::function<double(double)>> f;
  std::vector<dpp::TimeSlice> slices;
  for (std::size_t m = 0; m < times.size(); ++m) {
    const auto iv = dom[m];
    const double a = th[m];
    f.push_back([iv, a](double x) { return (x > iv.lo && x < iv.hi) ? a : 0.0; });
    slices.push_back({times[m], {iv}, [a](double) { return std::expm1(a); }});
  }
  const int N = o.N;
  auto K = [N](double s, double x, double t, double y) { return kernels::finite_hermite_kernel(N, s, x, t, y); };
  const auto fd = dpp::multitime_fredholm(K, slices, o.nodes);

  json key = {{"N", N}, {"times", times}, {"intervals", o.intervals}, {"theta", th}, {"dt", o.dt}, {"seed", seed},
              {"replicas", o.replicas}};
  const auto chunks = chunked(o.replicas, c.output.empty() ? "" : c.output + ".ckpt.json", key, [&](long off, long n) {
    dynamics::SimParams p;
    p.replicas = static_cast<int>(n);
    p.first_replica = static_cast<std::uint64_t>(off);
    p.seed = seed;
    p.dt_max = o.dt;
    p.threads = c.threads;
    const auto ens = dynamics::simulate_dyson(N, dynamics::Origin{}, grid, p);
    const auto est = dynamics::empirical_mgf(ens, times, f);
    // sum of squared deviations, recovered from the jackknife error of a mean
    const double m2 = est.std_error * est.std_error * static_cast<double>(n) * static_cast<double>(n - 1);
    return json{{"n", n}, {"mean", est.estimate}, {"m2", m2}};
  });
  // pooled mean and variance (Chan et al.)
  double n = 0, mean = 0, m2 = 0;
  for (const auto& ch : chunks) {
    const double nb = ch["n"], mb = ch["mean"], m2b = ch["m2"];
    const double d = mb - mean, nn = n + nb;
    mean += d * nb / nn;
    m2 += m2b + d * d * n * nb / nn;
    n = nn;
  }
  const double se = std::sqrt(m2 / (n - 1) / n);
  const double z = std::abs(mean - fd.value) / se;
  json res = {{"fredholm", fd.value},
              {"fredholm_coarse", fd.coarse_value},
              {"fredholm_self_convergence", fd.self_convergence},
              {"mc_estimate", mean},
              {"mc_std_error", se},
              {"z_score", z},
              {"within_3_sigma", z <= 3.0},
              {"replicas", o.replicas}};
  if (fd.warning) res["warning"] = *fd.warning;
  Sink out(c.output, run);
  out.os() << res.dump(2) << "\n";
  run.summary = res;
}

struct SampleOpts {
  KernelOpts k;
  double t = NAN;
  std::string domain;
  int nodes = 48, count = 100;
};

void cmd_sample_dpp(const SampleOpts& o, const Common& c, Run& run) {
  const auto seed = require_seed(c, run);
  const auto spec = make_spec(o.k.family, o.k.N, o.k.nu, o.k.xi, o.k.drift, o.k.drift_N);
  if (o.domain.empty()) throw ParameterError("sample-dpp: --domain is required");
  if (o.count < 0) throw ParameterError("sample-dpp: --count must be >= 0");
  const auto dom = parse_domain(o.domain, "--domain");
  double t = o.t;
  if (std::isnan(t)) {
    if (timed_family(spec.family)) throw ParameterError("sample-dpp: --t is required for this family");
    t = 0.0;
  }
  kernels::ConfigQuad cq;
  cq.n_nodes = o.k.config_nodes;
  const auto sd = dpp::decompose(dpp::nystrom(dpp::time_slice(spec, t, cq), dom, o.nodes));
  const auto samples = dpp::sample_many(sd, o.count, seed, c.threads);
  const auto fmt = resolve_format(c, "json", {"csv", "json"});
  Sink out(c.output, run);
  if (fmt == "json") {
    json meta = run.parameters;
    meta["seed"] = seed;
    meta["expected_count"] = sd.eigenvalues.sum();
    dpp::write_samples(out.os(), meta, samples);
  } else {
    out.os() << "sample,x\n";
    for (std::size_t i = 0; i < samples.size(); ++i)
      for (double x : samples[i].expanded()) out.os() << i << ',' << kernels::format_double(x) << '\n';
  }
  double total = 0;
  for (const auto& s : samples) total += static_cast<double>(s.total_mass());
  run.summary = {{"samples", samples.size()}, {"mean_count", samples.empty() ? 0.0 : total / samples.size()},
                 {"expected_count", sd.eigenvalues.sum()}};
}

struct SimOpts {
  std::string model = "dyson", x0 = "origin", times = "0,1", drift = "semicircle";
  int N = 1, replicas = 1;
  double dt = 1e-3, nu = 0.0, gap_factor = 0.1;
};

dynamics::PathEnsemble simulate_chunk(const SimOpts& o, const dynamics::Initial& x0, const std::vector<double>& grid,
                                      const dynamics::SimParams& p) {
  if (o.model == "dyson") return dynamics::simulate_dyson(o.N, x0, grid, p);
  if (o.model == "besq") return dynamics::simulate_besq(o.N, o.nu, x0, grid, p);
  if (o.model == "drifted") {
    const auto d = o.drift == "zero" ? kernels::zero_drift() : kernels::semicircle_drift(o.N);
    if (o.drift != "zero" && o.drift != "semicircle") throw ParameterError("--drift must be semicircle or zero");
    return dynamics::simulate_drifted(o.N, x0, grid, p, d);
  }
  throw ParameterError("--model must be dyson, besq or drifted");
}

void cmd_simulate(const SimOpts& o, const Common& c, Run& run) {
  const auto seed = require_seed(c, run);
  if (c.output.empty()) throw ParameterError("simulate: --output <stem> is required (writes <stem>.bin and <stem>.json)");
  const auto fmt = resolve_format(c, "json", {"csv", "json"});
  const auto grid = parse_grid(o.times, "--times");
  dynamics::Initial x0 = dynamics::Origin{};
  if (o.x0 != "origin") x0 = parse_list(o.x0, "--x0");
  if (o.replicas < 1) throw ParameterError("simulate: --replicas must be >= 1");

  const fs::path ckdir = c.output + ".ckpt";
  const json key = {{"params", run.parameters}, {"seed", seed}};
  std::optional<dynamics::PathEnsemble> all;
  // chunks of 10⁴ replicas; finished chunks are kept on disk until the end
  fs::create_directories(ckdir);
  {
    std::ofstream(ckdir / "key.json.tmp") << key.dump();
    bool same = false;
    if (fs::exists(ckdir / "key.json")) {
      std::ifstream is(ckdir / "key.json");
      try {
        same = json::parse(is) == key;
      } catch (const std::exception&) {
      }
    }
    if (!same)
      for (const auto& e : fs::directory_iterator(ckdir))
        if (e.path().extension() == ".bin") fs::remove(e.path());
    fs::rename(ckdir / "key.json.tmp", ckdir / "key.json");
  }
  for (long off = 0, k = 0; off < o.replicas; off += kCheckpointEvery, ++k) {
    const fs::path chunk = ckdir / ("chunk_" + std::to_string(k));
    dynamics::PathEnsemble e;
    if (fs::exists(chunk.string() + ".bin")) {
      e = dynamics::load_ensemble(chunk.string() + ".bin");
    } else {
      dynamics::SimParams p;
      p.replicas = static_cast<int>(std::min<long>(kCheckpointEvery, o.replicas - off));
      p.first_replica = static_cast<std::uint64_t>(off);
      p.seed = seed;
      p.dt_max = o.dt;
      p.gap_factor = o.gap_factor;
      p.threads = c.threads;
      e = simulate_chunk(o, x0, grid, p);
      dynamics::save_ensemble(e, chunk);
    }
    if (!all) {
      all = std::move(e);
    } else {
      all->positions.insert(all->positions.end(), e.positions.begin(), e.positions.end());
      all->replicas += e.replicas;
      all->rejected_steps += e.rejected_steps;
    }
  }
  dynamics::save_ensemble(*all, c.output);
  fs::remove_all(ckdir);
  run.artifacts.push_back(c.output + ".bin");
  run.artifacts.push_back(c.output + ".json");
  if (fmt == "csv")
    for (std::size_t i = 0; i < all->times(); ++i) {
      const std::string path = c.output + ".t" + std::to_string(i) + ".csv";
      std::ofstream os(path, std::ios::binary);
      if (!os) throw Error("io", "cannot open " + path);
      dynamics::write_slice_csv(os, *all, all->time_grid[i]);
      run.artifacts.push_back(path);
    }
  run.summary = {{"replicas", all->replicas}, {"times", all->times()}, {"violations", all->violations()},
                 {"rejected_steps", all->rejected_steps}};
}

struct ScalingOpts {
  std::string limit = "bulk", N = "10,50,200", convention = "paper";
  double nu = 0.0;
};

void cmd_scaling_check(const ScalingOpts& o, const Common& c, Run& run) {
  resolve_format(c, "json", {"json"});
  const auto map = dynamics::parse_scaling_map(o.limit);
  if (o.convention != "paper" && o.convention != "unit")
    throw ParameterError("--convention must be paper or unit");
  const bool paper = o.convention == "paper";
  const auto Ns = parse_int_list(o.N, "--N");
  json rows = json::array();
  std::vector<double> errs;
  for (int N : Ns) {
    if (N < 1) throw ParameterError("--N entries must be >= 1");
    double t = dynamics::scaling_map({0.0, 0.0}, map, N).t;
    double e = 0.0;
    if (map == dynamics::ScalingMap::bulk) {
      if (!paper) t = N / (pi * pi);
      for (int i = 0; i <= 40; ++i)
        for (int j = 0; j <= 40; ++j) {
          const double x = -2 + 0.1 * i, y = -2 + 0.1 * j;
          e = std::max(e, std::abs(kernels::finite_hermite_kernel(N, t, x, t, y) - kernels::sine_kernel(x, y)));
        }
    } else if (map == dynamics::ScalingMap::hard_edge) {
      if (!paper) t = N / 2.0;
      for (int i = 0; i <= 16; ++i)
        for (int j = 0; j <= 16; ++j) {
          const double x = 0.25 * i, y = 0.25 * j;
          e = std::max(e, std::abs(kernels::finite_laguerre_kernel(N, o.nu, t, x, t, x == y ? x : y) -
                                   kernels::bessel_kernel(o.nu, x, y)));
        }
    } else {
      for (int i = 0; i <= 800; ++i) {
        const double x = -5 + 0.01 * i;
        e = std::max(e, std::abs(kernels::rho_A(N, x) - kernels::airy_density(x)));
      }
    }
    errs.push_back(e);
    rows.push_back({{"N", N}, {"time", t}, {"sup_error", e}});
  }
  bool dec = true;
  for (std::size_t i = 1; i < errs.size(); ++i) dec = dec && errs[i] < errs[i - 1];
  json res = {{"limit", o.limit}, {"convention", o.convention}, {"rows", rows}, {"strictly_decreasing", dec}};
  if (map == dynamics::ScalingMap::hard_edge) res["nu"] = o.nu;
  Sink out(c.output, run);
  out.os() << res.dump(2) << "\n";
  run.summary = {{"strictly_decreasing", dec}, {"sup_errors", errs}};
}

struct AsymOpts {
  std::string N = "100,200,400";
  double theta = pi / 3, window = 0.1;
  int order = 3;
};

void cmd_asymptotics_check(const AsymOpts& o, const Common& c, Run& run) {
  resolve_format(c, "json", {"json"});
  const auto Ns = parse_int_list(o.N, "--N");
  if (!(o.theta > 0 && o.theta < pi / 2)) throw ParameterError("--theta must lie in (0, π/2)");
  json rows = json::array();
  std::vector<double> errs;
  for (int N : Ns) {
    double num = 0, den = 0;
    for (int i = -50; i <= 50; ++i) {
      const double x = std::sqrt(2.0 * (N + 1)) * std::cos(o.theta + o.window * i / 50.0);
      const double ex = specfun::hermite_phi(N, x), ap = specfun::pr_hermite(N, x, o.order).value;
      num += (ap - ex) * (ap - ex);
      den += ex * ex;
    }
    errs.push_back(std::sqrt(num / den));
    rows.push_back({{"N", N}, {"rms_rel_error", errs.back()}});
  }
  json ratios = json::array();
  for (std::size_t i = 1; i < errs.size(); ++i) ratios.push_back(errs[i] / errs[i - 1]);
  double worst = 0;
  for (int i = 0; i <= 9000; ++i) {
    const double x = 5 + 0.005 * i;
    worst = std::max(worst, x * std::abs(kernels::airy_density(-x) - std::sqrt(x) / pi));
  }
  json res = {{"plancherel_rotach", {{"theta", o.theta}, {"window", o.window}, {"order", o.order}, {"rows", rows},
                                     {"successive_ratios", ratios}}},
              {"airy_density", {{"max_x_scaled_error_5_50", worst}, {"rho_Ai_at_5", kernels::airy_density(5.0)}}}};
  Sink out(c.output, run);
  out.os() << res.dump(2) << "\n";
  run.summary = res;
}

struct ConfigOpts {
  std::string xi, xi_file, mode = "Y", kappa = "0.75", m = "4", L_grid;
};

void cmd_config_check(const ConfigOpts& o, const Common& c, Run& run) {
  resolve_format(c, "json", {"json"});
  std::vector<double> pts;
  if (!o.xi_file.empty()) {
    std::ifstream is(o.xi_file);
    if (!is) throw Error("io", "cannot open " + o.xi_file);
    std::string tok;
    while (is >> tok) {
      for (auto& ch : tok)
        if (ch == ',' || ch == '[' || ch == ']') ch = ' ';
      std::istringstream ts(tok);
      std::string v;
      while (ts >> v) pts.push_back(to_double(v, "--xi-file"));
    }
  } else if (!o.xi.empty()) {
    pts = parse_list(o.xi, "--xi");
  } else {
    throw ParameterError("config-check: give --xi or --xi-file");
  }
  configspace::Mode mode;
  if (o.mode == "Y") mode = configspace::Mode::Y;
  else if (o.mode == "Y_plus") mode = configspace::Mode::Y_plus;
  else if (o.mode == "Y_A") mode = configspace::Mode::Y_A;
  else throw ParameterError("--mode must be Y, Y_plus or Y_A");
  const auto kap = parse_list(o.kappa, "--kappa");
  std::vector<long> ms;
  for (int v : parse_int_list(o.m, "--m")) ms.push_back(v);
  configspace::ConditionOptions opt;
  if (!o.L_grid.empty()) opt.L_grid = parse_list(o.L_grid, "--L-grid");
  const auto rep = configspace::check_conditions(Configuration::from_points(pts), kap, ms, mode, opt);
  const auto j = configspace::to_json(rep);
  Sink out(c.output, run);
  out.os() << j.dump(2) << "\n";
  run.summary = j;
}

struct DensityOpts {
  std::string model = "dyson", range;
  int N = 10, replicas = 1000, bins = 20;
  double t = 2.0, t0 = NAN, dt = 2e-3, nu = 0.0;
};

void cmd_density_check(const DensityOpts& o, const Common& c, Run& run) {
  const auto seed = require_seed(c, run);
  const auto fmt = resolve_format(c, "csv", {"csv", "json"});
  if (!(o.t > 0)) throw ParameterError("--t must be > 0");
  const double t0 = std::isnan(o.t0) ? o.t / 10 : o.t0;
  if (!(t0 > 0 && t0 <= o.t)) throw ParameterError("--t0 must lie in (0, t]");
  std::vector<double> grid = {0.0, t0};
  if (o.t > t0) grid.push_back(o.t);
  dynamics::SimParams p;
  p.replicas = o.replicas;
  p.seed = seed;
  p.dt_max = o.dt;
  p.threads = c.threads;
  std::function<double(double)> exact;
  dynamics::PathEnsemble ens;
  double lo, hi;
  if (o.model == "dyson") {
    ens = dynamics::simulate_dyson(o.N, dynamics::Origin{}, grid, p);
    exact = [&](double x) { return kernels::gue_density(o.N, o.t, x); };
    hi = 2 * std::sqrt(o.t * o.N) + 3 * std::sqrt(o.t);
    lo = -hi;
  } else if (o.model == "besq") {
    ens = dynamics::simulate_besq(o.N, o.nu, dynamics::Origin{}, grid, p);
    exact = [&](double x) { return x > 0 ? kernels::finite_laguerre_kernel(o.N, o.nu, o.t, x, o.t, x) : 0.0; };
    lo = 0;
    hi = 2 * o.t * (4 * o.N + 2 * o.nu + 12);
  } else {
    throw ParameterError("--model must be dyson or besq");
  }
  if (!o.range.empty()) {
    const auto r = parse_list(o.range, "--range");
    if (r.size() != 2 || !(r[1] > r[0])) throw ParameterError("--range is lo,hi");
    lo = r[0], hi = r[1];
  }
  const auto h = dynamics::empirical_density(ens, o.t, o.bins, lo, hi);
  double l1 = 0, inside = 0;
  std::vector<double> ex;
  for (int b = 0; b < o.bins; ++b) {
    const double a = h.edges[b], z = h.edges[b + 1];
    const double e = quad::integrate(exact, a, z, 1e-11, 1e-10).value / (z - a);
    ex.push_back(e);
    l1 += std::abs(h.density[b] - e) * (z - a) / o.N;
    inside += e * (z - a) / o.N;
  }
  l1 += std::abs(1 - inside) + h.outside / o.N;
  Sink out(c.output, run);
  if (fmt == "csv") {
    out.os() << "bin_lo,bin_hi,empirical,std_error,exact\n";
    for (int b = 0; b < o.bins; ++b)
      out.os() << kernels::format_double(h.edges[b]) << ',' << kernels::format_double(h.edges[b + 1]) << ','
               << kernels::format_double(h.density[b]) << ',' << kernels::format_double(h.std_error[b]) << ','
               << kernels::format_double(ex[b]) << '\n';
  } else {
    json bins = json::array();
    for (int b = 0; b < o.bins; ++b)
      bins.push_back({{"lo", h.edges[b]}, {"hi", h.edges[b + 1]}, {"empirical", h.density[b]},
                      {"std_error", h.std_error[b]}, {"exact", ex[b]}});
    out.os() << json{{"model", o.model}, {"N", o.N}, {"t", o.t}, {"L1", l1}, {"bins", bins}}.dump(2) << "\n";
  }
  run.summary = {{"L1", l1}, {"violations", ens.violations()}, {"rejected_steps", ens.rejected_steps}};
}

struct VerifyOpts {
  std::string suite = "fast";
  bool inject_fault = false;
};

int cmd_verify(const VerifyOpts& o, const Common& c, Run& run) {
  resolve_format(c, "json", {"json"});
  acceptance::Options opt;
  if (o.suite != "fast" && o.suite != "full") throw ParameterError("--suite must be fast or full");
  opt.full = o.suite == "full";
  opt.inject_fault = o.inject_fault;
  opt.threads = c.threads;
  if (!c.seed.empty() || std::getenv("DETPROC_SEED")) opt.seed = require_seed(c, run);
  run.seed = opt.seed;
  const auto rs = acceptance::run(opt, [](const acceptance::Result& r) {
    std::cout << acceptance::format_line(r) << std::endl;
  });
  const bool ok = acceptance::all_pass(rs);
  std::cout << (ok ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL") << std::endl;
  const auto report = acceptance::to_json(rs, opt);
  if (!c.output.empty()) {
    Sink out(c.output, run);
    out.os() << report.dump(2) << "\n";
  }
  run.summary = {{"all_pass", ok}};
  return ok ? 0 : 4;
}

// ---------------------------------------------------------------- driver

int exit_code(const std::string& kind) {
  if (kind == "numerical" || kind == "capacity" || kind == "sampler_instability" || kind == "simulation") return 3;
  return 2;
}

void print_error(const std::string& command, const std::string& kind, const std::string& msg) {
  std::cerr << json{{"error", {{"command", command}, {"kind", kind}, {"message", msg}}}}.dump() << std::endl;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// The options the user actually gave, as strings, so a manifest can be
// turned back into a command line.
json given_parameters(const CLI::App* sub) {
  json p = json::object();
  static const std::set<std::string> common = {"seed", "output", "format", "manifest", "threads"};
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (opt->count() == 0 || name == "help" || common.count(name)) continue;
    if (opt->get_expected_min() == 0) {
      p[name] = true;
    } else {
      const auto& r = opt->results();
      std::string v;
      for (std::size_t i = 0; i < r.size(); ++i) v += (i ? "," : "") + r[i];
      p[name] = v;
    }
  }
  return p;
}

// --config FILE: rebuild the argument list from a config / manifest JSON.
std::vector<std::string> args_from_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("io", "cannot open config " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const std::exception& e) {
    throw ParameterError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.contains("command") || !j["command"].is_string()) throw ParameterError("config: missing \"command\"");
  std::vector<std::string> a = {j["command"].get<std::string>()};
  const json params = j.value("parameters", json::object());
  for (const auto& [k, v] : params.items()) {
    if (v.is_boolean()) {
      if (v.get<bool>()) a.push_back("--" + k);
    } else {
      a.push_back("--" + k);
      a.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    }
  }
  if (j.contains("seed") && !j["seed"].is_null()) a.insert(a.end(), {"--seed", std::to_string(j["seed"].get<std::uint64_t>())});
  if (j.contains("output_path") && j["output_path"].is_string() && !j["output_path"].get<std::string>().empty())
    a.insert(a.end(), {"--output", j["output_path"].get<std::string>()});
  if (j.contains("format") && j["format"].is_string() && !j["format"].get<std::string>().empty())
    a.insert(a.end(), {"--format", j["format"].get<std::string>()});
  if (j.contains("threads") && j["threads"].is_number_integer())
    a.insert(a.end(), {"--threads", std::to_string(j["threads"].get<int>())});
  return a;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") {
      try {
        auto rebuilt = args_from_config(args[i + 1]);
        args = std::move(rebuilt);
      } catch (const Error& e) {
        print_error("config", e.kind(), e.what());
        return 2;
      }
      break;
    }

  CLI::App app{"detproc: determinantal processes, noncolliding diffusions and their kernels"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DETPROC_VERSION);
  std::string unused_config;
  app.add_option("--config", unused_config, "JSON config or run manifest to replay");

  Common common;
  auto add_common = [&](CLI::App* s, bool stochastic) {
    if (stochastic) s->add_option("--seed", common.seed, "64-bit seed (fallback: DETPROC_SEED)");
    s->add_option("-o,--output", common.output, "artifact path (stdout when omitted)");
    s->add_option("--format", common.format, "csv or json");
    s->add_option("--manifest", common.manifest, "run manifest path (default <output>.manifest.json)");
    s->add_option("--threads", common.threads, "worker threads, 0 = all cores");
  };

  KernelTableOpts kt;
  auto* s_kt = app.add_subcommand("kernel-table", "evaluate a kernel on a grid");
  add_kernel_opts(s_kt, kt.k);
  s_kt->add_option("--grid", kt.grid, "x and y grid, lo:hi:step or a list");
  s_kt->add_option("--x-grid", kt.x_grid);
  s_kt->add_option("--y-grid", kt.y_grid);
  s_kt->add_option("--s", kt.s, "first time");
  s_kt->add_option("--t", kt.t, "second time (default --s)");
  add_common(s_kt, false);

  GapOpts gp;
  auto* s_gp = app.add_subcommand("gap-prob", "Fredholm determinant det(I - zK) on intervals");
  add_kernel_opts(s_gp, gp.k);
  s_gp->add_option("--interval", gp.interval, "lo,hi[;lo,hi...]");
  s_gp->add_option("--nodes", gp.nodes, "Gauss-Legendre nodes per interval");
  s_gp->add_option("--z", gp.z, "one or more z values");
  s_gp->add_option("--t", gp.t, "time of the slice (timed families)");
  add_common(s_gp, false);

  MgfOpts mg;
  auto* s_mg = app.add_subcommand("mgf-check", "multitime Fredholm determinant against Dyson Monte Carlo");
  s_mg->add_option("--N", mg.N);
  s_mg->add_option("--times", mg.times);
  s_mg->add_option("--intervals", mg.intervals, "one interval per time, ';' separated");
  s_mg->add_option("--theta", mg.theta, "f_m = θ_m 1_{interval_m}");
  s_mg->add_option("--replicas", mg.replicas);
  s_mg->add_option("--dt", mg.dt);
  s_mg->add_option("--nodes", mg.nodes);
  add_common(s_mg, true);

  SampleOpts sp;
  auto* s_sp = app.add_subcommand("sample-dpp", "exact samples of a kernel's time slice on a bounded domain");
  add_kernel_opts(s_sp, sp.k);
  s_sp->add_option("--t", sp.t);
  s_sp->add_option("--domain", sp.domain, "lo,hi[;lo,hi...]");
  s_sp->add_option("--nodes", sp.nodes);
  s_sp->add_option("--count", sp.count);
  add_common(s_sp, true);

  SimOpts sm;
  auto* s_sm = app.add_subcommand("simulate", "simulate Dyson, squared Bessel or drifted paths");
  s_sm->add_option("--model", sm.model, "dyson, besq or drifted");
  s_sm->add_option("--N", sm.N);
  s_sm->add_option("--x0", sm.x0, "origin or a comma list");
  s_sm->add_option("--times", sm.times, "grid starting at 0: lo:hi:step or a list");
  s_sm->add_option("--dt", sm.dt);
  s_sm->add_option("--replicas", sm.replicas);
  s_sm->add_option("--nu", sm.nu);
  s_sm->add_option("--drift", sm.drift, "semicircle or zero");
  s_sm->add_option("--gap-factor", sm.gap_factor);
  add_common(s_sm, true);

  ScalingOpts sc;
  auto* s_sc = app.add_subcommand("scaling-check", "finite-N kernels against their scaling limits");
  s_sc->add_option("--limit", sc.limit, "bulk, hard_edge or soft_edge");
  s_sc->add_option("--N", sc.N);
  s_sc->add_option("--nu", sc.nu);
  s_sc->add_option("--convention", sc.convention, "paper (scaling_map times) or unit (N/π², N/2)");
  add_common(s_sc, false);

  AsymOpts as;
  auto* s_as = app.add_subcommand("asymptotics-check", "Plancherel-Rotach and Airy density asymptotics");
  s_as->add_option("--N", as.N);
  s_as->add_option("--theta", as.theta);
  s_as->add_option("--window", as.window);
  s_as->add_option("--order", as.order);
  add_common(s_as, false);

  ConfigOpts cf;
  auto* s_cf = app.add_subcommand("config-check", "conditions C.I / C.II / C.I-A for a configuration");
  s_cf->add_option("--xi", cf.xi);
  s_cf->add_option("--xi-file", cf.xi_file);
  s_cf->add_option("--mode", cf.mode, "Y, Y_plus or Y_A");
  s_cf->add_option("--kappa", cf.kappa);
  s_cf->add_option("--m", cf.m);
  s_cf->add_option("--L-grid", cf.L_grid);
  add_common(s_cf, false);

  DensityOpts dn;
  auto* s_dn = app.add_subcommand("density-check", "simulated one-point density against the kernel diagonal");
  s_dn->add_option("--model", dn.model, "dyson or besq");
  s_dn->add_option("--N", dn.N);
  s_dn->add_option("--t", dn.t);
  s_dn->add_option("--t0", dn.t0, "time of the exact matrix start (default t/10)");
  s_dn->add_option("--replicas", dn.replicas);
  s_dn->add_option("--bins", dn.bins);
  s_dn->add_option("--dt", dn.dt);
  s_dn->add_option("--nu", dn.nu);
  s_dn->add_option("--range", dn.range, "lo,hi");
  add_common(s_dn, true);

  VerifyOpts vf;
  auto* s_vf = app.add_subcommand("verify", "run the acceptance criteria");
  s_vf->add_option("--suite", vf.suite, "fast or full");
  s_vf->add_flag("--inject-fault", vf.inject_fault, "corrupt the oscillator table inside criterion 1");
  add_common(s_vf, true);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error(args.empty() ? "" : args.front(), "parameter", e.what());
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  Run run;
  run.command = sub->get_name();
  run.parameters = given_parameters(sub);
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  int status = 0;
  try {
    if (sub == s_kt) cmd_kernel_table(kt, common, run);
    else if (sub == s_gp) cmd_gap_prob(gp, common, run);
    else if (sub == s_mg) cmd_mgf_check(mg, common, run);
    else if (sub == s_sp) cmd_sample_dpp(sp, common, run);
    else if (sub == s_sm) cmd_simulate(sm, common, run);
    else if (sub == s_sc) cmd_scaling_check(sc, common, run);
    else if (sub == s_as) cmd_asymptotics_check(as, common, run);
    else if (sub == s_cf) cmd_config_check(cf, common, run);
    else if (sub == s_dn) cmd_density_check(dn, common, run);
    else if (sub == s_vf) status = cmd_verify(vf, common, run);
  } catch (const Error& e) {
    print_error(run.command, e.kind(), e.what());
    status = exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    print_error(run.command, "io", e.what());
    status = 2;
  } catch (const std::exception& e) {
    print_error(run.command, "internal", e.what());
    status = 3;
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json manifest = {{"command", run.command},
                   {"parameters", run.parameters},
                   {"seed", run.seed ? json(*run.seed) : json(nullptr)},
                   {"output_path", common.output},
                   {"format", common.format},
                   {"threads", common.threads},
                   {"library_version", DETPROC_VERSION},
                   {"started_utc", started},
                   {"wall_time_seconds", wall},
                   {"exit_status", status},
                   {"artifacts", run.artifacts},
                   {"summary", run.summary}};
  std::string mpath = common.manifest;
  if (mpath.empty()) mpath = common.output.empty() ? "detproc-" + run.command + ".manifest.json" : common.output + ".manifest.json";
  std::ofstream mo(mpath);
  if (mo) {
    mo << manifest.dump(2) << "\n";
  } else {
    print_error(run.command, "io", "cannot write manifest " + mpath);
    if (status == 0) status = 2;
  }
  return status;
}
