#include "detproc/dpp/dpp.hpp"

#include <cmath>
#include <istream>
#include <random>
#include <sstream>

#include "detproc/error.hpp"
#include "detproc/parallel.hpp"
#include "detproc/quadrature.hpp"

namespace detproc::dpp {
namespace {

struct Grid {
  Eigen::VectorXd nodes, weights;
};

Grid gl_grid(const Domain& domain, int n) {
  std::vector<double> x, w;
  for (const auto& iv : domain) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi)) throw DomainError("domain must be bounded");
    if (iv.length() <= 0.0) continue;
    const auto r = quad::gauss_legendre(n, iv.lo, iv.hi);
    x.insert(x.end(), r.nodes.begin(), r.nodes.end());
    w.insert(w.end(), r.weights.begin(), r.weights.end());
  }
  Grid g;
  g.nodes = Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  g.weights = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  return g;
}

double call_kernel(const StaticKernel& K, double x, double y) {
  try {
    return K(x, y);
  } catch (const Error& e) {
    std::ostringstream os;
    os.precision(17);
    os << e.what() << " [at kernel node (" << x << ", " << y << ")]";
    throw Error(e.kind(), os.str());
  }
}

double domain_length(const Domain& d) {
  double L = 0.0;
  for (const auto& iv : d) L += iv.length();
  return L;
}

double uniform_on(const Domain& d, double total, SplitMix64& rng) {
  std::uniform_real_distribution<double> U(0.0, total);
  double u = U(rng);
  for (const auto& iv : d) {
    const double len = iv.length();
    if (u < len) return iv.lo + u;
    u -= len;
  }
  // rounding at the far end
  for (auto it = d.rbegin(); it != d.rend(); ++it)
    if (it->length() > 0.0) return it->hi;
  return 0.0;
}

// Columns of C made orthonormal again by modified Gram–Schmidt.
void mgs(Eigen::MatrixXd& C) {
  for (Eigen::Index j = 0; j < C.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) C.col(j) -= C.col(i).dot(C.col(j)) * C.col(i);
    C.col(j).normalize();
  }
}

}  // namespace

StaticKernel time_slice(const kernels::KernelSpec& spec, double t, const kernels::ConfigQuad& q) {
  spec.validate();
  return [spec, t, q](double x, double y) { return kernels::evaluate(spec, t, x, t, y, q); };
}

Eigen::MatrixXd DiscretizedOperator::symmetric_form() const {
  const Eigen::VectorXd s = weights.cwiseSqrt();
  return s.asDiagonal() * kmat * s.asDiagonal();
}

double DiscretizedOperator::trace() const { return kmat.diagonal().dot(weights); }

DiscretizedOperator nystrom(StaticKernel K, const Domain& domain, int n_nodes) {
  if (n_nodes < 4) throw ParameterError("nystrom: n_nodes must be >= 4");
  DiscretizedOperator op;
  auto g = gl_grid(domain, n_nodes);
  op.nodes = std::move(g.nodes);
  op.weights = std::move(g.weights);
  op.domain = domain;
  const Eigen::Index n = op.nodes.size();
  Eigen::MatrixXd A(n, n);
  parallel_for(n, 0, [&](long i) {
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = call_kernel(K, op.nodes[i], op.nodes[j]);
  });
  op.kmat = 0.5 * (A + A.transpose());
  op.kernel = std::move(K);
  return op;
}

Eigen::VectorXd operator_spectrum(const DiscretizedOperator& op) {
  if (op.size() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.symmetric_form(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double fredholm_det(const DiscretizedOperator& op, double z) {
  if (!op.kmat.allFinite()) throw NumericalError("fredholm_det: kernel matrix has non-finite entries");
  if (z == 0.0 || op.size() == 0) return 1.0;
  const Eigen::VectorXd lam = operator_spectrum(op);
  double d = 1.0;
  for (double l : lam) d *= 1.0 - z * l;
  return d;
}

double correlation_fn(const StaticKernel& K, std::span<const double> points) {
  if (points.empty()) throw ParameterError("correlation_fn: need at least one point");
  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd A(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) A(i, j) = call_kernel(K, points[i], points[j]);
  return A.determinant();
}

namespace {

double block_det(const ExtendedKernel& K, std::span<const TimeSlice> slices, int n) {
  std::vector<Grid> grids;
  std::vector<Eigen::VectorXd> chis;
  Eigen::Index total = 0;
  for (const auto& s : slices) {
    grids.push_back(gl_grid(s.support, n));
    Eigen::VectorXd c(grids.back().nodes.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = s.chi(grids.back().nodes[i]);
    if (!c.allFinite()) throw NumericalError("multitime_fredholm: test function is not finite");
    chis.push_back(std::move(c));
    total += grids.back().nodes.size();
  }
  if (total == 0) return 1.0;
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(total, total);
  std::vector<Eigen::Index> off(slices.size() + 1, 0);
  for (std::size_t a = 0; a < slices.size(); ++a) off[a + 1] = off[a] + grids[a].nodes.size();
  const long nblocks = static_cast<long>(slices.size() * slices.size());
  parallel_for(nblocks, 0, [&](long ab) {
    const auto a = static_cast<std::size_t>(ab) / slices.size(), b = static_cast<std::size_t>(ab) % slices.size();
    const auto& ga = grids[a];
    const auto& gb = grids[b];
    for (Eigen::Index i = 0; i < ga.nodes.size(); ++i)
      for (Eigen::Index j = 0; j < gb.nodes.size(); ++j) {
        const double c = chis[b][j];
        if (c == 0.0) continue;
        A(off[a] + i, off[b] + j) += K(slices[a].t, ga.nodes[i], slices[b].t, gb.nodes[j]) * c * gb.weights[j];
      }
  });
  if (!A.allFinite()) throw NumericalError("multitime_fredholm: block matrix has non-finite entries");
  return Eigen::PartialPivLU<Eigen::MatrixXd>(A).determinant();
}

}  // namespace

MultitimeResult multitime_fredholm(const ExtendedKernel& K, std::span<const TimeSlice> slices, int n_nodes,
                                   double tol) {
  if (n_nodes < 4) throw ParameterError("multitime_fredholm: n_nodes must be >= 4");
  for (std::size_t i = 1; i < slices.size(); ++i)
    if (!(slices[i].t > slices[i - 1].t)) throw ParameterError("multitime_fredholm: times must be increasing");
  MultitimeResult r;
  r.value = block_det(K, slices, n_nodes);
  r.coarse_value = block_det(K, slices, n_nodes / 2);
  r.self_convergence = std::abs(r.value - r.coarse_value);
  if (r.self_convergence > tol)
    r.warning = "grid self-convergence " + std::to_string(r.self_convergence) + " exceeds " + std::to_string(tol);
  return r;
}

Eigen::VectorXd SpectralDecomposition::eval(double x, std::span<const Eigen::Index> which) const {
  Eigen::VectorXd kw(nodes.size());
  for (Eigen::Index i = 0; i < nodes.size(); ++i) kw[i] = call_kernel(kernel, x, nodes[i]) * weights[i];
  Eigen::VectorXd out(static_cast<Eigen::Index>(which.size()));
  for (std::size_t k = 0; k < which.size(); ++k)
    out[static_cast<Eigen::Index>(k)] = kw.dot(phi.col(which[k])) / eigenvalues[which[k]];
  return out;
}

SpectralDecomposition decompose(const DiscretizedOperator& op, double tol) {
  SpectralDecomposition sd;
  sd.nodes = op.nodes;
  sd.weights = op.weights;
  sd.domain = op.domain;
  sd.kernel = op.kernel;
  if (op.size() == 0) return sd;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.symmetric_form());
  if (es.info() != Eigen::Success) throw NumericalError("decompose: eigensolver failed");
  const Eigen::VectorXd lam = es.eigenvalues();
  sd.raw_min = lam.minCoeff();
  sd.raw_max = lam.maxCoeff();
  if (sd.raw_min < -tol || sd.raw_max > 1.0 + tol)
    throw NumericalError("decompose: spectrum [" + std::to_string(sd.raw_min) + ", " + std::to_string(sd.raw_max) +
                         "] leaves [0, 1]; the kernel is not a DPP kernel on this domain");
  sd.eigenvalues = lam.cwiseMax(0.0).cwiseMin(1.0);
  sd.phi = op.weights.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors();
  return sd;
}

Configuration sample(const SpectralDecomposition& sd, SplitMix64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Eigen::Index> sel;
  for (Eigen::Index j = 0; j < sd.eigenvalues.size(); ++j)
    if (U(rng) < sd.eigenvalues[j]) sel.push_back(j);
  const auto n = static_cast<Eigen::Index>(sel.size());
  if (n == 0) return {};

  Eigen::MatrixXd nodal(sd.nodes.size(), n);  // selected eigenfunctions at the nodes
  for (Eigen::Index k = 0; k < n; ++k) nodal.col(k) = sd.phi.col(sel[static_cast<std::size_t>(k)]);
  const double total = domain_length(sd.domain);

  Eigen::MatrixXd C = Eigen::MatrixXd::Identity(n, n);
  std::vector<double> points;
  for (Eigen::Index k = n; k >= 1; --k) {
    const double envelope = 1.2 * (nodal * C).rowwise().squaredNorm().maxCoeff() / static_cast<double>(k);
    double env = envelope;
    double x = 0.0;
    Eigen::VectorXd u;
    for (long attempt = 0;; ++attempt) {
      if (attempt > 1000000) throw SamplerInstabilityError("sample: rejection sampler did not accept in 1e6 draws");
      x = uniform_on(sd.domain, total, rng);
      u = C.transpose() * sd.eval(x, sel);
      const double p = u.squaredNorm() / static_cast<double>(k);
      if (!std::isfinite(p) || p < -1e-9) throw SamplerInstabilityError("sample: marginal density is invalid");
      // the nodal maximum can undershoot between nodes; grow the envelope if so
      if (p > env) env = 1.2 * p;
      if (U(rng) * env <= p) break;
    }
    points.push_back(x);
    if (k == 1) break;
    // orthonormal basis of u^⊥ from the Householder reflector taking u to e_1
    Eigen::VectorXd v = u.normalized();
    v[0] += v[0] >= 0 ? 1.0 : -1.0;
    const double beta = 2.0 / v.squaredNorm();
    // C·H with H = I - β v vᵀ, dropping the column along u
    Eigen::MatrixXd next = (C - beta * (C * v) * v.transpose()).rightCols(k - 1);
    mgs(next);
    C = std::move(next);
  }
  return Configuration::from_points(std::move(points));
}

std::vector<Configuration> sample_many(const SpectralDecomposition& sd, int count, std::uint64_t seed, int threads) {
  if (count < 0) throw ParameterError("sample_many: count must be >= 0");
  std::vector<Configuration> out(static_cast<std::size_t>(count));
  parallel_for(count, threads, [&](long r) {
    auto rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(r));
    out[static_cast<std::size_t>(r)] = sample(sd, rng);
  });
  return out;
}

MomentDiagnostic moment_diagnostic(std::span<const Configuration> samples, Interval D, double rho_D, int k) {
  if (k < 1) throw ParameterError("moment_diagnostic: k must be >= 1");
  MomentDiagnostic m;
  m.bound = std::pow(3.0 * rho_D, k);
  if (samples.empty()) return m;
  double s = 0.0, s2 = 0.0;
  for (const auto& c : samples) {
    const double v = std::pow(std::abs(static_cast<double>(c.count_in(D.lo, D.hi)) - rho_D), 2 * k);
    s += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(samples.size());
  m.empirical = s / n;
  if (n > 1) m.std_error = std::sqrt(std::max(0.0, (s2 / n - m.empirical * m.empirical) / (n - 1)));
  return m;
}

std::vector<TailFieldRow> tail_field_diagnostic(const Configuration& xi, const std::function<double(double)>& rho,
                                                Interval support, std::span<const double> L_grid) {
  auto integral = [&](double a, double b, auto&& f) {
    a = std::max(a, support.lo);
    b = std::min(b, support.hi);
    if (!(b > a)) return 0.0;
    return quad::integrate(f, a, b, 1e-12, 1e-10, 4000).value;
  };
  std::vector<TailFieldRow> rows;
  for (double L : L_grid) {
    if (!(L > 0.0)) throw ParameterError("tail_field_diagnostic: L must be > 0");
    TailFieldRow r;
    r.L = L;
    r.count_deviation = std::abs(static_cast<double>(xi.count_in(0.0, L)) - integral(0.0, L, rho));
    auto over_x = [&](double x) { return rho(x) / x; };
    double field = integral(L, support.hi, over_x) + integral(support.lo, -L, over_x);
    const auto pts = xi.points();
    const auto mult = xi.multiplicities();
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (std::abs(pts[i]) >= L) field -= mult[i] / pts[i];
    r.tail_field = field;
    rows.push_back(r);
  }
  return rows;
}

double fit_exponent(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!(y[i] > 0.0) || !(x[i] > 0.0)) continue;
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
    ++n;
  }
  if (n < 2) throw ParameterError("fit_exponent: need two positive points");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void write_samples(std::ostream& os, const nlohmann::json& meta, std::span<const Configuration> samples) {
  os << meta.dump() << '\n';
  for (const auto& c : samples) os << nlohmann::json(c.expanded()).dump() << '\n';
}

std::vector<Configuration> read_samples(std::istream& is, nlohmann::json* meta) {
  std::string line;
  if (!std::getline(is, line)) throw ParameterError("read_samples: missing metadata line");
  try {
    auto m = nlohmann::json::parse(line);
    if (meta) *meta = std::move(m);
    std::vector<Configuration> out;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      out.push_back(Configuration::from_points(nlohmann::json::parse(line).get<std::vector<double>>()));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("read_samples: ") + e.what());
  }
}

void write_fredholm_header(std::ostream& os) { os << "domain_lo,domain_hi,n_nodes,z,det\n"; }

void write_fredholm_row(std::ostream& os, double lo, double hi, int n_nodes, double z, double det) {
  using kernels::format_double;
  os << format_double(lo) << ',' << format_double(hi) << ',' << n_nodes << ',' << format_double(z) << ','
     << format_double(det) << '\n';
}

}  // namespace detproc::dpp
