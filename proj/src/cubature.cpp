#include "grassrec/cubature.hpp"

#include "grassrec/error.hpp"
#include "grassrec/moments.hpp"
#include "grassrec/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace grassrec {

namespace {

constexpr double kSpectrumTol = 1e-8;
constexpr double kWeightSumTol = 1e-12;
constexpr double kPruneThreshold = 1e-10;

// Visits every nondecreasing index tuple of length t over [0, n).
template <typename F>
void for_each_multiset(int n, int t, F&& f) {
  std::vector<int> idx(t, 0);
  while (true) {
    f(idx);
    int pos = t - 1;
    while (pos >= 0 && idx[pos] == n - 1) --pos;
    if (pos < 0) return;
    ++idx[pos];
    for (int i = pos + 1; i < t; ++i) idx[i] = idx[pos];
  }
}

SymMatrix random_unit_symmetric(int d, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) g(i, j) = g(j, i) = normal(rng);
  return SymMatrix(g / g.norm());
}

Eigen::VectorXd random_unit_vector(int d, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x(i) = normal(rng);
  return x / x.norm();
}

void check_strength_degree(int t) {
  if (t < 1) throw InvalidArgument("strength must be >= 1");
  if (t > 3)
    throw UnsupportedDegree("strength " + std::to_string(t) +
                            " has no analytic reference for a general spectrum (supported: 1..3)");
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double weighted_power_mean(const WeightedEnsemble& ens, const SymMatrix& x, int t) {
  double acc = 0.0;
  for (std::size_t j = 0; j < ens.size(); ++j) {
    if (ens.weights()[j] == 0.0) continue;
    acc += ens.weights()[j] * std::pow(hs_inner(ens.atoms()[j], x), t);
  }
  return acc;
}

}  // namespace

Eigen::MatrixXd haar_orthogonal(int d, Rng& rng) {
  if (d < 1) throw DimensionError("haar_orthogonal: d must be >= 1");
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const auto r = qr.matrixQR().diagonal();
  for (int i = 0; i < d; ++i)
    if (r(i) < 0) q.col(i) *= -1.0;
  return q;
}

SymMatrix haar_sample(const Spectrum& lambda, Rng& rng) {
  const int d = lambda.dim();
  const int k = lambda.rank();
  const Eigen::MatrixXd o = haar_orthogonal(d, rng);
  const Eigen::Map<const Eigen::VectorXd> vals(lambda.values().data(), k);
  const auto ok = o.leftCols(k);
  return SymMatrix(ok * vals.asDiagonal() * ok.transpose());
}

WeightedEnsemble::WeightedEnsemble(Spectrum lambda, std::vector<SymMatrix> atoms,
                                   std::vector<double> weights)
    : lambda_(std::move(lambda)), atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.empty()) throw InvalidArgument("WeightedEnsemble: needs at least one atom");
  if (atoms_.size() != weights_.size())
    throw InvalidArgument("WeightedEnsemble: atom and weight counts differ");
  const int d = lambda_.dim();
  const Eigen::Map<const Eigen::VectorXd> target(lambda_.values().data(), d);
  for (std::size_t j = 0; j < atoms_.size(); ++j) {
    if (atoms_[j].dim() != d) throw DimensionError("WeightedEnsemble: atom dimension mismatch");
    const auto sd = spectral_decompose(atoms_[j]);
    if ((sd.eigenvalues - target).cwiseAbs().maxCoeff() > kSpectrumTol)
      throw InvalidArgument("WeightedEnsemble: atom " + std::to_string(j) +
                            " does not have the ensemble spectrum");
  }
  long double sum = 0.0L;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw InvalidArgument("WeightedEnsemble: weights must be finite and nonnegative");
    sum += w;
  }
  if (std::abs(static_cast<double>(sum - 1.0L)) > kWeightSumTol)
    throw InvalidArgument("WeightedEnsemble: weights must sum to 1");
  cumulative_.resize(weights_.size());
  std::partial_sum(weights_.begin(), weights_.end(), cumulative_.begin());
}

std::size_t WeightedEnsemble::support_size() const {
  return static_cast<std::size_t>(
      std::count_if(weights_.begin(), weights_.end(), [](double w) { return w > 0.0; }));
}

std::size_t WeightedEnsemble::index_for(double u) const {
  const double target = u * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) {
    // u * total rounded up to the total: take the last atom with mass.
    std::size_t j = weights_.size() - 1;
    while (j > 0 && weights_[j] == 0.0) --j;
    return j;
  }
  return static_cast<std::size_t>(it - cumulative_.begin());
}

WeightedEnsemble haar_ensemble(const Spectrum& lambda, std::size_t n, Rng& rng) {
  if (n == 0) throw InvalidArgument("haar_ensemble: n must be >= 1");
  std::vector<SymMatrix> atoms;
  atoms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) atoms.push_back(haar_sample(lambda, rng));
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  return WeightedEnsemble(lambda, std::move(atoms), std::move(w));
}

std::string to_string(VerifyMode mode) {
  return mode == VerifyMode::exact ? "exact" : "randomized";
}

VerificationReport verify_strength_exact(const WeightedEnsemble& ens, int t, double tol) {
  check_strength_degree(t);
  const int d = ens.dim();
  const int dd = hs_dim(d);
  if (dd > kMaxExactHsDim)
    throw InvalidArgument("verify_strength: exact mode limited to d(d+1)/2 <= " +
                          std::to_string(kMaxExactHsDim) + "; use randomized mode");
  const auto basis = hs_basis(d);
  Eigen::MatrixXd coords(dd, ens.size());
  for (std::size_t j = 0; j < ens.size(); ++j) coords.col(j) = hs_coordinates(ens.atoms()[j]);
  const Eigen::Map<const Eigen::VectorXd> w(ens.weights().data(), ens.size());

  VerificationReport rep{t, VerifyMode::exact, 0.0, 0, false};
  std::vector<SymMatrix> args;
  for_each_multiset(dd, t, [&](const std::vector<int>& idx) {
    Eigen::ArrayXd prod = Eigen::ArrayXd::Ones(ens.size());
    args.clear();
    for (int a : idx) {
      prod *= coords.row(a).transpose().array();
      args.push_back(basis[a]);
    }
    const double empirical = w.dot(prod.matrix());
    const double analytic = cross_moment(ens.spectrum(), args);
    rep.max_residual = std::max(rep.max_residual, std::abs(empirical - analytic));
    ++rep.probes_used;
  });
  rep.passed = rep.max_residual <= tol;
  return rep;
}

VerificationReport verify_strength_randomized(const WeightedEnsemble& ens, int t, double tol,
                                              int n_probes, Rng& rng) {
  check_strength_degree(t);
  if (n_probes < 1) throw InvalidArgument("verify_strength: n_probes must be >= 1");
  VerificationReport rep{t, VerifyMode::randomized, 0.0, n_probes, false};
  for (int p = 0; p < n_probes; ++p) {
    const SymMatrix x = random_unit_symmetric(ens.dim(), rng);
    const double dev = std::abs(weighted_power_mean(ens, x, t) - trace_moment(ens.spectrum(), t, x));
    rep.max_residual = std::max(rep.max_residual, dev);
  }
  rep.passed = rep.max_residual <= tol;
  return rep;
}

VerificationReport verify_strength(const WeightedEnsemble& ens, int t, double tol, VerifyMode mode,
                                   int n_probes, Rng& rng) {
  if (mode == VerifyMode::exact) return verify_strength_exact(ens, t, tol);
  return verify_strength_randomized(ens, t, tol, n_probes, rng);
}

VerificationReport verify_tight_fusion(const WeightedEnsemble& ens, int t, double tol,
                                       int n_probes, Rng& rng) {
  if (t < 1) throw InvalidArgument("verify_tight_fusion: t must be >= 1");
  if (n_probes < 1) throw InvalidArgument("verify_tight_fusion: n_probes must be >= 1");
  const Spectrum& lambda = ens.spectrum();
  const bool projector = lambda.is_projector();
  if (!projector && t > 3)
    throw UnsupportedDegree("verify_tight_fusion: t > 3 needs a 0/1 spectrum");
  VerificationReport rep{t, VerifyMode::randomized, 0.0, n_probes, false};
  for (int p = 0; p < n_probes; ++p) {
    const SymMatrix xx = SymMatrix::outer(random_unit_vector(ens.dim(), rng));
    const double analytic = projector
                                ? rank1_projector_moment(lambda.rank(), lambda.dim(), t, 1.0)
                                : trace_moment(lambda, t, xx);
    rep.max_residual = std::max(rep.max_residual, std::abs(weighted_power_mean(ens, xx, t) - analytic));
  }
  rep.passed = rep.max_residual <= tol;
  return rep;
}

PolDimBounds pol_dim_bounds(int d, int t) {
  if (d < 1 || t < 1) throw InvalidArgument("pol_dim_bounds: need d, t >= 1");
  const std::uint64_t dd = static_cast<std::uint64_t>(d) * (d + 1) / 2;
  return {binomial(dd + t - 1, t), binomial(static_cast<std::uint64_t>(d) + 2 * t - 1, 2 * t)};
}

std::uint64_t required_pool_size(const Spectrum& lambda, int t) {
  const auto b = pol_dim_bounds(lambda.dim(), t);
  return lambda.rank() == 1 ? b.diag_bound : b.full_bound;
}

CubatureResult construct_cubature(const Spectrum& lambda, int t, int pool_size,
                                  double target_residual, Rng& rng) {
  check_strength_degree(t);
  const int d = lambda.dim();
  if (d < t) throw DimensionError("construct_cubature: needs d >= t");
  if (pool_size < 1 || static_cast<std::uint64_t>(pool_size) < required_pool_size(lambda, t))
    throw InvalidArgument("construct_cubature: pool_size must be >= " +
                          std::to_string(required_pool_size(lambda, t)));
  if (!(target_residual > 0.0)) throw InvalidArgument("construct_cubature: target_residual must be > 0");

  std::vector<SymMatrix> pool;
  pool.reserve(pool_size);
  for (int i = 0; i < pool_size; ++i) pool.push_back(haar_sample(lambda, rng));

  // Least squares over all ordered basis tuples of degree s has the kernel
  // form: the Gram entry is <P_i,P_j>^s and the right-hand side is
  // E_Q <P_i,Q>^s = mu^s(D_lambda), the same for every atom. Each degree is
  // scaled by ||P||_F^{-2s} so the blocks carry comparable weight; the extra
  // constant block is the sum-to-one row.
  Eigen::MatrixXd coords(hs_dim(d), pool_size);
  for (int j = 0; j < pool_size; ++j) coords.col(j) = hs_coordinates(pool[j]);
  const Eigen::MatrixXd inner = coords.transpose() * coords;
  const double fro_sq = inner(0, 0);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Ones(pool_size, pool_size);
  double rhs = 1.0;
  Eigen::MatrixXd power = Eigen::MatrixXd::Ones(pool_size, pool_size);
  const SymMatrix dl = lambda.diagonal_matrix();
  for (int s = 1; s <= t; ++s) {
    power = power.cwiseProduct(inner);
    const double scale = std::pow(fro_sq, -s);
    gram += scale * power;
    rhs += scale * trace_moment(lambda, s, dl);
  }
  power.resize(0, 0);

  auto solve_on = [&](const std::vector<int>& cols) {
    const int m = static_cast<int>(cols.size());
    Eigen::MatrixXd g(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) g(a, b) = gram(cols[a], cols[b]);
    return nnls_gram(g, Eigen::VectorXd::Constant(m, rhs), 1e-15).x;
  };

  std::vector<int> all(pool_size);
  std::iota(all.begin(), all.end(), 0);
  Eigen::VectorXd w = solve_on(all);
  std::vector<int> support;
  for (int j = 0; j < pool_size; ++j)
    if (w(j) >= kPruneThreshold) support.push_back(j);
  if (support.empty()) throw CubatureError("construct_cubature: solver returned no support", 1.0);
  const Eigen::VectorXd ws = solve_on(support);

  std::vector<SymMatrix> atoms;
  std::vector<double> weights;
  for (std::size_t a = 0; a < support.size(); ++a)
    if (ws(a) > 0.0) {
      atoms.push_back(pool[support[a]]);
      weights.push_back(ws(a));
    }
  if (atoms.empty()) throw CubatureError("construct_cubature: re-solve returned no support", 1.0);
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& v : weights) v /= total;

  WeightedEnsemble ens(lambda, std::move(atoms), std::move(weights));
  const bool exact = hs_dim(d) <= kMaxExactHsDim;
  VerificationReport rep = exact ? verify_strength_exact(ens, t, target_residual)
                                 : verify_strength_randomized(ens, t, target_residual, 200, rng);
  if (!rep.passed)
    throw CubatureError("construct_cubature: residual " + std::to_string(rep.max_residual) +
                            " above target; enlarge the pool",
                        rep.max_residual);
  const int support_size = static_cast<int>(ens.size());
  return {std::move(ens), rep, pool_size, support_size};
}

std::vector<SymMatrix> draw_iid(const WeightedEnsemble& ens, std::size_t n, Rng& rng) {
  if (n == 0) throw InvalidArgument("draw_iid: n must be >= 1");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<SymMatrix> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(ens.atoms()[ens.index_for(unif(rng))]);
  return out;
}

const Spectrum& AtomSource::spectrum() const {
  return std::visit(
      [](const auto& s) -> const Spectrum& {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, Spectrum>)
          return s;
        else
          return s.spectrum();
      },
      src_);
}

SymMatrix AtomSource::draw(Rng& rng) const {
  if (const auto* lambda = std::get_if<Spectrum>(&src_)) return haar_sample(*lambda, rng);
  const auto& ens = std::get<WeightedEnsemble>(src_);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return ens.atoms()[ens.index_for(unif(rng))];
}

std::vector<SymMatrix> AtomSource::draw(std::size_t n, Rng& rng) const {
  std::vector<SymMatrix> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(draw(rng));
  return out;
}

}  // namespace grassrec
