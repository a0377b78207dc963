#pragma once

#include "grassrec/rng.hpp"
#include "grassrec/sym_matrix.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace grassrec {

/// Haar-distributed orthogonal matrix: QR of a standard Gaussian matrix with
/// the columns of Q sign-corrected so that diag(R) > 0.
Eigen::MatrixXd haar_orthogonal(int d, Rng& rng);

/// O diag(lambda) O^T with O Haar distributed.
SymMatrix haar_sample(const Spectrum& lambda, Rng& rng);

/// Finitely supported probability measure on the orbit of diag(lambda).
class WeightedEnsemble {
 public:
  /// Validates that every atom has spectrum lambda (within 1e-8), that
  /// weights are nonnegative and that they sum to 1 (within 1e-12).
  WeightedEnsemble(Spectrum lambda, std::vector<SymMatrix> atoms, std::vector<double> weights);

  const Spectrum& spectrum() const { return lambda_; }
  int dim() const { return lambda_.dim(); }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<SymMatrix>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t support_size() const;

  /// Index of the atom selected by u in [0, 1) under inverse-CDF sampling.
  std::size_t index_for(double u) const;

 private:
  Spectrum lambda_;
  std::vector<SymMatrix> atoms_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

/// Uniform-weight ensemble of n Haar samples.
WeightedEnsemble haar_ensemble(const Spectrum& lambda, std::size_t n, Rng& rng);

enum class VerifyMode { exact, randomized };

std::string to_string(VerifyMode mode);

struct VerificationReport {
  int claimed_strength = 0;
  VerifyMode mode = VerifyMode::exact;
  double max_residual = 0.0;
  int probes_used = 0;
  bool passed = false;
};

/// Largest d(d+1)/2 for which exact verification is attempted.
inline constexpr int kMaxExactHsDim = 30;

/// Compares the ensemble's degree-t moments with the orbit's. Exact mode
/// checks every multiset of t basis matrices of the symmetric matrices
/// against cross_moment; randomized mode checks <X,P>^t at random
/// unit-Frobenius probes. t must be 1..3.
VerificationReport verify_strength_exact(const WeightedEnsemble& ens, int t, double tol);
VerificationReport verify_strength_randomized(const WeightedEnsemble& ens, int t, double tol,
                                              int n_probes, Rng& rng);
VerificationReport verify_strength(const WeightedEnsemble& ens, int t, double tol, VerifyMode mode,
                                   int n_probes, Rng& rng);

/// Degree-t moment match on rank-one test matrices x x^T with uniform unit x.
/// Any t is accepted for 0/1 spectra; otherwise t must be 1..3.
VerificationReport verify_tight_fusion(const WeightedEnsemble& ens, int t, double tol,
                                       int n_probes, Rng& rng);

struct PolDimBounds {
  std::uint64_t full_bound;  // binom(d(d+1)/2 + t - 1, t)
  std::uint64_t diag_bound;  // binom(d + 2t - 1, 2t)
};

PolDimBounds pol_dim_bounds(int d, int t);

struct CubatureResult {
  WeightedEnsemble ensemble;
  VerificationReport report;
  int pool_size = 0;
  int support_size = 0;
};

/// Builds a finitely supported cubature of strength t by nonnegative moment
/// matching over a pool of Haar atoms, prunes weights below 1e-10, re-solves
/// on the support and re-verifies. Throws CubatureError (carrying the
/// achieved residual) when target_residual is not reached.
CubatureResult construct_cubature(const Spectrum& lambda, int t, int pool_size,
                                  double target_residual, Rng& rng);

/// Minimum pool size accepted by construct_cubature: the diagonal bound for
/// rank-one spectra (where every moment polynomial is a polynomial in x x^T),
/// the full bound otherwise.
std::uint64_t required_pool_size(const Spectrum& lambda, int t);

/// Three times the required size. A random pool only barely above the moment
/// dimension rarely has the target moments inside its convex hull.
inline std::uint64_t default_pool_size(const Spectrum& lambda, int t) {
  return 3 * required_pool_size(lambda, t);
}

std::vector<SymMatrix> draw_iid(const WeightedEnsemble& ens, std::size_t n, Rng& rng);

/// Either the exact orbit measure (Haar) or a finitely supported ensemble.
class AtomSource {
 public:
  static AtomSource haar(Spectrum lambda) { return AtomSource(std::move(lambda)); }
  static AtomSource from_ensemble(WeightedEnsemble ens) { return AtomSource(std::move(ens)); }

  const Spectrum& spectrum() const;
  SymMatrix draw(Rng& rng) const;
  std::vector<SymMatrix> draw(std::size_t n, Rng& rng) const;
  bool is_haar() const { return std::holds_alternative<Spectrum>(src_); }

 private:
  explicit AtomSource(std::variant<Spectrum, WeightedEnsemble> src) : src_(std::move(src)) {}
  std::variant<Spectrum, WeightedEnsemble> src_;
};

}  // namespace grassrec
