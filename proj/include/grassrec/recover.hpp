#pragma once

#include "grassrec/cubature.hpp"
#include "grassrec/moments.hpp"
#include "grassrec/rng.hpp"
#include "grassrec/sym_matrix.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace grassrec {

using Record = std::vector<std::pair<std::string, std::string>>;

/// Measurements b_j = <x x^T, P_j> together with the trace constraint
/// tr X = ||x||^2 (the implicit P_0 = I).
struct MeasurementSet {
  std::vector<SymMatrix> matrices;
  std::vector<double> values;
  double trace_value = 0.0;
  int dimension = 0;  // needed when there are no matrices, only the trace

  int dim() const { return matrices.empty() ? dimension : matrices.front().dim(); }
  std::size_t size() const { return matrices.size(); }
};

MeasurementSet measure(const Eigen::VectorXd& x, std::span<const SymMatrix> ps);

struct RecoveryResult {
  SymMatrix x_hat;
  bool converged = false;
  int iterations = 0;
  double feasibility_residual = 0.0;  // max |<X_hat, P_j> - b_j| including the trace row
  double spectral_gap = 0.0;          // top two eigenvalues of X_hat, difference
  Eigen::VectorXd extracted_x;        // sqrt(top eigenvalue) * top eigenvector

  Record to_record() const;
};

/// Alternating projections between the affine constraint set and the PSD
/// cone. The affine projection uses a precomputed orthonormal basis of the
/// constraint row space. Stops once the PSD iterate violates no constraint by
/// more than tol and the affine iterate has no eigenvalue below -tol.
/// relaxation in (0, 2) over-relaxes the affine step; 1 is plain alternation.
/// Throws InfeasibleError when the linear constraints are inconsistent.
RecoveryResult solve_feasibility(const MeasurementSet& m, double tol, int max_iter,
                                 double relaxation = 1.0);

/// Relative recovery error ||X_hat - x x^T||_F / ||x||^2.
double recovery_error(const SymMatrix& x_hat, const Eigen::VectorXd& x);

struct IsometryConstants {
  double alpha = 0.0;       // smallest eigenvalue of the frame form on T_x
  double beta_bound = 0.0;  // k, the largest measurement rank
  double beta_exact = 0.0;  // largest eigenvalue of the frame form on all of H_d
};

/// Sharpest constants in alpha ||X||^2 <= (1/n) sum <X,P_j>^2 <= beta ||X||^2,
/// the lower one over T_x and the upper one over all symmetric matrices.
IsometryConstants isometry_constants(std::span<const SymMatrix> ps, const Eigen::VectorXd& x);

struct GuaranteeVerdict {
  bool holds = false;
  double lhs = 0.0;  // sqrt(beta / alpha)
  double rhs = 0.0;  // (1 - delta) / gamma
  std::string reason;
};

/// sqrt(beta / alpha) < (1 - delta) / gamma, strictly. gamma = 0 makes the
/// right side infinite.
GuaranteeVerdict deterministic_guarantee(double alpha, double beta, double gamma, double delta);

/// X -> (a1 / n) sum_j <X, P_j> P_j.
SymMatrix r_operator(std::span<const SymMatrix> ps, const MomentCoefficients& coeffs,
                     const SymMatrix& x);

/// (s + 1) t k d^{-r}.
double truncation_threshold(double s, int t, int k, int d, double r_rate);

/// r_operator restricted to the atoms with <P_j, u u^T> <= threshold and
/// <P_j, z z^T> <= threshold; the 1/n normalization still counts every atom.
SymMatrix truncated_r_with_threshold(std::span<const SymMatrix> ps, const MomentCoefficients& coeffs,
                                     const Eigen::VectorXd& unit_x, const Eigen::VectorXd& unit_z,
                                     double threshold, const SymMatrix& x);

/// Truncated frame operator for the tangent direction Z = q (z x^T + x z^T).
/// The anchor is normalized internally. Throws when Z = 0.
SymMatrix truncated_r(std::span<const SymMatrix> ps, const MomentCoefficients& coeffs,
                      const TangentAnchor& anchor, const SymMatrix& z, double s, int t,
                      double r_rate, const SymMatrix& x);

struct GolfingParams {
  double c0 = 10.0;
  double s = 0.0;          // <= 0 means s = c0
  int t = 3;               // fusion-frame order used by the truncation events
  double r_rate = 0.0;     // <= 0 means 1 - 2/t
  int batch_size = 0;      // <= 0 means default_batch_size(d, t, r_rate, batch_mult)
  double batch_mult = 1.0;
  int max_repeats = 20;
};

/// ceil(log_{1/B} d) + 2 with B = sqrt(2) / c0. Requires B < 1.
int golfing_depth(double c0, int d);

/// ceil(mult * 3 t d^{2-r} log d).
int default_batch_size(int d, int t, double r_rate, double mult);

struct CertificateReport {
  SymMatrix y = SymMatrix::zeros(1);
  double gamma_measured = 0.0;  // ||Y_T - x x^T||_F
  double delta_measured = 0.0;  // ||Y_{T-perp}||_Op
  bool in_span = false;
  int batches_used = 0;
  int depth = 0;
  int batch_size = 0;
  std::vector<int> repeats;          // redraws per stage
  std::vector<double> q_norms;       // ||Q_0||_F, ..., ||Q_depth||_F
  std::vector<SymMatrix> atoms;      // all atoms of accepted batches, in draw order

  Record to_record() const;
};

/// Golfing construction of an approximate dual certificate for the unit
/// vector x / ||x||. Each stage draws a batch, forms S R_Z Q_{i-1} with the
/// truncated operator and accepts it only when both stage contractions hold;
/// otherwise the batch is redrawn, up to max_repeats times (GolfingError).
CertificateReport golfing_certificate(const Eigen::VectorXd& x, const AtomSource& source,
                                      const GolfingParams& params, Rng& rng);

struct CertificateCheck {
  bool passes = false;
  double gamma_measured = 0.0;
  double delta_measured = 0.0;
  bool in_span = false;
};

/// Measures ||Y_T - x x^T||_F, ||Y_{T-perp}||_Op and membership of Y in
/// span{I, P_j} (least-squares residual <= 1e-8 max(1, ||Y||_F)).
CertificateCheck check_certificate(const SymMatrix& y, const Eigen::VectorXd& x,
                                   std::span<const SymMatrix> ps, double gamma, double delta);

/// Largest numerical rank among the matrices (eigenvalues above 1e-10 of the largest).
int max_rank(std::span<const SymMatrix> ps);

}  // namespace grassrec
