#pragma once

#include "grassrec/sym_matrix.hpp"

#include <array>
#include <span>
#include <vector>

namespace grassrec {

/// Closed-form coefficients of the first three trace moments of the
/// orthogonally invariant measure on the orbit of diag(lambda).
///
/// alpha is ordered (1), (1,1), (2), (1,1,1), (2,1), (3). a1 and a2 are the
/// constants of the identity a1 E<P,X>P = X + a2 tr(X) I. Construction rejects
/// constant spectra, for which <P,X> is deterministic and a1 is undefined.
struct MomentCoefficients {
  int d = 0;
  int k = 0;
  std::array<double, 3> s{};  // tr D, tr D^2, tr D^3
  double q1 = 0, q2 = 0, q3 = 0;
  std::array<double, 6> alpha{};
  double a1 = 0, a2 = 0;

  static MomentCoefficients from_spectrum(const Spectrum& lambda);

  double alpha_1() const { return alpha[0]; }
  double alpha_11() const { return alpha[1]; }
  double alpha_2() const { return alpha[2]; }
  double alpha_111() const { return alpha[3]; }
  double alpha_21() const { return alpha[4]; }
  double alpha_3() const { return alpha[5]; }
};

/// E <P, X>^t for P uniform on the orbit, through the zonal-polynomial sum.
/// Requires 1 <= t <= 3 and d >= t.
double trace_moment(const Spectrum& lambda, int t, const SymMatrix& x);

/// E <P,X_1> ... <P,X_t> by polarization of trace_moment.
double cross_moment(const Spectrum& lambda, std::span<const SymMatrix> xs);

/// The same cross-moment through the explicit coefficient expansion.
double coefficient_moment(const MomentCoefficients& coeffs, std::span<const SymMatrix> xs);

/// Rising factorial a (a+1) ... (a+t-1); 1 for t = 0.
double rising_factorial(double a, int t);

/// E <P, x x^T>^t for P a uniformly random rank-k orthogonal projector.
double rank1_projector_moment(int k, int d, int t, double norm_sq);

/// Mixed moment of the Dirichlet(1/2,...,1/2) vector (<P, x_i x_i^T>)_i for
/// rank-one P and an orthonormal basis {x_i}. beta may be shorter than d
/// (missing exponents are zero).
double dirichlet_moment(int d, std::span<const int> beta);

/// E <P, X>^t for rank-one P, any t >= 0, from the eigenvalues of X.
double rank1_general_moment(int d, int t, std::span<const double> eigenvalues);

/// E <P, X> P = (X + a2 tr(X) I) / a1.
SymMatrix expectation_operator(const MomentCoefficients& coeffs, const SymMatrix& x);

/// E <P,X1><P,X2> P in the symmetrized form whose pairing with X3 reproduces
/// the three-argument cross-moment. Requires d >= 3.
SymMatrix second_order_operator(const MomentCoefficients& coeffs, const SymMatrix& x1,
                                const SymMatrix& x2);

/// X - a2 / (1 + a2 d) tr(X) I, the inverse of a1 * expectation_operator.
SymMatrix s_map(const MomentCoefficients& coeffs, const SymMatrix& x);

/// (k t / d)^t, an upper bound for E <P, x x^T>^t with unit x.
double moment_bound(int k, int d, int t);

}  // namespace grassrec
