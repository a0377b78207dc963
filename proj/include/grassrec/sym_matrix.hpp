#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace grassrec {

/// Element of the space of real symmetric d x d matrices with the
/// Hilbert-Schmidt inner product. Immutable once built; the constructor
/// symmetrizes and rejects inputs whose asymmetry exceeds 1e-10 relative.
class SymMatrix {
 public:
  explicit SymMatrix(const Eigen::MatrixXd& m);

  static SymMatrix zeros(int d);
  static SymMatrix identity(int d);
  static SymMatrix diagonal(std::span<const double> diag);
  static SymMatrix outer(const Eigen::VectorXd& x);
  /// Entries (i, j) and (j, i) for i <= j, row-major over the upper triangle.
  static SymMatrix from_upper(int d, std::span<const double> upper);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  double trace() const { return m_.trace(); }
  double frobenius_norm() const { return m_.norm(); }
  std::vector<double> upper() const;

  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator*(double c, const SymMatrix& a);
  friend SymMatrix operator*(const SymMatrix& a, double c) { return c * a; }
  friend SymMatrix operator-(const SymMatrix& a) { return -1.0 * a; }

 private:
  struct Trusted {};
  SymMatrix(Eigen::MatrixXd m, Trusted) : m_(std::move(m)) {}
  Eigen::MatrixXd m_;
};

/// Fixed eigenvalue profile 1 >= l_1 >= ... >= l_k > 0 = l_{k+1} = ... = l_d.
class Spectrum {
 public:
  explicit Spectrum(std::vector<double> values);

  static Spectrum projector(int d, int k);
  static Spectrum e1(int d) { return projector(d, 1); }

  int dim() const { return static_cast<int>(values_.size()); }
  int rank() const { return rank_; }
  const std::vector<double>& values() const { return values_; }
  /// True when every entry is exactly 0 or 1 (orthogonal projector orbit).
  bool is_projector() const;
  SymMatrix diagonal_matrix() const { return SymMatrix::diagonal(values_); }

 private:
  std::vector<double> values_;
  int rank_ = 0;
};

/// Base point x of the rank-one tangent space T_x = {x z^T + z x^T}.
class TangentAnchor {
 public:
  explicit TangentAnchor(const Eigen::VectorXd& x);

  int dim() const { return static_cast<int>(x_.size()); }
  const Eigen::VectorXd& x() const { return x_; }
  const Eigen::VectorXd& unit_x() const { return unit_; }
  double norm_sq() const { return norm_sq_; }

 private:
  Eigen::VectorXd x_;
  Eigen::VectorXd unit_;
  double norm_sq_;
};

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;   // nonincreasing
  Eigen::MatrixXd eigenvectors;  // columns match eigenvalues
};

double hs_inner(const SymMatrix& x, const SymMatrix& y);

SpectralDecomposition spectral_decompose(const SymMatrix& x);

/// Frobenius-nearest positive semidefinite matrix.
SymMatrix psd_project(const SymMatrix& x);

/// (tr X, tr X^2, ..., tr X^t_max), from the eigenvalues.
std::vector<double> power_sums(const SymMatrix& x, int t_max);

/// Largest-magnitude eigenvalue.
double operator_norm(const SymMatrix& x);

/// Orthogonal projection onto T_x: P X + X P - <X, P> P with P the projector
/// onto span{x}.
SymMatrix tangent_project(const TangentAnchor& anchor, const SymMatrix& x);

struct TangentFactors {
  double q;
  Eigen::VectorXd z;
};

/// Writes Z in T_x as q (z x^T + x z^T) with unit z, for unit-norm anchors.
TangentFactors tangent_decompose(const TangentAnchor& anchor, const SymMatrix& z);

/// Coordinates of X in the orthonormal basis {E_ii} u {(E_ij + E_ji)/sqrt 2}
/// of the symmetric matrices, so the Hilbert-Schmidt inner product becomes the
/// Euclidean one. Ordering follows the upper triangle row by row.
Eigen::VectorXd hs_coordinates(const SymMatrix& x);
void hs_coordinates(const Eigen::MatrixXd& x, Eigen::Ref<Eigen::VectorXd> out);
SymMatrix from_hs_coordinates(int d, const Eigen::VectorXd& v);

/// The orthonormal basis matrices used by hs_coordinates, in the same order.
std::vector<SymMatrix> hs_basis(int d);

inline int hs_dim(int d) { return d * (d + 1) / 2; }

}  // namespace grassrec
