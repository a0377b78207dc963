#include "grassrec/sym_matrix.hpp"

#include "grassrec/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace grassrec {

namespace {

constexpr double kAsymmetryTol = 1e-10;
const double kSqrt2 = std::sqrt(2.0);

void require_same_dim(const SymMatrix& a, const SymMatrix& b, const char* op) {
  if (a.dim() != b.dim())
    throw DimensionError(std::string(op) + ": dimension mismatch (" + std::to_string(a.dim()) +
                         " vs " + std::to_string(b.dim()) + ")");
}

}  // namespace

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() < 1 || m.rows() != m.cols())
    throw DimensionError("SymMatrix: need a nonempty square matrix");
  if (!m.allFinite()) throw InvalidArgument("SymMatrix: non-finite entry");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kAsymmetryTol * scale)
    throw InvalidArgument("SymMatrix: input not symmetric (max |X - X^T| = " +
                          std::to_string(asym) + ")");
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::zeros(int d) {
  if (d < 1) throw DimensionError("SymMatrix: dimension must be >= 1");
  return SymMatrix(Eigen::MatrixXd::Zero(d, d), Trusted{});
}

SymMatrix SymMatrix::identity(int d) {
  if (d < 1) throw DimensionError("SymMatrix: dimension must be >= 1");
  return SymMatrix(Eigen::MatrixXd::Identity(d, d), Trusted{});
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  if (diag.empty()) throw DimensionError("SymMatrix: dimension must be >= 1");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return SymMatrix(m);
}

SymMatrix SymMatrix::outer(const Eigen::VectorXd& x) {
  if (x.size() < 1) throw DimensionError("SymMatrix: dimension must be >= 1");
  return SymMatrix(x * x.transpose(), Trusted{});
}

SymMatrix SymMatrix::from_upper(int d, std::span<const double> upper) {
  if (d < 1 || upper.size() != static_cast<std::size_t>(hs_dim(d)))
    throw DimensionError("SymMatrix::from_upper: expected " + std::to_string(hs_dim(d)) +
                         " entries");
  Eigen::MatrixXd m(d, d);
  std::size_t idx = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      m(i, j) = upper[idx];
      m(j, i) = upper[idx];
      ++idx;
    }
  if (!m.allFinite()) throw InvalidArgument("SymMatrix: non-finite entry");
  return SymMatrix(std::move(m), Trusted{});
}

std::vector<double> SymMatrix::upper() const {
  std::vector<double> out;
  out.reserve(hs_dim(dim()));
  for (int i = 0; i < dim(); ++i)
    for (int j = i; j < dim(); ++j) out.push_back(m_(i, j));
  return out;
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b, "operator+");
  return SymMatrix(a.m_ + b.m_, SymMatrix::Trusted{});
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b, "operator-");
  return SymMatrix(a.m_ - b.m_, SymMatrix::Trusted{});
}

SymMatrix operator*(double c, const SymMatrix& a) {
  return SymMatrix(c * a.m_, SymMatrix::Trusted{});
}

Spectrum::Spectrum(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DimensionError("Spectrum: dimension must be >= 1");
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidArgument("Spectrum: non-finite value");
  if (values_.front() > 1.0) throw InvalidArgument("Spectrum: largest value exceeds 1");
  if (values_.front() <= 0.0) throw InvalidArgument("Spectrum: largest value must be positive");
  for (std::size_t i = 1; i < values_.size(); ++i)
    if (values_[i] > values_[i - 1]) throw InvalidArgument("Spectrum: values must be nonincreasing");
  if (values_.back() < 0.0) throw InvalidArgument("Spectrum: values must be nonnegative");
  rank_ = static_cast<int>(std::count_if(values_.begin(), values_.end(),
                                         [](double v) { return v > 0.0; }));
}

Spectrum Spectrum::projector(int d, int k) {
  if (d < 1 || k < 1 || k > d)
    throw InvalidArgument("Spectrum::projector: need 1 <= k <= d");
  std::vector<double> v(d, 0.0);
  std::fill_n(v.begin(), k, 1.0);
  return Spectrum(std::move(v));
}

bool Spectrum::is_projector() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

TangentAnchor::TangentAnchor(const Eigen::VectorXd& x) : x_(x) {
  if (x_.size() < 1) throw DimensionError("TangentAnchor: empty vector");
  norm_sq_ = x_.squaredNorm();
  if (!(norm_sq_ > 0.0) || !std::isfinite(norm_sq_))
    throw InvalidArgument("TangentAnchor: anchor vector must be nonzero and finite");
  unit_ = x_ / std::sqrt(norm_sq_);
}

double hs_inner(const SymMatrix& x, const SymMatrix& y) {
  require_same_dim(x, y, "hs_inner");
  return x.matrix().cwiseProduct(y.matrix()).sum();
}

SpectralDecomposition spectral_decompose(const SymMatrix& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(x.matrix());
  if (solver.info() != Eigen::Success || !solver.eigenvalues().allFinite())
    throw NumericalError("spectral_decompose: eigensolver failed to converge");
  // Eigen returns ascending order; flip to nonincreasing.
  return {solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
}

SymMatrix psd_project(const SymMatrix& x) {
  const auto sd = spectral_decompose(x);
  const Eigen::VectorXd clipped = sd.eigenvalues.cwiseMax(0.0);
  return SymMatrix(sd.eigenvectors * clipped.asDiagonal() * sd.eigenvectors.transpose());
}

std::vector<double> power_sums(const SymMatrix& x, int t_max) {
  if (t_max < 1) throw InvalidArgument("power_sums: t_max must be >= 1");
  const auto sd = spectral_decompose(x);
  std::vector<double> out(t_max, 0.0);
  Eigen::ArrayXd pw = Eigen::ArrayXd::Ones(sd.eigenvalues.size());
  for (int i = 0; i < t_max; ++i) {
    pw *= sd.eigenvalues.array();
    out[i] = pw.sum();
  }
  return out;
}

double operator_norm(const SymMatrix& x) {
  const auto sd = spectral_decompose(x);
  return std::max(std::abs(sd.eigenvalues(0)), std::abs(sd.eigenvalues(sd.eigenvalues.size() - 1)));
}

SymMatrix tangent_project(const TangentAnchor& anchor, const SymMatrix& x) {
  if (anchor.dim() != x.dim()) throw DimensionError("tangent_project: dimension mismatch");
  const Eigen::VectorXd& u = anchor.unit_x();
  const Eigen::VectorXd xu = x.matrix() * u;
  const double uxu = u.dot(xu);
  // P X + X P - <X,P> P with P = u u^T.
  Eigen::MatrixXd out = u * xu.transpose() + xu * u.transpose() - uxu * (u * u.transpose());
  return SymMatrix(out);
}

TangentFactors tangent_decompose(const TangentAnchor& anchor, const SymMatrix& z) {
  if (anchor.dim() != z.dim()) throw DimensionError("tangent_decompose: dimension mismatch");
  if (std::abs(anchor.norm_sq() - 1.0) > 1e-12)
    throw InvalidArgument("tangent_decompose: anchor must have unit norm");
  const double zn = z.frobenius_norm();
  if (zn == 0.0) throw InvalidArgument("tangent_decompose: Z = 0 has no factorization");
  if ((z - tangent_project(anchor, z)).frobenius_norm() >= 1e-8 * zn)
    throw InvalidArgument("tangent_decompose: Z does not lie in the tangent space");
  const Eigen::VectorXd& x = anchor.unit_x();
  const Eigen::VectorXd zx = z.matrix() * x;
  const Eigen::VectorXd w = zx - 0.5 * x.dot(zx) * x;
  const double q = w.norm();
  return {q, w / q};
}

void hs_coordinates(const Eigen::MatrixXd& x, Eigen::Ref<Eigen::VectorXd> out) {
  const int d = static_cast<int>(x.rows());
  int idx = 0;
  for (int i = 0; i < d; ++i) {
    out(idx++) = x(i, i);
    for (int j = i + 1; j < d; ++j) out(idx++) = kSqrt2 * x(i, j);
  }
}

Eigen::VectorXd hs_coordinates(const SymMatrix& x) {
  Eigen::VectorXd v(hs_dim(x.dim()));
  hs_coordinates(x.matrix(), v);
  return v;
}

SymMatrix from_hs_coordinates(int d, const Eigen::VectorXd& v) {
  if (v.size() != hs_dim(d)) throw DimensionError("from_hs_coordinates: wrong length");
  Eigen::MatrixXd m(d, d);
  int idx = 0;
  for (int i = 0; i < d; ++i) {
    m(i, i) = v(idx++);
    for (int j = i + 1; j < d; ++j) {
      m(i, j) = m(j, i) = v(idx++) / kSqrt2;
    }
  }
  return SymMatrix(m);
}

std::vector<SymMatrix> hs_basis(int d) {
  std::vector<SymMatrix> basis;
  basis.reserve(hs_dim(d));
  for (int i = 0; i < d; ++i) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(d, d);
    e(i, i) = 1.0;
    basis.emplace_back(e);
    for (int j = i + 1; j < d; ++j) {
      Eigen::MatrixXd f = Eigen::MatrixXd::Zero(d, d);
      f(i, j) = f(j, i) = 1.0 / kSqrt2;
      basis.emplace_back(f);
    }
  }
  return basis;
}

}  // namespace grassrec
