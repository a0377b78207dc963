#include "grassrec/nnls.hpp"

#include "grassrec/error.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace grassrec {

namespace {

// Cholesky factor of gram restricted to an ordered index set, with O(p^2)
// append and delete.
class PassiveCholesky {
 public:
  explicit PassiveCholesky(const Eigen::MatrixXd& gram) : gram_(gram) {}

  int size() const { return static_cast<int>(idx_.size()); }
  const std::vector<int>& indices() const { return idx_; }

  // Returns false (and leaves the factor unchanged) when column j is
  // numerically dependent on the current set.
  bool append(int j) {
    const int p = size();
    if (p == cap_) grow();
    Eigen::VectorXd col(p);
    for (int i = 0; i < p; ++i) col(i) = gram_(idx_[i], j);
    if (p > 0) l_.topLeftCorner(p, p).triangularView<Eigen::Lower>().solveInPlace(col);
    const double diag_sq = gram_(j, j) - col.squaredNorm();
    if (!(diag_sq > 1e-13 * gram_(j, j))) return false;
    l_.row(p).head(p) = col.transpose();
    l_(p, p) = std::sqrt(diag_sq);
    idx_.push_back(j);
    return true;
  }

  void remove_at(int pos) {
    const int p = size();
    for (int r = pos; r < p - 1; ++r) l_.row(r).head(p) = l_.row(r + 1).head(p);
    // Rows pos..p-2 now carry one superdiagonal entry; rotate it away.
    for (int r = pos; r < p - 1; ++r) {
      const double a = l_(r, r), b = l_(r, r + 1);
      const double rho = std::hypot(a, b);
      const double c = a / rho, s = b / rho;
      for (int i = r; i < p - 1; ++i) {
        const double u = l_(i, r), v = l_(i, r + 1);
        l_(i, r) = c * u + s * v;
        l_(i, r + 1) = -s * u + c * v;
      }
      if (l_(r, r) < 0) l_.col(r).segment(r, p - 1 - r) *= -1.0;
    }
    for (int i = 0; i < p; ++i) l_(i, p - 1) = 0.0;
    idx_.erase(idx_.begin() + pos);
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& h) const {
    const int p = size();
    Eigen::VectorXd rhs(p);
    for (int i = 0; i < p; ++i) rhs(i) = h(idx_[i]);
    const auto lower = l_.topLeftCorner(p, p).triangularView<Eigen::Lower>();
    lower.solveInPlace(rhs);
    lower.transpose().solveInPlace(rhs);
    return rhs;
  }

 private:
  void grow() {
    const int next = std::max(16, 2 * cap_);
    Eigen::MatrixXd bigger = Eigen::MatrixXd::Zero(next, next);
    bigger.topLeftCorner(cap_, cap_) = l_;
    l_.swap(bigger);
    cap_ = next;
  }

  const Eigen::MatrixXd& gram_;
  Eigen::MatrixXd l_;
  int cap_ = 0;
  std::vector<int> idx_;
};

}  // namespace

NnlsResult nnls_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& h, double tol,
                     int max_iter) {
  const int n = static_cast<int>(gram.rows());
  if (gram.cols() != n || h.size() != n) throw DimensionError("nnls_gram: shape mismatch");
  if (max_iter < 0) max_iter = 3 * n + 100;
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double gtol = tol * scale;

  NnlsResult res;
  res.x = Eigen::VectorXd::Zero(n);
  PassiveCholesky chol(gram);
  std::vector<char> passive(n, 0), blocked(n, 0);

  auto gradient = [&]() {
    Eigen::VectorXd w = h;
    for (int i : chol.indices()) w -= gram.col(i) * res.x(i);
    return w;
  };

  Eigen::VectorXd w = gradient();
  while (res.iterations < max_iter) {
    int best = -1;
    double best_w = gtol;
    for (int j = 0; j < n; ++j)
      if (!passive[j] && !blocked[j] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    if (best < 0) {
      res.converged = true;
      break;
    }
    ++res.iterations;
    if (!chol.append(best)) {
      blocked[best] = 1;
      continue;
    }
    passive[best] = 1;

    // Inner loop: step toward the unconstrained passive solution until it is
    // strictly feasible, dropping variables that hit zero.
    while (true) {
      Eigen::VectorXd s = chol.solve(h);
      const auto& idx = chol.indices();
      double alpha = std::numeric_limits<double>::infinity();
      int blocking = -1;
      for (int i = 0; i < chol.size(); ++i)
        if (s(i) <= 0.0) {
          const double xi = res.x(idx[i]);
          const double step = xi / (xi - s(i));
          if (step < alpha) {
            alpha = step;
            blocking = i;
          }
        }
      if (blocking < 0) {
        for (int i = 0; i < chol.size(); ++i) res.x(idx[i]) = s(i);
        break;
      }
      for (int i = 0; i < chol.size(); ++i) res.x(idx[i]) += alpha * (s(i) - res.x(idx[i]));
      res.x(idx[blocking]) = 0.0;
      for (int i = chol.size() - 1; i >= 0; --i) {
        const int j = chol.indices()[i];
        if (res.x(j) <= 0.0) {
          res.x(j) = 0.0;
          passive[j] = 0;
          chol.remove_at(i);
        }
      }
      if (chol.size() == 0) break;
      if (++res.iterations >= max_iter) break;
    }
    // A removal can make a previously dependent column admissible again.
    std::fill(blocked.begin(), blocked.end(), 0);
    w = gradient();
  }
  return res;
}

NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tol, int max_iter) {
  if (a.rows() != b.size()) throw DimensionError("nnls: shape mismatch");
  const Eigen::MatrixXd gram = a.transpose() * a;
  const Eigen::VectorXd h = a.transpose() * b;
  return nnls_gram(gram, h, tol, max_iter);
}

}  // namespace grassrec
