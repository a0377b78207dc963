#pragma once

#include <Eigen/Dense>

namespace grassrec {

struct NnlsResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = false;
};

/// Lawson-Hanson active-set solver in normal-equation form:
///   minimize 1/2 x^T G x - h^T x  subject to  x >= 0,
/// where G = A^T A is supplied directly (so A never has to be materialized).
/// The passive-set system is kept as an incrementally updated Cholesky factor.
/// Stops when every free gradient entry is <= tol * max(1, max|h|).
NnlsResult nnls_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& h, double tol = 1e-12,
                     int max_iter = -1);

/// Convenience wrapper: minimize ||A x - b|| subject to x >= 0.
NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tol = 1e-12,
                int max_iter = -1);

}  // namespace grassrec
