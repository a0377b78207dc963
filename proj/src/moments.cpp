#include "grassrec/moments.hpp"

#include "grassrec/error.hpp"
#include "grassrec/zonal.hpp"

#include <cmath>
#include <string>

namespace grassrec {

namespace {

void check_degree(int t, int d) {
  if (t < 1) throw InvalidArgument("moment degree must be >= 1");
  if (t > 3)
    throw UnsupportedDegree("moment degree " + std::to_string(t) +
                            " has no closed form for a general spectrum (supported: 1..3)");
  if (d < t)
    throw DimensionError("degree-" + std::to_string(t) + " moments need d >= " +
                         std::to_string(t) + " (got d = " + std::to_string(d) + ")");
}

std::array<double, 3> spectrum_power_sums(const Spectrum& lambda) {
  std::array<double, 3> s{};
  for (double v : lambda.values()) {
    s[0] += v;
    s[1] += v * v;
    s[2] += v * v * v;
  }
  return s;
}

void check_args(int d, std::span<const SymMatrix> xs) {
  if (xs.empty()) throw InvalidArgument("cross moment needs at least one argument");
  for (const auto& x : xs)
    if (x.dim() != d) throw DimensionError("cross moment: argument dimension mismatch");
}

}  // namespace

MomentCoefficients MomentCoefficients::from_spectrum(const Spectrum& lambda) {
  MomentCoefficients c;
  const double d = lambda.dim();
  c.d = lambda.dim();
  c.k = lambda.rank();
  c.s = spectrum_power_sums(lambda);
  const double s1 = c.s[0], s2 = c.s[1], s3 = c.s[2];
  c.q1 = d;
  c.q2 = (d - 1) * d * (d + 2);
  c.q3 = (d - 2) * (d - 1) * d * (d + 2) * (d + 4);
  c.alpha[0] = s1;
  c.alpha[1] = (d + 1) * s1 * s1 - 2 * s2;
  c.alpha[2] = -2 * s1 * s1 + 2 * d * s2;
  c.alpha[3] = (d * d + 3 * d - 2) * s1 * s1 * s1 - 6 * (d + 2) * s1 * s2 + 16 * s3;
  c.alpha[4] = -6 * (d + 2) * s1 * s1 * s1 + 6 * (d * d + 2 * d + 4) * s1 * s2 - 24 * d * s3;
  c.alpha[5] = 16 * s1 * s1 * s1 - 24 * d * s1 * s2 + 8 * d * d * s3;
  // d s2 - s1^2 = d * sum (l_i - mean)^2, zero exactly for constant spectra.
  double spread = 0.0;
  for (double v : lambda.values()) spread += (v - s1 / d) * (v - s1 / d);
  if (!(spread > 1e-14 * s2))
    throw InvalidArgument("MomentCoefficients: constant spectrum (<P,X> is deterministic, a1 undefined)");
  c.a1 = c.q2 / c.alpha[2];
  c.a2 = c.alpha[1] / c.alpha[2];
  return c;
}

double trace_moment(const Spectrum& lambda, int t, const SymMatrix& x) {
  const int d = lambda.dim();
  if (x.dim() != d) throw DimensionError("trace_moment: dimension mismatch");
  check_degree(t, d);
  const auto sx = power_sums(x, t);
  const auto sd = spectrum_power_sums(lambda);
  const std::array<double, 3> si{double(d), double(d), double(d)};
  double total = 0.0;
  for (const auto& pi : partitions(t, d)) {
    total += zonal_from_power_sums(pi, sx) * zonal_from_power_sums(pi, sd) /
             zonal_from_power_sums(pi, si);
  }
  return total;
}

double cross_moment(const Spectrum& lambda, std::span<const SymMatrix> xs) {
  const int d = lambda.dim();
  check_args(d, xs);
  const int t = static_cast<int>(xs.size());
  check_degree(t, d);
  double total = 0.0;
  for (unsigned mask = 1; mask < (1u << t); ++mask) {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
    int count = 0;
    for (int j = 0; j < t; ++j)
      if (mask & (1u << j)) {
        sum += xs[j].matrix();
        ++count;
      }
    const double sign = ((t + count) % 2 == 0) ? 1.0 : -1.0;
    total += sign * trace_moment(lambda, t, SymMatrix(sum));
  }
  double fact = 1.0;
  for (int i = 2; i <= t; ++i) fact *= i;
  return total / fact;
}

double coefficient_moment(const MomentCoefficients& c, std::span<const SymMatrix> xs) {
  check_args(c.d, xs);
  const int t = static_cast<int>(xs.size());
  check_degree(t, c.d);
  const Eigen::MatrixXd& x1 = xs[0].matrix();
  if (t == 1) return c.alpha_1() * x1.trace() / c.q1;
  const Eigen::MatrixXd& x2 = xs[1].matrix();
  const double t1 = x1.trace(), t2 = x2.trace();
  const double t12 = x1.cwiseProduct(x2).sum();
  if (t == 2) return (c.alpha_11() * t1 * t2 + c.alpha_2() * t12) / c.q2;
  const Eigen::MatrixXd& x3 = xs[2].matrix();
  const double t3 = x3.trace();
  const double t13 = x1.cwiseProduct(x3).sum();
  const double t23 = x2.cwiseProduct(x3).sum();
  const double t123 = (x1 * x2).cwiseProduct(x3).sum();
  return (c.alpha_111() * t1 * t2 * t3 +
          c.alpha_21() / 3.0 * (t1 * t23 + t2 * t13 + t3 * t12) +
          c.alpha_3() * t123) /
         c.q3;
}

double rising_factorial(double a, int t) {
  if (t < 0) throw InvalidArgument("rising_factorial: t must be >= 0");
  double r = 1.0;
  for (int i = 0; i < t; ++i) r *= a + i;
  return r;
}

double rank1_projector_moment(int k, int d, int t, double norm_sq) {
  if (d < 1 || k < 1) throw InvalidArgument("rank1_projector_moment: need d, k >= 1");
  if (k > d) throw InvalidArgument("rank1_projector_moment: rank k exceeds dimension d");
  if (t < 0) throw InvalidArgument("rank1_projector_moment: t must be >= 0");
  return rising_factorial(k / 2.0, t) / rising_factorial(d / 2.0, t) * std::pow(norm_sq, t);
}

double dirichlet_moment(int d, std::span<const int> beta) {
  if (static_cast<int>(beta.size()) > d)
    throw DimensionError("dirichlet_moment: multi-index longer than d");
  int total = 0;
  double num = 1.0;
  for (int b : beta) {
    if (b < 0) throw InvalidArgument("dirichlet_moment: negative exponent");
    num *= rising_factorial(0.5, b);
    total += b;
  }
  return num / rising_factorial(d / 2.0, total);
}

double rank1_general_moment(int d, int t, std::span<const double> eigenvalues) {
  if (static_cast<int>(eigenvalues.size()) != d)
    throw DimensionError("rank1_general_moment: need d eigenvalues");
  if (t < 0) throw InvalidArgument("rank1_general_moment: t must be >= 0");
  // sum_{|beta|=t} t!/beta! prod_i a_i^beta_i (1/2)_beta_i / (d/2)_t, done as a
  // product of per-eigenvalue series truncated at degree t.
  std::vector<double> acc(t + 1, 0.0);
  acc[0] = 1.0;
  std::vector<double> term(t + 1);
  for (double a : eigenvalues) {
    term[0] = 1.0;
    for (int m = 1; m <= t; ++m) term[m] = term[m - 1] * a * (0.5 + m - 1) / m;
    std::vector<double> next(t + 1, 0.0);
    for (int i = 0; i <= t; ++i)
      for (int j = 0; i + j <= t; ++j) next[i + j] += acc[i] * term[j];
    acc.swap(next);
  }
  double fact = 1.0;
  for (int i = 2; i <= t; ++i) fact *= i;
  return fact * acc[t] / rising_factorial(d / 2.0, t);
}

SymMatrix expectation_operator(const MomentCoefficients& c, const SymMatrix& x) {
  if (x.dim() != c.d) throw DimensionError("expectation_operator: dimension mismatch");
  if (c.d < 2) throw DimensionError("expectation_operator: needs d >= 2");
  return (1.0 / c.a1) * (x + c.a2 * x.trace() * SymMatrix::identity(c.d));
}

SymMatrix second_order_operator(const MomentCoefficients& c, const SymMatrix& x1,
                                const SymMatrix& x2) {
  if (x1.dim() != c.d || x2.dim() != c.d)
    throw DimensionError("second_order_operator: dimension mismatch");
  if (c.d < 3) throw DimensionError("second_order_operator: needs d >= 3");
  const Eigen::MatrixXd& m1 = x1.matrix();
  const Eigen::MatrixXd& m2 = x2.matrix();
  const double t1 = m1.trace(), t2 = m2.trace();
  const double t12 = m1.cwiseProduct(m2).sum();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(c.d, c.d);
  Eigen::MatrixXd out = c.alpha_111() * t1 * t2 * id +
                        c.alpha_21() / 3.0 * (t1 * m2 + t2 * m1 + t12 * id) +
                        c.alpha_3() / 2.0 * (m1 * m2 + m2 * m1);
  return SymMatrix(out / c.q3);
}

SymMatrix s_map(const MomentCoefficients& c, const SymMatrix& x) {
  if (x.dim() != c.d) throw DimensionError("s_map: dimension mismatch");
  if (c.d < 2) throw DimensionError("s_map: needs d >= 2");
  return x - (c.a2 / (1.0 + c.a2 * c.d) * x.trace()) * SymMatrix::identity(c.d);
}

double moment_bound(int k, int d, int t) {
  if (k < 1 || k > d) throw InvalidArgument("moment_bound: need 1 <= k <= d");
  if (t < 1) throw InvalidArgument("moment_bound: t must be >= 1");
  return std::pow(static_cast<double>(k) * t / d, t);
}

}  // namespace grassrec
