#include "helpers.hpp"

#include "grassrec/error.hpp"
#include "grassrec/zonal.hpp"

#include <doctest.h>

#include <cmath>

using namespace grassrec;

namespace {

// Monomial symmetric functions of the eigenvalues, summed over distinct indices.
double m2(const Eigen::VectorXd& a) { return a.array().square().sum(); }
double m11(const Eigen::VectorXd& a) {
  double s = 0;
  for (int i = 0; i < a.size(); ++i)
    for (int j = i + 1; j < a.size(); ++j) s += a(i) * a(j);
  return s;
}
double m3(const Eigen::VectorXd& a) { return a.array().cube().sum(); }
double m21(const Eigen::VectorXd& a) {
  double s = 0;
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < a.size(); ++j)
      if (i != j) s += a(i) * a(i) * a(j);
  return s;
}
double m111(const Eigen::VectorXd& a) {
  double s = 0;
  for (int i = 0; i < a.size(); ++i)
    for (int j = i + 1; j < a.size(); ++j)
      for (int k = j + 1; k < a.size(); ++k) s += a(i) * a(j) * a(k);
  return s;
}

}  // namespace

TEST_CASE("partitions") {
  CHECK(partitions(1, 5).size() == 1);
  CHECK(partitions(2, 5).size() == 2);
  CHECK(partitions(3, 5).size() == 3);
  CHECK(partitions(3, 2).size() == 2);
  CHECK(partitions(3, 1).size() == 1);
  CHECK(partitions(4, 4).size() == 5);
  const auto p3 = partitions(3, 3);
  CHECK(p3[0] == Partition({3}));
  CHECK(p3[1] == Partition({2, 1}));
  CHECK(p3[2] == Partition({1, 1, 1}));
  CHECK(Partition({2, 1}).weight() == 3);
  CHECK(Partition({2, 1}).to_string() == "(2,1)");
  CHECK_THROWS_AS(Partition({1, 2}), InvalidArgument);
  CHECK_THROWS_AS(Partition({2, 0}), InvalidArgument);
}

TEST_CASE("zonal polynomials match the monomial expansion") {
  // C_(2) = m2 + 2/3 m11, C_(1,1) = 4/3 m11,
  // C_(3) = m3 + 3/5 m21 + 2/5 m111, C_(2,1) = 12/5 m21 + 18/5 m111, C_(1,1,1) = 2 m111.
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const int d = 3 + rep % 4;
    const SymMatrix x = testutil::random_sym(d, rng);
    const Eigen::VectorXd a = spectral_decompose(x).eigenvalues;
    CHECK(zonal_eval(Partition({1}), x) == doctest::Approx(a.sum()));
    CHECK(zonal_eval(Partition({2}), x) == doctest::Approx(m2(a) + 2.0 / 3 * m11(a)));
    CHECK(zonal_eval(Partition({1, 1}), x) == doctest::Approx(4.0 / 3 * m11(a)));
    CHECK(zonal_eval(Partition({3}), x) == doctest::Approx(m3(a) + 0.6 * m21(a) + 0.4 * m111(a)));
    CHECK(zonal_eval(Partition({2, 1}), x) == doctest::Approx(2.4 * m21(a) + 3.6 * m111(a)));
    CHECK(zonal_eval(Partition({1, 1, 1}), x) == doctest::Approx(2 * m111(a)));
  }
}

TEST_CASE("zonal anchor values") {
  const std::vector<double> d110{1, 1, 0};
  const SymMatrix x = SymMatrix::diagonal(d110);
  CHECK(zonal_eval(Partition({2, 1}), x) == doctest::Approx(24.0 / 5));
  CHECK(zonal_eval(Partition({1, 1, 1}), x) == doctest::Approx(0.0));
  // C_(1,1,1) vanishes identically below dimension 3.
  Rng rng(12);
  CHECK(std::abs(zonal_eval(Partition({1, 1, 1}), testutil::random_sym(2, rng))) < 1e-12);
}

TEST_CASE("rank-one matrices only see the one-row partition") {
  Rng rng(13);
  const Eigen::VectorXd v = testutil::random_vector(5, rng);
  const SymMatrix x = SymMatrix::outer(v);
  const double n2 = v.squaredNorm();
  for (int t = 1; t <= 3; ++t)
    for (const auto& p : partitions(t, 5)) {
      const double expected = p.length() == 1 ? std::pow(n2, t) : 0.0;
      CHECK(zonal_eval(p, x) == doctest::Approx(expected).scale(std::pow(n2, t)));
    }
}

TEST_CASE("zonal sum is the trace power for indefinite matrices") {
  Rng rng(14);
  for (int rep = 0; rep < 50; ++rep) {
    const int d = 3 + rep % 6;
    const SymMatrix x = testutil::random_sym(d, rng);
    const double scale = std::pow(x.frobenius_norm() * std::sqrt(d), 3);
    for (int t = 1; t <= 3; ++t) {
      double sum = 0;
      for (const auto& p : partitions(t, d)) sum += zonal_eval(p, x);
      CHECK(std::abs(sum - std::pow(x.trace(), t)) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("zonal degree guard") {
  const std::vector<double> s{1, 1, 1, 1};
  CHECK_THROWS_AS(zonal_from_power_sums(Partition({4}), s), UnsupportedDegree);
  CHECK_THROWS_AS(zonal_from_power_sums(Partition({2, 1}), std::vector<double>{1, 1}), InvalidArgument);
}
