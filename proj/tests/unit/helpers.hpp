#pragma once

#include "grassrec/rng.hpp"
#include "grassrec/sym_matrix.hpp"

#include <algorithm>
#include <random>

namespace testutil {

inline grassrec::SymMatrix random_sym(int d, grassrec::Rng& rng) {
  std::normal_distribution<double> n;
  Eigen::MatrixXd g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = n(rng);
  return grassrec::SymMatrix(0.5 * (g + g.transpose()));
}

inline Eigen::VectorXd random_vector(int d, grassrec::Rng& rng) {
  std::normal_distribution<double> n;
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x(i) = n(rng);
  return x;
}

inline Eigen::VectorXd random_unit(int d, grassrec::Rng& rng) {
  Eigen::VectorXd x = random_vector(d, rng);
  return x / x.norm();
}

// Nonincreasing profile with top entry 1 and a random number of trailing zeros.
inline grassrec::Spectrum random_spectrum(int d, grassrec::Rng& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> v(d);
  for (auto& x : v) x = u(rng);
  std::sort(v.rbegin(), v.rend());
  v.front() = 1.0;
  const int zeros = std::uniform_int_distribution<int>(0, d - 2)(rng);
  for (int i = 0; i < zeros; ++i) v[d - 1 - i] = 0.0;
  return grassrec::Spectrum(v);
}

}  // namespace testutil
