#pragma once

#include "grassrec/sym_matrix.hpp"

#include <span>
#include <string>
#include <vector>

namespace grassrec {

/// Integer partition: nonincreasing positive parts.
class Partition {
 public:
  explicit Partition(std::vector<int> parts);

  const std::vector<int>& parts() const { return parts_; }
  int weight() const { return weight_; }
  int length() const { return static_cast<int>(parts_.size()); }
  std::string to_string() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> parts_;
  int weight_ = 0;
};

/// Partitions of t with at most max_parts parts, lexicographically decreasing.
std::vector<Partition> partitions(int t, int max_parts);

/// Zonal polynomial C_pi evaluated from power sums s = (tr X, tr X^2, tr X^3)
/// (at least pi.weight() entries). Only weights 1..3 have closed forms here.
double zonal_from_power_sums(const Partition& pi, std::span<const double> s);

double zonal_eval(const Partition& pi, const SymMatrix& x);

}  // namespace grassrec
