#include "grassrec/zonal.hpp"

#include "grassrec/error.hpp"

#include <functional>

namespace grassrec {

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw InvalidArgument("Partition: needs at least one part");
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i] < 1) throw InvalidArgument("Partition: parts must be positive");
    if (i > 0 && parts_[i] > parts_[i - 1])
      throw InvalidArgument("Partition: parts must be nonincreasing");
    weight_ += parts_[i];
  }
}

std::string Partition::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(parts_[i]);
  }
  return s + ")";
}

std::vector<Partition> partitions(int t, int max_parts) {
  if (t < 1 || max_parts < 1) throw InvalidArgument("partitions: need t >= 1 and max_parts >= 1");
  std::vector<Partition> out;
  std::vector<int> cur;
  // Depth-first with the largest admissible part first yields lexicographically
  // decreasing order.
  std::function<void(int, int)> rec = [&](int remaining, int cap) {
    if (remaining == 0) {
      out.emplace_back(cur);
      return;
    }
    if (static_cast<int>(cur.size()) == max_parts) return;
    for (int p = std::min(remaining, cap); p >= 1; --p) {
      cur.push_back(p);
      rec(remaining - p, p);
      cur.pop_back();
    }
  };
  rec(t, t);
  return out;
}

double zonal_from_power_sums(const Partition& pi, std::span<const double> s) {
  if (pi.weight() > 3)
    throw UnsupportedDegree("zonal: no closed form for |pi| = " + std::to_string(pi.weight()) +
                            " (supported: 1..3)");
  if (static_cast<int>(s.size()) < pi.weight())
    throw InvalidArgument("zonal: need power sums up to the partition weight");
  const double p1 = s[0];
  const auto& parts = pi.parts();
  switch (pi.weight()) {
    case 1:
      return p1;
    case 2: {
      const double p2 = s[1];
      if (parts.size() == 1) return (p1 * p1 + 2.0 * p2) / 3.0;  // (2)
      return 2.0 * (p1 * p1 - p2) / 3.0;                          // (1,1)
    }
    default: {
      const double p2 = s[1];
      const double p3 = s[2];
      const double p111 = p1 * p1 * p1;
      if (parts.size() == 1) return (p111 + 6.0 * p1 * p2 + 8.0 * p3) / 15.0;  // (3)
      if (parts.size() == 2) return 3.0 * (p111 + p1 * p2 - 2.0 * p3) / 5.0;   // (2,1)
      return (p111 - 3.0 * p1 * p2 + 2.0 * p3) / 3.0;                          // (1,1,1)
    }
  }
}

double zonal_eval(const Partition& pi, const SymMatrix& x) {
  if (pi.weight() > 3)
    throw UnsupportedDegree("zonal: no closed form for |pi| = " + std::to_string(pi.weight()) +
                            " (supported: 1..3)");
  return zonal_from_power_sums(pi, power_sums(x, pi.weight()));
}

}  // namespace grassrec
