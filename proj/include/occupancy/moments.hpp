#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "error.hpp"
#include "model.hpp"

namespace occupancy {

enum class MomentKind { Exact, Approx };

/// Means, variances and pairwise covariances of occupancy proportions for a set of indices.
struct MomentSet {
  AllocationModel model;
  MomentKind kind = MomentKind::Exact;
  std::vector<std::uint64_t> indices;
  std::map<std::uint64_t, double> means;
  std::map<std::uint64_t, double> variances;
  /// Keyed by (min(r,t), max(r,t)).
  std::map<std::pair<std::uint64_t, std::uint64_t>, double> covariances;

  [[nodiscard]] double mean(std::uint64_t r) const { return lookup(means, r); }
  [[nodiscard]] double variance(std::uint64_t r) const { return lookup(variances, r); }
  [[nodiscard]] double covariance(std::uint64_t r, std::uint64_t t) const {
    if (r == t) return variance(r);
    return lookup(covariances, r < t ? std::pair{r, t} : std::pair{t, r});
  }

 private:
  template <typename Map, typename Key>
  static double lookup(const Map& map, const Key& key) {
    const auto it = map.find(key);
    if (it == map.end()) throw Error(ErrorCode::RangeError, "index not present in MomentSet");
    return it->second;
  }
};

}  // namespace occupancy
