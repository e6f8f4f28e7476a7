#pragma once

#include <string>
#include <vector>

#include <occupancy/model.hpp>

namespace occupancy::testing {

struct NamedProfile {
  std::string id;
  WeightProfile profile;
};

/// Equiprobable N = 1..4 plus ten fixed irregular profiles with N <= 4.
inline std::vector<NamedProfile> tiny_profiles() {
  std::vector<NamedProfile> out;
  for (std::size_t boxes = 1; boxes <= 4; ++boxes) {
    out.push_back({"equi:" + std::to_string(boxes), equiprobable_profile(boxes)});
  }
  const std::vector<std::vector<double>> fixed{
      {0.7, 0.3},
      {0.5, 0.3, 0.2},
      {0.6, 0.25, 0.15},
      {0.4, 0.3, 0.2, 0.1},
      {0.25, 0.25, 0.3, 0.2},
      {0.9, 0.1},
      {0.35, 0.35, 0.15, 0.15},
      {0.45, 0.2, 0.2, 0.15},
      {0.55, 0.15, 0.15, 0.15},
      {0.28, 0.26, 0.24, 0.22},
  };
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    out.push_back({"fixed:" + std::to_string(i), make_profile(fixed[i])});
  }
  return out;
}

}  // namespace occupancy::testing
