#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "compensated_sum.hpp"
#include "error.hpp"

namespace occupancy {

/// Tolerance on |sum(q) - 1| accepted by make_profile.
inline constexpr double kWeightSumTolerance = 1e-9;

/// A run of boxes sharing one bit-identical weight.
struct WeightGroup {
  double weight;
  std::size_t multiplicity;
};

/*!
  Box probabilities q_1 >= q_2 >= ... >= q_N > 0 summing to one.

  Weights are validated but never renormalized. Boxes with bit-identical
  weights are grouped so that averages over boxes and over ordered pairs of
  boxes cost O(D) and O(D^2) for D distinct weights.
*/
class WeightProfile {
 public:
  [[nodiscard]] std::size_t box_count() const noexcept { return weights_.size(); }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
  [[nodiscard]] std::span<const WeightGroup> groups() const noexcept { return groups_; }
  [[nodiscard]] double largest() const noexcept { return weights_.front(); }
  [[nodiscard]] bool equiprobable() const noexcept { return groups_.size() == 1; }

  friend WeightProfile make_profile(std::vector<double> weights);

 private:
  explicit WeightProfile(std::vector<double> sorted) : weights_(std::move(sorted)) {
    for (double w : weights_) {
      if (!groups_.empty() && groups_.back().weight == w) {
        ++groups_.back().multiplicity;
      } else {
        groups_.push_back({w, 1});
      }
    }
  }

  std::vector<double> weights_;
  std::vector<WeightGroup> groups_;
};

inline WeightProfile make_profile(std::vector<double> weights) {
  if (weights.empty()) throw Error(ErrorCode::EmptyList, "weight list is empty");
  CompensatedSum<> total;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::NonPositiveWeight, "weights must be finite and > 0");
    }
    total += w;
  }
  if (std::abs(total.value() - 1.0) > kWeightSumTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "weights sum to " << total.value();
    throw Error(ErrorCode::SumNotOne, msg.str());
  }
  std::stable_sort(weights.begin(), weights.end(), std::greater<>{});
  return WeightProfile(std::move(weights));
}

inline WeightProfile equiprobable_profile(std::size_t box_count) {
  if (box_count == 0) throw Error(ErrorCode::ZeroBoxes, "N must be at least 1");
  return make_profile(std::vector<double>(box_count, 1.0 / static_cast<double>(box_count)));
}

/// q_k proportional to k^(-exponent), normalized in compensated arithmetic.
inline WeightProfile powerlaw_profile(std::size_t box_count, double exponent) {
  if (box_count == 0) throw Error(ErrorCode::ZeroBoxes, "N must be at least 1");
  if (!std::isfinite(exponent) || exponent < 0.0) {
    throw Error(ErrorCode::RangeError, "power-law exponent must be finite and >= 0");
  }
  std::vector<double> raw(box_count);
  CompensatedSum<> total;
  for (std::size_t k = 0; k < box_count; ++k) {
    raw[k] = std::pow(static_cast<double>(k + 1), -exponent);
    total += raw[k];
  }
  for (double& w : raw) w /= total.value();
  return make_profile(std::move(raw));
}

/*!
  n balls thrown into the boxes of a WeightProfile.

  alpha = n/N is the average load, beta = n q_1 the largest possible load of
  a box. The random box load xi = n q_X takes the value n q_k with
  probability 1/N.
*/
class AllocationModel {
 public:
  AllocationModel(std::uint64_t ball_count, WeightProfile profile)
      : ball_count_(ball_count),
        profile_(std::move(profile)),
        alpha_(static_cast<double>(ball_count_) / static_cast<double>(profile_.box_count())),
        beta_(static_cast<double>(ball_count_) * profile_.largest()) {}

  [[nodiscard]] std::uint64_t ball_count() const noexcept { return ball_count_; }
  [[nodiscard]] std::size_t box_count() const noexcept { return profile_.box_count(); }
  [[nodiscard]] const WeightProfile& profile() const noexcept { return profile_; }
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] double beta() const noexcept { return beta_; }

  /// Load n q of a box with weight q.
  [[nodiscard]] double load(double weight) const noexcept {
    return static_cast<double>(ball_count_) * weight;
  }

 private:
  std::uint64_t ball_count_;
  WeightProfile profile_;
  double alpha_;
  double beta_;
};

namespace detail {

inline double checked(double v) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::NonFiniteFunctional, "functional returned a non-finite value");
  }
  return v;
}

}  // namespace detail

/// N^-1 sum_k f(q_k): the average of a function of the box weight.
template <typename F>
double box_average(const WeightProfile& profile, F&& f) {
  const auto groups = profile.groups();
  if (groups.size() == 1) return detail::checked(f(groups.front().weight));
  CompensatedSum<> acc;
  for (const auto& g : groups) {
    acc += static_cast<double>(g.multiplicity) * detail::checked(f(g.weight));
  }
  return acc.value() / static_cast<double>(profile.box_count());
}

enum class PairSet { All, Distinct };

/*!
  N^-2 sum_{k,l} g(q_k, q_l) over ordered pairs of boxes.

  PairSet::All includes k == l; PairSet::Distinct restricts to k != l and
  is evaluated directly rather than as a difference of two averages.
*/
template <typename G>
double pair_average(const WeightProfile& profile, G&& g, PairSet pairs = PairSet::All) {
  const auto groups = profile.groups();
  const double box_count = static_cast<double>(profile.box_count());
  CompensatedSum<> acc;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const double mi = static_cast<double>(groups[i].multiplicity);
    for (std::size_t j = 0; j < groups.size(); ++j) {
      double mj = static_cast<double>(groups[j].multiplicity);
      if (pairs == PairSet::Distinct && i == j) mj -= 1.0;
      if (mj == 0.0) continue;
      acc += mi * mj * detail::checked(g(groups[i].weight, groups[j].weight));
    }
  }
  return acc.value() / (box_count * box_count);
}

/// E[f(xi)] for the random box load xi = n q_X.
template <typename F>
double e_xi(const AllocationModel& model, F&& f) {
  return box_average(model.profile(), [&](double q) { return f(model.load(q)); });
}

/// E[g(xi, eta)] with eta an independent copy of xi; includes the diagonal k == l.
template <typename G>
double e_xi_pair(const AllocationModel& model, G&& g) {
  return pair_average(model.profile(),
                      [&](double qk, double ql) { return g(model.load(qk), model.load(ql)); });
}

/// Weights parsed from text: one number per line, or a single `equi N` / `powerlaw N s` line.
inline WeightProfile parse_profile_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<double> weights;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string head;
    if (!(fields >> head)) continue;
    if (head == "equi" || head == "powerlaw") {
      if (!weights.empty()) throw Error(ErrorCode::ParseError, "generator token after weights");
      long long boxes = 0;
      if (!(fields >> boxes) || boxes < 0) throw Error(ErrorCode::ParseError, "bad box count");
      double exponent = 0.0;
      if (head == "powerlaw" && !(fields >> exponent)) {
        throw Error(ErrorCode::ParseError, "powerlaw needs an exponent");
      }
      std::string extra;
      if (fields >> extra) throw Error(ErrorCode::ParseError, "trailing token '" + extra + "'");
      while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
          throw Error(ErrorCode::ParseError, "content after generator line");
        }
      }
      return head == "equi" ? equiprobable_profile(static_cast<std::size_t>(boxes))
                            : powerlaw_profile(static_cast<std::size_t>(boxes), exponent);
    }
    std::size_t used = 0;
    double w = 0.0;
    try {
      w = std::stod(head, &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "not a number: '" + head + "'");
    }
    std::string extra;
    if (used != head.size() || (fields >> extra)) {
      throw Error(ErrorCode::ParseError, "expected one number per line, got '" + line + "'");
    }
    weights.push_back(w);
  }
  return make_profile(std::move(weights));
}

inline WeightProfile load_profile_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open profile file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_profile_text(buf.str());
}

/// Profile spec micro-grammar: `equi:N`, `powerlaw:N:s` or `file:PATH`.
inline WeightProfile parse_profile_spec(std::string_view spec) {
  auto fail = [&] { return Error(ErrorCode::ParseError, "bad profile spec '" + std::string(spec) + "'"); };
  auto to_count = [&](std::string_view s) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(std::string(s), &used);
    } catch (const std::exception&) {
      throw fail();
    }
    if (used != s.size() || v < 0) throw fail();
    return static_cast<std::size_t>(v);
  };
  if (spec.starts_with("file:")) return load_profile_file(std::string(spec.substr(5)));
  if (spec.starts_with("equi:")) return equiprobable_profile(to_count(spec.substr(5)));
  if (spec.starts_with("powerlaw:")) {
    const auto rest = spec.substr(9);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw fail();
    std::size_t used = 0;
    double exponent = 0.0;
    const std::string s(rest.substr(colon + 1));
    try {
      exponent = std::stod(s, &used);
    } catch (const std::exception&) {
      throw fail();
    }
    if (used != s.size()) throw fail();
    return powerlaw_profile(to_count(rest.substr(0, colon)), exponent);
  }
  throw fail();
}

}  // namespace occupancy
