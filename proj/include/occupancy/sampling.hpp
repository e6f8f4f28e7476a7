#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "compensated_sum.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "special.hpp"

namespace occupancy {

namespace detail {

/// Sequential-search inversion; expected cost O(np + 1). Requires p <= 1/2.
inline std::uint64_t binomial_inversion(RandomStream& rng, std::uint64_t n, double p) {
  const double q = 1.0 - p;
  const double s = p / q;
  const double a = static_cast<double>(n + 1) * s;
  const double start = std::exp(static_cast<double>(n) * std::log1p(-p));
  for (;;) {
    double u = rng.uniform();
    double mass = start;
    std::uint64_t x = 0;
    while (u > mass) {
      u -= mass;
      ++x;
      if (x > n) break;  // rounding ran past the support; redraw
      mass *= a / static_cast<double>(x) - s;
    }
    if (x <= n) return x;
  }
}

/// log(k!) - [(k + 1/2) log(k + 1) - (k + 1) + log(2 pi)/2]
inline double stirling_tail(std::uint64_t k) {
  const double dk = static_cast<double>(k);
  return log_factorial(k) - ((dk + 0.5) * std::log(dk + 1.0) - (dk + 1.0) +
                             0.5 * std::log(2.0 * std::numbers::pi));
}

/*!
  BTRD: transformed rejection with decomposition (Hormann 1993). Exact for
  n p >= 10 and p <= 1/2; the acceptance test uses the exact binomial
  log-probability ratio, no normal approximation.
*/
inline std::uint64_t binomial_btrd(RandomStream& rng, std::uint64_t n, double p) {
  const double dn = static_cast<double>(n);
  const double mode = std::floor((dn + 1.0) * p);
  const double ratio = p / (1.0 - p);
  const double nr = (dn + 1.0) * ratio;
  const double npq = dn * p * (1.0 - p);
  const double spq = std::sqrt(npq);
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = dn * p + 0.5;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double vr = 0.92 - 4.2 / b;
  const double urvr = 0.86 * vr;
  const auto m = static_cast<std::uint64_t>(mode);
  const double h = (mode + 0.5) * std::log((mode + 1.0) / (ratio * (dn - mode + 1.0))) +
                   stirling_tail(m) + stirling_tail(n - m);

  for (;;) {
    double v = rng.uniform_open();
    double u = 0.0;
    if (v <= urvr) {
      u = v / vr - 0.43;
      const double kf = std::floor((2.0 * a / (0.5 - std::abs(u)) + b) * u + c);
      if (kf >= 0.0 && kf <= dn) return static_cast<std::uint64_t>(kf);
      continue;
    }
    if (v >= vr) {
      u = rng.uniform_open() - 0.5;
    } else {
      u = v / vr - 0.93;
      u = std::copysign(0.5, u) - u;
      v = rng.uniform_open() * vr;
    }
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + c);
    if (kf < 0.0 || kf > dn) continue;
    v = v * alpha / (a / (us * us) + b);
    const double km = std::abs(kf - mode);
    const auto k = static_cast<std::uint64_t>(kf);

    if (km <= 15.0) {
      // Recursive evaluation of f(k)/f(m).
      double f = 1.0;
      if (mode < kf) {
        for (double i = mode + 1.0; i <= kf; i += 1.0) f *= nr / i - ratio;
      } else if (mode > kf) {
        for (double i = kf + 1.0; i <= mode; i += 1.0) v *= nr / i - ratio;
      }
      if (v <= f) return k;
      continue;
    }

    v = std::log(v);
    const double rho = (km / npq) * (((km / 3.0 + 0.625) * km + 1.0 / 6.0) / npq + 0.5);
    const double t = -km * km / (2.0 * npq);
    if (v < t - rho) return k;
    if (v > t + rho) continue;
    const double nm = dn - mode + 1.0;
    const double nk = dn - kf + 1.0;
    if (v <= h + (dn + 1.0) * std::log(nm / nk) + (kf + 0.5) * std::log(nk * ratio / (kf + 1.0)) -
                 stirling_tail(k) - stirling_tail(n - k)) {
      return k;
    }
  }
}

}  // namespace detail

/// Exact Binomial(n, p) variate: inversion for n min(p, 1-p) < 10, BTRD otherwise.
inline std::uint64_t sample_binomial(RandomStream& rng, std::uint64_t n, double p) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (p > 0.5) return n - sample_binomial(rng, n, 1.0 - p);
  if (static_cast<double>(n) * p < 10.0) return detail::binomial_inversion(rng, n, p);
  return detail::binomial_btrd(rng, n, p);
}

/// Walker/Vose alias table: O(1) categorical draws after O(N) setup.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> weights) : accept_(weights.size()), alias_(weights.size()) {
    const std::size_t size = weights.size();
    CompensatedSum<> total;
    for (double w : weights) total += w;
    std::vector<double> scaled(size);
    std::vector<std::size_t> small;
    std::vector<std::size_t> large;
    for (std::size_t i = 0; i < size; ++i) {
      scaled[i] = weights[i] * static_cast<double>(size) / total.value();
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const std::size_t s = small.back();
      small.pop_back();
      const std::size_t l = large.back();
      accept_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    // Leftovers are 1 up to rounding.
    for (auto i : large) accept_[i] = 1.0, alias_[i] = i;
    for (auto i : small) accept_[i] = 1.0, alias_[i] = i;
  }

  [[nodiscard]] std::size_t size() const noexcept { return accept_.size(); }

  std::size_t operator()(RandomStream& rng) const noexcept {
    const double u = rng.uniform() * static_cast<double>(accept_.size());
    const auto column = std::min(static_cast<std::size_t>(u), accept_.size() - 1);
    return rng.uniform() < accept_[column] ? column : alias_[column];
  }

 private:
  std::vector<double> accept_;
  std::vector<std::size_t> alias_;
};

/*!
  Draws multinomial(n; q_1..q_N) box counts.

  When N <= n, boxes are filled by a conditional-binomial chain: box k
  receives Binomial(remaining, q_k / sum_{j>=k} q_j) and the last box takes
  the rest. When n < N, each ball is placed with one alias-table draw.
*/
class AllocationSampler {
 public:
  enum class Strategy { ConditionalBinomial, AliasPerBall };

  explicit AllocationSampler(const AllocationModel& model)
      : balls_(model.ball_count()),
        strategy_(model.box_count() <= model.ball_count() ? Strategy::ConditionalBinomial
                                                          : Strategy::AliasPerBall),
        alias_(strategy_ == Strategy::AliasPerBall ? model.profile().weights()
                                                   : std::span<const double>{}) {
    if (strategy_ == Strategy::ConditionalBinomial) {
      const auto w = model.profile().weights();
      conditional_.resize(w.size());
      CompensatedSum<> tail;
      for (std::size_t k = w.size(); k-- > 0;) {
        tail += w[k];
        conditional_[k] = std::min(1.0, w[k] / tail.value());
      }
    }
  }

  [[nodiscard]] Strategy strategy() const noexcept { return strategy_; }

  /// Overwrites `counts` (length N) with one allocation.
  void operator()(RandomStream& rng, std::span<std::uint64_t> counts) const {
    std::fill(counts.begin(), counts.end(), 0);
    if (strategy_ == Strategy::AliasPerBall) {
      for (std::uint64_t ball = 0; ball < balls_; ++ball) ++counts[alias_(rng)];
      return;
    }
    std::uint64_t left = balls_;
    const std::size_t last = counts.size() - 1;
    for (std::size_t k = 0; k < last && left > 0; ++k) {
      counts[k] = sample_binomial(rng, left, conditional_[k]);
      left -= counts[k];
    }
    counts[last] += left;
  }

 private:
  std::uint64_t balls_;
  Strategy strategy_;
  AliasTable alias_;
  std::vector<double> conditional_;
};

/// One multinomial allocation of the model's balls.
inline std::vector<std::uint64_t> sample_allocation(const AllocationModel& model,
                                                    RandomStream& rng) {
  std::vector<std::uint64_t> counts(model.box_count());
  AllocationSampler{model}(rng, counts);
  return counts;
}

}  // namespace occupancy
