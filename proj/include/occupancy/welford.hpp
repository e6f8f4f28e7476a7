#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace occupancy {

/*!
  One-pass central moments (up to the fourth) of a fixed-length vector of
  observations, plus co-moments for a chosen set of coordinate pairs.

  Updates follow Welford/Terriberry; merge() uses the pairwise combination
  formulas of Chan et al. and Pebay, so partial accumulators can be reduced
  in any fixed order.
*/
class MomentAccumulator {
 public:
  using Pair = std::pair<std::size_t, std::size_t>;

  MomentAccumulator(std::size_t dims, std::vector<Pair> pairs)
      : mean_(dims), m2_(dims), m3_(dims), m4_(dims), pairs_(std::move(pairs)), co_(pairs_.size()) {}

  void add(std::span<const double> x) {
    const double n1 = static_cast<double>(count_);
    ++count_;
    const double n = static_cast<double>(count_);
    // Co-moments need the pre-update mean of one coordinate.
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      const auto [i, j] = pairs_[p];
      co_[p] += (x[i] - mean_[i]) * (x[j] - mean_[j]) * n1 / n;
    }
    for (std::size_t i = 0; i < mean_.size(); ++i) {
      const double delta = x[i] - mean_[i];
      const double dn = delta / n;
      const double dn2 = dn * dn;
      const double term = delta * dn * n1;
      mean_[i] += dn;
      m4_[i] += term * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * m2_[i] - 4.0 * dn * m3_[i];
      m3_[i] += term * dn * (n - 2.0) - 3.0 * dn * m2_[i];
      m2_[i] += term;
    }
  }

  void merge(const MomentAccumulator& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      const auto [i, j] = pairs_[p];
      co_[p] += other.co_[p] +
                (other.mean_[i] - mean_[i]) * (other.mean_[j] - mean_[j]) * na * nb / n;
    }
    for (std::size_t i = 0; i < mean_.size(); ++i) {
      const double d = other.mean_[i] - mean_[i];
      const double d2 = d * d;
      const double m2 = m2_[i] + other.m2_[i] + d2 * na * nb / n;
      const double m3 = m3_[i] + other.m3_[i] + d * d2 * na * nb * (na - nb) / (n * n) +
                        3.0 * d * (na * other.m2_[i] - nb * m2_[i]) / n;
      const double m4 = m4_[i] + other.m4_[i] +
                        d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                        6.0 * d2 * (na * na * other.m2_[i] + nb * nb * m2_[i]) / (n * n) +
                        4.0 * d * (na * other.m3_[i] - nb * m3_[i]) / n;
      mean_[i] += d * nb / n;
      m2_[i] = m2;
      m3_[i] = m3;
      m4_[i] = m4;
    }
    count_ += other.count_;
  }

  [[nodiscard]] std::uint64_t count() const noexcept { return count_; }
  [[nodiscard]] std::size_t dims() const noexcept { return mean_.size(); }
  [[nodiscard]] std::span<const Pair> pairs() const noexcept { return pairs_; }
  [[nodiscard]] double mean(std::size_t i) const { return mean_[i]; }

  /// Unbiased sample variance (1/(m-1)).
  [[nodiscard]] double variance(std::size_t i) const {
    return count_ > 1 ? m2_[i] / static_cast<double>(count_ - 1) : 0.0;
  }

  /// Unbiased sample covariance of the p-th tracked pair.
  [[nodiscard]] double covariance(std::size_t p) const {
    return count_ > 1 ? co_[p] / static_cast<double>(count_ - 1) : 0.0;
  }

  [[nodiscard]] double std_error_of_mean(std::size_t i) const {
    return count_ > 1 ? std::sqrt(variance(i) / static_cast<double>(count_)) : 0.0;
  }

  /// Large-sample standard error of the sample variance, from the fourth central moment.
  [[nodiscard]] double std_error_of_variance(std::size_t i) const {
    if (count_ < 4) return 0.0;
    const double m = static_cast<double>(count_);
    const double s2 = variance(i);
    const double mu4 = m4_[i] / m;
    // Var(s^2) = (mu4 - s^4 (m-3)/(m-1)) / m, never below 2 s^4 / (m (m-1)) since mu4 >= s^4.
    // The floor matters for two-point laws, where the plug-in form cancels to ~0.
    const double v = (mu4 - s2 * s2 * (m - 3.0) / (m - 1.0)) / m;
    return std::sqrt(std::max(v, 2.0 * s2 * s2 / (m * (m - 1.0))));
  }

 private:
  std::uint64_t count_ = 0;
  std::vector<double> mean_, m2_, m3_, m4_;
  std::vector<Pair> pairs_;
  std::vector<double> co_;
};

}  // namespace occupancy
