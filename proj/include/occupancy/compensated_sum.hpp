#pragma once

#include <cmath>

namespace occupancy {

/*!
  Neumaier's variant of Kahan summation.

  The running compensation is kept separately and folded in on read, so the
  result is exact to within one rounding for sums of up to ~1e15 terms of
  comparable magnitude.
*/
template <typename T = double>
class CompensatedSum {
 public:
  constexpr CompensatedSum() = default;
  constexpr explicit CompensatedSum(T init) : sum_(init) {}

  constexpr CompensatedSum& operator+=(T x) noexcept {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  constexpr CompensatedSum& operator-=(T x) noexcept { return *this += -x; }

  constexpr CompensatedSum& operator+=(const CompensatedSum& other) noexcept {
    *this += other.sum_;
    *this += other.comp_;
    return *this;
  }

  [[nodiscard]] constexpr T value() const noexcept { return sum_ + comp_; }
  constexpr explicit operator T() const noexcept { return value(); }

 private:
  T sum_{0};
  T comp_{0};
};

}  // namespace occupancy
