#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "compensated_sum.hpp"
#include "error.hpp"

namespace occupancy {

/// Largest occupancy index accepted by the special functions.
inline constexpr std::uint64_t kMaxOrder = 1024;

namespace detail {

inline void check_order(std::uint64_t r) {
  if (r > kMaxOrder) {
    throw Error(ErrorCode::FactorialOverflow,
                "order " + std::to_string(r) + " exceeds " + std::to_string(kMaxOrder));
  }
}

/// m * log_base with the convention 0 * (-inf) = 0, i.e. 0^0 = 1.
inline double scaled_log(double m, double log_base) noexcept {
  return m == 0.0 ? 0.0 : m * log_base;
}

}  // namespace detail

/*!
  log(k!). Memoized up to kMaxOrder from compensated sums of log j; larger
  arguments go through lgamma.
*/
inline double log_factorial(std::uint64_t k) {
  static const auto table = [] {
    std::array<double, kMaxOrder + 1> t{};
    CompensatedSum<> acc;
    for (std::uint64_t j = 2; j <= kMaxOrder; ++j) {
      acc += std::log(static_cast<double>(j));
      t[j] = acc.value();
    }
    return t;
  }();
  if (k <= kMaxOrder) return table[k];
  return std::lgamma(static_cast<double>(k) + 1.0);
}

/// log(1 - y) + y, accurate for small y. Requires y <= 1.
inline double log1p_minus_plus(double y) noexcept {
  if (std::abs(y) < 0.125) {
    // -(y^2/2 + y^3/3 + ...)
    double term = y * y;
    double sum = 0.0;
    for (int k = 2; k < 60; ++k) {
      const double next = term / k;
      sum += next;
      if (std::abs(next) <= std::abs(sum) * 1e-17) break;
      term *= y;
    }
    return -sum;
  }
  return std::log1p(-y) + y;
}

/// log(n! / ((n - s)! n^s)) = sum_{j<s} log(1 - j/n). Requires s <= n.
inline double log_falling_ratio(std::uint64_t n, std::uint64_t s) {
  CompensatedSum<> acc;
  const double dn = static_cast<double>(n);
  for (std::uint64_t j = 1; j < s; ++j) acc += std::log1p(-static_cast<double>(j) / dn);
  return acc.value();
}

/// Poisson probability x^r e^-x / r!.
inline double poisson_weight(std::uint64_t r, double x) {
  if (!(x >= 0.0)) throw Error(ErrorCode::NegativeInput, "poisson_weight needs x >= 0");
  detail::check_order(r);
  if (x == 0.0) return r == 0 ? 1.0 : 0.0;
  if (std::isinf(x)) return 0.0;
  return std::exp(static_cast<double>(r) * std::log(x) - x - log_factorial(r));
}

namespace detail {

inline void check_occupancy(std::uint64_t n, std::uint64_t r) {
  if (n == 0) throw Error(ErrorCode::RangeError, "n must be positive");
  if (r > n) throw Error(ErrorCode::RangeError, "need r <= n");
  check_order(r);
}

}  // namespace detail

/*!
  varphi_n(r) from n!/(n-r)! = n^r (1 - varphi_n(r)/n).

  Evaluated through the telescoped form sum_{k=1}^{r-1} k P_k with
  P_k = prod_{j<k} (1 - j/n), which keeps 0 <= varphi_n(r) <= r(r-1)/2 under
  rounding.
*/
inline double varphi(std::uint64_t n, std::uint64_t r) {
  detail::check_occupancy(n, r);
  const double dn = static_cast<double>(n);
  CompensatedSum<> log_prod;
  CompensatedSum<> acc;
  for (std::uint64_t k = 1; k < r; ++k) {
    if (k > 1) log_prod += std::log1p(-static_cast<double>(k - 1) / dn);
    acc += static_cast<double>(k) * std::exp(log_prod.value());
  }
  return acc.value();
}

/// varphi*_n(r) = n (r(r-1)/2 - varphi_n(r)), as n sum_k k (1 - P_k).
inline double varphi_star(std::uint64_t n, std::uint64_t r) {
  detail::check_occupancy(n, r);
  const double dn = static_cast<double>(n);
  CompensatedSum<> log_prod;
  CompensatedSum<> acc;
  for (std::uint64_t k = 1; k < r; ++k) {
    if (k > 1) log_prod += std::log1p(-static_cast<double>(k - 1) / dn);
    acc += static_cast<double>(k) * -std::expm1(log_prod.value());
  }
  return dn * acc.value();
}

namespace detail {

inline void check_delta_args(std::uint64_t n, std::uint64_t r, double x) {
  check_occupancy(n, r);
  if (!(x >= 0.0) || x > static_cast<double>(n)) {
    throw Error(ErrorCode::RangeError, "delta needs 0 <= x <= n");
  }
}

/// log((1 - x/n)^(n-r)) + x
inline double delta_exponent(std::uint64_t n, std::uint64_t r, double x) {
  const double dn = static_cast<double>(n);
  const double y = x / dn;
  if (r == n) return x;
  if (y == 1.0) return -std::numeric_limits<double>::infinity();
  return dn * log1p_minus_plus(y) - static_cast<double>(r) * std::log1p(-y);
}

}  // namespace detail

/*!
  delta_n(r, x) from (1 - x/n)^(n-r) = e^-x + delta_n(r, x)/n.

  Defined on 0 <= x <= n; the two-sided bounds -2 <= delta <= r 2^(r-1) are
  only certified for x <= n/2.
*/
inline double delta(std::uint64_t n, std::uint64_t r, double x) {
  detail::check_delta_args(n, r, x);
  const double dn = static_cast<double>(n);
  const double e = detail::delta_exponent(n, r, x);
  if (e > 1.0) return dn * (std::exp(e - x) - std::exp(-x));
  return dn * std::exp(-x) * std::expm1(e);
}

/// delta*_n(r, x) from delta_n(r, x) = e^-x x (r - x/2) + delta*_n(r, x)/n.
inline double delta_star(std::uint64_t n, std::uint64_t r, double x) {
  const double d = delta(n, r, x);
  const double lead = std::exp(-x) * x * (static_cast<double>(r) - 0.5 * x);
  return static_cast<double>(n) * (d - lead);
}

}  // namespace occupancy
