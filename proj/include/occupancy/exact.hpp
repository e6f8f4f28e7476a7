#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "compensated_sum.hpp"
#include "error.hpp"
#include "model.hpp"
#include "moments.hpp"
#include "special.hpp"

// Exact finite-n moments of the occupancy proportions q_r = N_r / N.
//
// Every per-box (or per-pair) term is assembled in log space with the n^r of
// the falling factorial folded into the box load n q, then exponentiated and
// summed with compensation.

namespace occupancy {

namespace detail {

inline void check_index(const AllocationModel& model, std::uint64_t r) {
  if (r > model.ball_count()) {
    throw Error(ErrorCode::RangeError,
                "occupancy index " + std::to_string(r) + " exceeds n = " +
                    std::to_string(model.ball_count()));
  }
}

/// log of (1 - s)_+^m with 0^0 = 1; -inf when the term vanishes.
inline double log_positive_power(std::uint64_t m, double s) noexcept {
  if (m == 0) return 0.0;
  if (s >= 1.0) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(m) * std::log1p(-s);
}

}  // namespace detail

/// E[q_r] = binom(n, r) E[q_X^r (1 - q_X)^(n-r)].
inline double exact_mean(const AllocationModel& model, std::uint64_t r) {
  detail::check_index(model, r);
  const std::uint64_t n = model.ball_count();
  if (n == 0) return 1.0;
  const double log_coeff = log_falling_ratio(n, r) - log_factorial(r);
  const double dr = static_cast<double>(r);
  return box_average(model.profile(), [&](double q) {
    return std::exp(log_coeff + detail::scaled_log(dr, std::log(model.load(q))) +
                    detail::log_positive_power(n - r, q));
  });
}

/*!
  Phi_n(r, t): E[q_r q_t] minus the diagonal contribution, minus E[q_r] E[q_t].

  The multinomial part is the average over ordered pairs of distinct boxes
  of binom(n; r, t, n-r-t) q_k^r q_l^t (1 - q_k - q_l)_+^(n-r-t). When
  r + t > n no two boxes can hold r and t balls at once and that part is 0.
*/
inline double phi(const AllocationModel& model, std::uint64_t r, std::uint64_t t) {
  detail::check_index(model, r);
  detail::check_index(model, t);
  const std::uint64_t n = model.ball_count();
  const double product = exact_mean(model, r) * exact_mean(model, t);
  if (r + t > n) return -product;
  if (n == 0) {
    const double boxes = static_cast<double>(model.box_count());
    return (boxes - 1.0) / boxes - product;
  }
  const double log_coeff =
      log_falling_ratio(n, r + t) - log_factorial(r) - log_factorial(t);
  const double dr = static_cast<double>(r);
  const double dt = static_cast<double>(t);
  const std::uint64_t rest = n - r - t;
  const double joint = pair_average(
      model.profile(),
      [&](double qk, double ql) {
        return std::exp(log_coeff + detail::scaled_log(dr, std::log(model.load(qk))) +
                        detail::scaled_log(dt, std::log(model.load(ql))) +
                        detail::log_positive_power(rest, qk + ql));
      },
      PairSet::Distinct);
  return joint - product;
}

/// V[q_r] = Phi_n(r, r) + E[q_r] / N.
inline double exact_variance(const AllocationModel& model, std::uint64_t r) {
  return phi(model, r, r) + exact_mean(model, r) / static_cast<double>(model.box_count());
}

/// C[q_r, q_t] = Phi_n(r, t) for r != t.
inline double exact_covariance(const AllocationModel& model, std::uint64_t r, std::uint64_t t) {
  if (r == t) throw Error(ErrorCode::EqualIndices, "covariance needs r != t");
  // Phi is symmetric in (r, t) but summation order is not; fix it.
  return r < t ? phi(model, r, t) : phi(model, t, r);
}

/*!
  Q_n(r, t) = (r! t!)^-1 E[xi^r eta^t (1 - q_X - q_Y)^(n-r-t)], eta = n q_Y.

  Only defined here for q_1 <= 1/2, where the positive part is inactive.
*/
inline double q_functional(const AllocationModel& model, std::uint64_t r, std::uint64_t t) {
  if (model.profile().largest() > 0.5) {
    throw Error(ErrorCode::ApplicabilityError, "Q_n requires q_1 <= 1/2");
  }
  if (r + t > model.ball_count()) throw Error(ErrorCode::RangeError, "need r + t <= n");
  const double log_coeff = -log_factorial(r) - log_factorial(t);
  const double dr = static_cast<double>(r);
  const double dt = static_cast<double>(t);
  const std::uint64_t rest = model.ball_count() - r - t;
  return pair_average(model.profile(), [&](double qk, double ql) {
    return std::exp(log_coeff + detail::scaled_log(dr, std::log(model.load(qk))) +
                    detail::scaled_log(dt, std::log(model.load(ql))) +
                    detail::log_positive_power(rest, qk + ql));
  });
}

/// Exact moments for the given indices; covariances for every pair of distinct indices.
inline MomentSet exact_moments(const AllocationModel& model,
                               std::span<const std::uint64_t> indices) {
  MomentSet out{model, MomentKind::Exact, {indices.begin(), indices.end()}, {}, {}, {}};
  for (auto r : indices) {
    out.means[r] = exact_mean(model, r);
    out.variances[r] = exact_variance(model, r);
  }
  for (auto r : indices) {
    for (auto t : indices) {
      if (r < t) out.covariances[{r, t}] = exact_covariance(model, r, t);
    }
  }
  return out;
}

/// Upper limit on the number of count vectors brute_force_moments will visit.
inline constexpr double kMaxCompositions = 2e6;

/// binom(n + N - 1, N - 1): number of count vectors with N entries summing to n.
inline double composition_count(std::uint64_t n, std::size_t boxes) {
  return std::round(std::exp(std::lgamma(static_cast<double>(n + boxes)) -
                             std::lgamma(static_cast<double>(n) + 1.0) -
                             std::lgamma(static_cast<double>(boxes))));
}

/*!
  Calls visit(counts, probability) for every count vector (c_1..c_N) with
  sum n, where probability is the multinomial mass n!/prod(c_k!) prod q_k^c_k.
*/
inline void for_each_composition(
    const AllocationModel& model,
    const std::function<void(std::span<const std::uint64_t>, double)>& visit) {
  const std::uint64_t n = model.ball_count();
  const auto weights = model.profile().weights();
  const std::size_t boxes = weights.size();
  if (composition_count(n, boxes) > kMaxCompositions) {
    throw Error(ErrorCode::TooLarge, "enumeration exceeds " + std::to_string(kMaxCompositions) +
                                         " count vectors");
  }
  std::vector<double> log_q(boxes);
  for (std::size_t k = 0; k < boxes; ++k) log_q[k] = std::log(weights[k]);
  std::vector<std::uint64_t> counts(boxes, 0);

  // Depth-first over boxes; `logp` carries the partial log-probability.
  const std::function<void(std::size_t, std::uint64_t, double)> recurse =
      [&](std::size_t box, std::uint64_t left, double logp) {
        if (box + 1 == boxes) {
          counts[box] = left;
          const double lp = logp - log_factorial(left) + detail::scaled_log(
                                                              static_cast<double>(left), log_q[box]);
          visit(counts, std::exp(lp));
          return;
        }
        for (std::uint64_t c = 0; c <= left; ++c) {
          counts[box] = c;
          recurse(box + 1, left - c,
                  logp - log_factorial(c) +
                      detail::scaled_log(static_cast<double>(c), log_q[box]));
        }
      };
  recurse(0, n, log_factorial(n));
}

/*!
  Exact moments of every q_r, r = 0..n, by enumerating all count vectors.

  Independent of the closed-form route above; used as a test oracle.
*/
inline MomentSet brute_force_moments(const AllocationModel& model) {
  const std::uint64_t n = model.ball_count();
  const std::size_t size = n + 1;
  const double boxes = static_cast<double>(model.box_count());
  std::vector<CompensatedSum<>> first(size);
  std::vector<CompensatedSum<>> second(size * size);
  std::vector<std::uint64_t> histogram(size);
  std::vector<std::uint64_t> occupied;

  for_each_composition(model, [&](std::span<const std::uint64_t> counts, double p) {
    std::fill(histogram.begin(), histogram.end(), 0);
    occupied.clear();
    for (auto c : counts) {
      if (histogram[c]++ == 0) occupied.push_back(c);
    }
    for (auto r : occupied) {
      const double qr = static_cast<double>(histogram[r]) / boxes;
      first[r] += p * qr;
      for (auto t : occupied) {
        second[r * size + t] += p * qr * (static_cast<double>(histogram[t]) / boxes);
      }
    }
  });

  MomentSet out{model, MomentKind::Exact, {}, {}, {}, {}};
  for (std::uint64_t r = 0; r < size; ++r) {
    out.indices.push_back(r);
    out.means[r] = first[r].value();
  }
  for (std::uint64_t r = 0; r < size; ++r) {
    out.variances[r] = second[r * size + r].value() - out.means[r] * out.means[r];
    for (std::uint64_t t = r + 1; t < size; ++t) {
      out.covariances[{r, t}] = second[r * size + t].value() - out.means[r] * out.means[t];
    }
  }
  return out;
}

}  // namespace occupancy
