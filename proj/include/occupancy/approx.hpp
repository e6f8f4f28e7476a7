#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "exact.hpp"
#include "model.hpp"
#include "moments.hpp"
#include "special.hpp"

namespace occupancy {

/*!
  A quantity written as leading + correction + remainder_scale * R, where
  correction carries the order-1/n term (already divided by n) and
  remainder_scale is 1/n^2.
*/
struct ApproxExpansion {
  double leading = 0.0;
  double correction = 0.0;
  double remainder_scale = 0.0;

  [[nodiscard]] double value() const noexcept { return leading + correction; }
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  [[nodiscard]] bool contains(double x, double slack = 0.0) const noexcept {
    return lower - slack <= x && x <= upper + slack;
  }
  friend Interval operator+(Interval a, Interval b) noexcept {
    return {a.lower + b.lower, a.upper + b.upper};
  }
  /// Scaling by a non-negative factor.
  friend Interval operator*(double s, Interval a) noexcept { return {s * a.lower, s * a.upper}; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Two-sided remainder bounds are certified when q_1 <= 1/4.
inline constexpr double kBoundApplicabilityLimit = 0.25;

/// Relative slack used when checking a remainder against its interval.
inline constexpr double kBoundSlack = 1e-8;

[[nodiscard]] inline bool bounds_applicable(const AllocationModel& model) noexcept {
  return model.profile().largest() <= kBoundApplicabilityLimit;
}

namespace detail {

inline void check_expansion_args(const AllocationModel& model, std::uint64_t r) {
  if (model.ball_count() == 0) throw Error(ErrorCode::RangeError, "expansions need n >= 1");
  check_index(model, r);
  check_order(r);
}

inline double inv_n(const AllocationModel& model) {
  return 1.0 / static_cast<double>(model.ball_count());
}

/// E[p_r(xi) (xi - r)]
inline double poisson_shift(const AllocationModel& model, std::uint64_t r) {
  const double dr = static_cast<double>(r);
  return e_xi(model, [&](double x) { return poisson_weight(r, x) * (x - dr); });
}

/// exp(log_prefactor) * sum(exp(log_terms)), one exponential per term.
inline double prefactored_sum(double log_prefactor, std::initializer_list<double> log_terms) {
  double acc = 0.0;
  for (double lt : log_terms) acc += std::exp(log_prefactor + lt);
  return acc;
}

inline double safe_log(double x) {
  return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
}

inline void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::RangeError, "beta must be finite and > 0");
  }
}

}  // namespace detail

/// E[q_r] = E[p_r(xi)] + (2n)^-1 E[p_r(xi)(r - (xi - r)^2)] + n^-2 R_1(n, r).
inline ApproxExpansion mean_expansion(const AllocationModel& model, std::uint64_t r) {
  detail::check_expansion_args(model, r);
  const double dr = static_cast<double>(r);
  const double leading = e_xi(model, [&](double x) { return poisson_weight(r, x); });
  const double shape = e_xi(model, [&](double x) {
    const double d = x - dr;
    return poisson_weight(r, x) * (dr - d * d);
  });
  const double inv_n = detail::inv_n(model);
  return {leading, 0.5 * inv_n * shape, inv_n * inv_n};
}

/// V[q_r] = n^-1 (alpha E[p_r(1 - p_r)] - E[p_r(xi)(xi - r)]^2) + n^-2 (R_2(n,r,r) + alpha R_1(n,r)).
inline ApproxExpansion variance_expansion(const AllocationModel& model, std::uint64_t r) {
  detail::check_expansion_args(model, r);
  const double spread = e_xi(model, [&](double x) {
    const double p = poisson_weight(r, x);
    return p * (1.0 - p);
  });
  const double shift = detail::poisson_shift(model, r);
  const double inv_n = detail::inv_n(model);
  return {0.0, inv_n * (model.alpha() * spread - shift * shift), inv_n * inv_n};
}

/// C[q_r, q_t] = -n^-1 (alpha E[p_r p_t] + E[p_r(xi)(xi - r)] E[p_t(xi)(xi - t)]) + n^-2 R_2(n,r,t).
inline ApproxExpansion covariance_expansion(const AllocationModel& model, std::uint64_t r,
                                            std::uint64_t t) {
  if (r == t) throw Error(ErrorCode::EqualIndices, "covariance expansion needs r != t");
  detail::check_expansion_args(model, r);
  detail::check_expansion_args(model, t);
  const double overlap =
      e_xi(model, [&](double x) { return poisson_weight(r, x) * poisson_weight(t, x); });
  const double shifts = detail::poisson_shift(model, r) * detail::poisson_shift(model, t);
  const double inv_n = detail::inv_n(model);
  return {0.0, -inv_n * (model.alpha() * overlap + shifts), inv_n * inv_n};
}

// Residuals: exact value minus the truncated expansion, scaled back to order one.

/// R_0(n, r) = n (E[q_r] - E[p_r(xi)]).
inline double r0_residual(const AllocationModel& model, std::uint64_t r) {
  const auto e = mean_expansion(model, r);
  return static_cast<double>(model.ball_count()) * (exact_mean(model, r) - e.leading);
}

/// R_1(n, r) = n^2 (E[q_r] - leading - correction).
inline double residual_r1(const AllocationModel& model, std::uint64_t r) {
  const auto e = mean_expansion(model, r);
  return ((exact_mean(model, r) - e.leading) - e.correction) / e.remainder_scale;
}

/// R_2(n, r, t) = n^2 (C[q_r, q_t] - correction), r != t.
inline double residual_r2_cov(const AllocationModel& model, std::uint64_t r, std::uint64_t t) {
  const auto e = covariance_expansion(model, r, t);
  return (exact_covariance(model, r, t) - e.correction) / e.remainder_scale;
}

/// R_2(n, r, r) + alpha R_1(n, r) = n^2 (V[q_r] - correction).
inline double residual_r2_var(const AllocationModel& model, std::uint64_t r) {
  const auto e = variance_expansion(model, r);
  return (exact_variance(model, r) - e.correction) / e.remainder_scale;
}

/// -(r!)^-1 beta^r (r^2 + 2) <= R_0 <= (r!)^-1 r (2 beta)^r
inline Interval r0_bounds(std::uint64_t r, double beta) {
  detail::check_order(r);
  detail::check_beta(beta);
  const double dr = static_cast<double>(r);
  const double log_pref = detail::scaled_log(dr, std::log(beta)) - log_factorial(r);
  const double lower = -detail::prefactored_sum(log_pref, {detail::safe_log(dr * dr), std::log(2.0)});
  const double upper =
      detail::prefactored_sum(log_pref, {detail::safe_log(dr) + dr * std::numbers::ln2});
  return {lower, upper};
}

/// -(r!)^-1 beta^r (r^3 2^(r-1) + 4) <= R_1 <= (r!)^-1 beta^r r^2 (2 r^2 + 4 beta^2)
inline Interval r1_bounds(std::uint64_t r, double beta) {
  detail::check_order(r);
  detail::check_beta(beta);
  const double dr = static_cast<double>(r);
  const double log_pref = detail::scaled_log(dr, std::log(beta)) - log_factorial(r);
  const double log_r = detail::safe_log(dr);
  const double lower = -detail::prefactored_sum(
      log_pref, {3.0 * log_r + (dr - 1.0) * std::numbers::ln2, std::log(4.0)});
  const double upper = detail::prefactored_sum(
      log_pref, {std::log(2.0) + 4.0 * log_r, std::log(4.0) + 2.0 * std::log(beta) + 2.0 * log_r});
  return {lower, upper};
}

/// L_2(u, beta) = 12 + 2 beta + 5 (u^3 + beta) 2^u + beta^2 (u^2 + 1)
inline double l2_constant(std::uint64_t u, double beta) {
  const double du = static_cast<double>(u);
  return 12.0 + 2.0 * beta + 5.0 * (du * du * du + beta) * std::exp2(du) +
         beta * beta * (du * du + 1.0);
}

/// K_2(u, beta) = 8 + 12 u^3 2^u + 4 beta u + beta^2 2^(2u+6) u^2
inline double k2_constant(std::uint64_t u, double beta) {
  const double du = static_cast<double>(u);
  return 8.0 + 12.0 * du * du * du * std::exp2(du) + 4.0 * beta * du +
         beta * beta * std::exp2(2.0 * du + 6.0) * du * du;
}

/*!
  Bounds on R_2(n, r, t):
  -(r! t!)^-1 beta^(2u) L_2(u, beta) <= R_2 <= (r! t!)^-1 beta^(2u) K_2(u, beta), u = max(r, t).

  The prefactor is applied term by term in log space so large u does not
  overflow the intermediate powers.
*/
inline Interval r2_bounds(std::uint64_t r, std::uint64_t t, double beta) {
  detail::check_order(r);
  detail::check_order(t);
  detail::check_beta(beta);
  const std::uint64_t u = std::max(r, t);
  const double du = static_cast<double>(u);
  const double lb = std::log(beta);
  const double log_pref = detail::scaled_log(2.0 * du, lb) - log_factorial(r) - log_factorial(t);
  const double log_u = detail::safe_log(du);
  const double ln2 = std::numbers::ln2;
  const double lower = -detail::prefactored_sum(
      log_pref, {std::log(12.0), std::log(2.0) + lb, std::log(5.0) + 3.0 * log_u + du * ln2,
                 std::log(5.0) + lb + du * ln2, 2.0 * lb + 2.0 * log_u, 2.0 * lb});
  const double upper = detail::prefactored_sum(
      log_pref, {std::log(8.0), std::log(12.0) + 3.0 * log_u + du * ln2,
                 std::log(4.0) + lb + log_u, 2.0 * lb + (2.0 * du + 6.0) * ln2 + 2.0 * log_u});
  return {lower, upper};
}

/// Interval for the combined variance remainder R_2(n, r, r) + alpha R_1(n, r).
inline Interval variance_bounds(std::uint64_t r, double alpha, double beta) {
  return r2_bounds(r, r, beta) + alpha * r1_bounds(r, beta);
}

enum class BoundKind { R0, R1, R2Var, R2Cov };

constexpr std::string_view to_string(BoundKind kind) noexcept {
  switch (kind) {
    case BoundKind::R0: return "r0";
    case BoundKind::R1: return "r1";
    case BoundKind::R2Var: return "r2_var";
    case BoundKind::R2Cov: return "r2_cov";
  }
  return "?";
}

/*!
  A remainder together with its certified interval.

  `applicable` records q_1 <= 1/4. `satisfied` is interval membership with
  slack 1e-8 max(1, |lower|, |upper|); it is computed in every case, but
  only an applicable report that is not satisfied counts as a violation.
*/
struct BoundReport {
  BoundKind kind = BoundKind::R1;
  std::uint64_t r = 0;
  std::uint64_t t = 0;
  double remainder = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool applicable = false;
  bool satisfied = false;

  [[nodiscard]] bool violated() const noexcept { return applicable && !satisfied; }
};

[[nodiscard]] inline double bound_slack(Interval b) noexcept {
  return kBoundSlack * std::max({1.0, std::abs(b.lower), std::abs(b.upper)});
}

inline BoundReport make_report(const AllocationModel& model, BoundKind kind, std::uint64_t r,
                               std::uint64_t t, double remainder, Interval bounds) {
  return {kind,         r,
          t,            remainder,
          bounds.lower, bounds.upper,
          bounds_applicable(model), bounds.contains(remainder, bound_slack(bounds))};
}

inline BoundReport r0_report(const AllocationModel& model, std::uint64_t r) {
  return make_report(model, BoundKind::R0, r, r, r0_residual(model, r),
                     r0_bounds(r, model.beta()));
}

inline BoundReport r1_report(const AllocationModel& model, std::uint64_t r) {
  return make_report(model, BoundKind::R1, r, r, residual_r1(model, r),
                     r1_bounds(r, model.beta()));
}

inline BoundReport r2_var_report(const AllocationModel& model, std::uint64_t r) {
  return make_report(model, BoundKind::R2Var, r, r, residual_r2_var(model, r),
                     variance_bounds(r, model.alpha(), model.beta()));
}

inline BoundReport r2_cov_report(const AllocationModel& model, std::uint64_t r, std::uint64_t t) {
  return make_report(model, BoundKind::R2Cov, r, t, residual_r2_cov(model, r, t),
                     r2_bounds(r, t, model.beta()));
}

/// Every report for indices r, t <= min(max_index, n), covariances for r < t with r + t <= n.
inline std::vector<BoundReport> certify(const AllocationModel& model, std::uint64_t max_index) {
  std::vector<BoundReport> out;
  const std::uint64_t top = std::min<std::uint64_t>(max_index, model.ball_count());
  for (std::uint64_t r = 0; r <= top; ++r) {
    out.push_back(r0_report(model, r));
    out.push_back(r1_report(model, r));
    out.push_back(r2_var_report(model, r));
  }
  for (std::uint64_t r = 0; r <= top; ++r) {
    for (std::uint64_t t = r + 1; t <= top && r + t <= model.ball_count(); ++t) {
      out.push_back(r2_cov_report(model, r, t));
    }
  }
  return out;
}

struct CorpusEntry {
  std::string id;
  AllocationModel model;
};

/// Largest occupancy index certified by the shipped corpus.
inline constexpr std::uint64_t kCorpusMaxIndex = 8;

/*!
  The bound-certification corpus: equiprobable N in {4, 10, 100} and
  power-law profiles with q_1 <= 1/4, each at a ladder of ball counts.
*/
inline std::vector<CorpusEntry> verification_corpus() {
  struct Profile {
    std::string id;
    WeightProfile profile;
  };
  const std::vector<Profile> profiles{
      {"equi:4", equiprobable_profile(4)},
      {"equi:10", equiprobable_profile(10)},
      {"equi:100", equiprobable_profile(100)},
      {"powerlaw:10:0.5", powerlaw_profile(10, 0.5)},
      {"powerlaw:50:0.5", powerlaw_profile(50, 0.5)},
      {"powerlaw:50:1", powerlaw_profile(50, 1.0)},
  };
  const std::uint64_t ball_counts[] = {1, 2, 3, 5, 8, 10, 16, 25, 50, 100, 200, 500};
  std::vector<CorpusEntry> out;
  for (const auto& p : profiles) {
    for (auto n : ball_counts) out.push_back({p.id, AllocationModel(n, p.profile)});
  }
  return out;
}

enum class EnvelopeQuantity { Mean, Variance };

/// The order-1/n approximation for an equiprobable model and its n^-2 band around it.
struct Envelope {
  double approximation = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/*!
  Equiprobable closed forms for the empty-box proportion.

  mean:     e^-a - a^2 e^-a / (2n),               band [-4/n^2, 0]
  variance: (a e^-a - a e^-2a - a^2 e^-2a) / n,   band [-(a^2 + 11a + 12)/n^2, 8/n^2]
*/
inline Envelope equiprobable_envelope(std::uint64_t n, std::uint64_t boxes,
                                      EnvelopeQuantity which) {
  if (boxes < 4) throw Error(ErrorCode::ApplicabilityError, "envelope needs N >= 4");
  if (n == 0) throw Error(ErrorCode::RangeError, "envelope needs n >= 1");
  const double dn = static_cast<double>(n);
  const double a = dn / static_cast<double>(boxes);
  const double ea = std::exp(-a);
  const double inv_n2 = 1.0 / (dn * dn);
  if (which == EnvelopeQuantity::Mean) {
    return {ea - 0.5 * a * a * ea / dn, -4.0 * inv_n2, 0.0};
  }
  const double e2a = std::exp(-2.0 * a);
  return {(a * ea - a * e2a - a * a * e2a) / dn, -(a * a + 11.0 * a + 12.0) * inv_n2,
          8.0 * inv_n2};
}

/// True when the mean band half-width 4/n^2 is smaller than the correction a^2 e^-a / (2n).
[[nodiscard]] inline bool mean_envelope_informative(std::uint64_t n, double alpha) noexcept {
  const double dn = static_cast<double>(n);
  return 4.0 / (dn * dn) < 0.5 * alpha * alpha * std::exp(-alpha) / dn;
}

/// Order-1/n approximations of means, variances and covariances for the given indices.
inline MomentSet approx_moments(const AllocationModel& model,
                                std::span<const std::uint64_t> indices) {
  MomentSet out{model, MomentKind::Approx, {indices.begin(), indices.end()}, {}, {}, {}};
  for (auto r : indices) {
    out.means[r] = mean_expansion(model, r).value();
    out.variances[r] = variance_expansion(model, r).value();
  }
  for (auto r : indices) {
    for (auto t : indices) {
      if (r < t) out.covariances[{r, t}] = covariance_expansion(model, r, t).value();
    }
  }
  return out;
}

}  // namespace occupancy
