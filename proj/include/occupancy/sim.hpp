#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "approx.hpp"
#include "error.hpp"
#include "exact.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "sampling.hpp"
#include "welford.hpp"

namespace occupancy {

struct SimulationOptions {
  std::uint64_t replicates = 50'000;
  std::uint64_t seed = 42;
  unsigned workers = 1;
  /// Occupancy indices whose pairwise sample covariances are tracked.
  std::vector<std::uint64_t> covariance_indices;
  /// Verify sum_r N_r = N and sum_r r N_r = n on every replicate.
  bool check_conservation = false;
};

/// Replicates are reduced in fixed-size chunks so results do not depend on the worker count.
inline constexpr std::uint64_t kReplicateChunk = 2048;

/*!
  Empirical moments of q_r, r = 0..n, over independent replicates.

  Replicate i draws from RandomStream(seed, i). Variances and covariances
  use the 1/(m-1) correction; std_errors are those of the sample means.
*/
struct SimulationSummary {
  AllocationModel model;
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  std::map<std::uint64_t, double> means;
  std::map<std::uint64_t, double> variances;
  std::map<std::pair<std::uint64_t, std::uint64_t>, double> covariances;
  std::map<std::uint64_t, double> std_errors;
  /// Standard errors of the sample variances.
  std::map<std::uint64_t, double> variance_std_errors;

  friend bool operator==(const SimulationSummary& a, const SimulationSummary& b) {
    return a.replicates == b.replicates && a.seed == b.seed && a.means == b.means &&
           a.variances == b.variances && a.covariances == b.covariances &&
           a.std_errors == b.std_errors && a.variance_std_errors == b.variance_std_errors;
  }
};

namespace detail {

inline MomentAccumulator simulate_chunk(const AllocationModel& model,
                                        const AllocationSampler& sampler,
                                        const SimulationOptions& opts,
                                        const std::vector<MomentAccumulator::Pair>& pairs,
                                        std::uint64_t first, std::uint64_t last) {
  const std::uint64_t n = model.ball_count();
  const std::size_t boxes = model.box_count();
  const double inv_boxes = 1.0 / static_cast<double>(boxes);
  MomentAccumulator acc(n + 1, pairs);
  std::vector<std::uint64_t> counts(boxes);
  std::vector<std::uint64_t> histogram(n + 1);
  std::vector<double> proportions(n + 1);
  for (std::uint64_t i = first; i < last; ++i) {
    RandomStream rng(opts.seed, i);
    sampler(rng, counts);
    std::fill(histogram.begin(), histogram.end(), 0);
    for (auto c : counts) ++histogram[c];
    if (opts.check_conservation) {
      std::uint64_t occupied = 0;
      std::uint64_t balls = 0;
      for (std::uint64_t r = 0; r <= n; ++r) {
        occupied += histogram[r];
        balls += r * histogram[r];
      }
      if (occupied != boxes || balls != n) {
        throw Error(ErrorCode::RangeError,
                    "conservation violated in replicate " + std::to_string(i));
      }
    }
    for (std::uint64_t r = 0; r <= n; ++r) {
      proportions[r] = static_cast<double>(histogram[r]) * inv_boxes;
    }
    acc.add(proportions);
  }
  return acc;
}

}  // namespace detail

inline SimulationSummary simulate(const AllocationModel& model, const SimulationOptions& opts) {
  if (opts.replicates < 2) throw Error(ErrorCode::RangeError, "need at least 2 replicates");
  const std::uint64_t n = model.ball_count();
  for (auto r : opts.covariance_indices) detail::check_index(model, r);

  std::vector<std::uint64_t> tracked = opts.covariance_indices;
  std::sort(tracked.begin(), tracked.end());
  tracked.erase(std::unique(tracked.begin(), tracked.end()), tracked.end());
  std::vector<MomentAccumulator::Pair> pairs;
  for (std::size_t a = 0; a < tracked.size(); ++a) {
    for (std::size_t b = a + 1; b < tracked.size(); ++b) pairs.emplace_back(tracked[a], tracked[b]);
  }

  const AllocationSampler sampler(model);
  const std::uint64_t chunks = (opts.replicates + kReplicateChunk - 1) / kReplicateChunk;
  std::vector<std::optional<MomentAccumulator>> partial(chunks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    try {
      for (std::uint64_t c = next++; c < chunks; c = next++) {
        const std::uint64_t first = c * kReplicateChunk;
        const std::uint64_t last = std::min(opts.replicates, first + kReplicateChunk);
        partial[c] = detail::simulate_chunk(model, sampler, opts, pairs, first, last);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = chunks;
    }
  };
  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::uint64_t>(opts.workers, 1, chunks));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  if (failure) std::rethrow_exception(failure);

  MomentAccumulator total(n + 1, pairs);
  for (auto& p : partial) total.merge(*p);

  SimulationSummary out{model, opts.replicates, opts.seed, {}, {}, {}, {}, {}};
  for (std::uint64_t r = 0; r <= n; ++r) {
    out.means[r] = total.mean(r);
    out.variances[r] = total.variance(r);
    out.std_errors[r] = total.std_error_of_mean(r);
    out.variance_std_errors[r] = total.std_error_of_variance(r);
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    out.covariances[{pairs[p].first, pairs[p].second}] = total.covariance(p);
  }
  return out;
}

/// One row of the simulated-versus-theory table; unavailable fields are NaN.
struct SimulationRow {
  std::uint64_t n = 0;
  std::uint64_t boxes = 0;
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  std::uint64_t r = 0;
  double sim_mean = 0.0;
  double sim_var = 0.0;
  double se_mean = 0.0;
  double exact_mean = 0.0;
  double approx_mean = 0.0;
  double diff_mean = 0.0;
  double bound_lo_mean = 0.0;
  double bound_hi_mean = 0.0;
  double se_var = 0.0;
  double exact_var = 0.0;
  double approx_var = 0.0;
  double diff_var = 0.0;
  double bound_lo_var = 0.0;
  double bound_hi_var = 0.0;
};

/*!
  Rows comparing a simulation with exact values and the order-1/n
  approximations. diff = simulated - approximation; bound columns hold the
  certified n^-2 band for that difference, or NaN when q_1 > 1/4.
*/
inline std::vector<SimulationRow> simulation_rows(const SimulationSummary& s,
                                                  std::span<const std::uint64_t> indices) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const auto& model = s.model;
  const std::uint64_t n = model.ball_count();
  const double inv_n2 = n > 0 ? 1.0 / (static_cast<double>(n) * static_cast<double>(n)) : nan;
  std::vector<SimulationRow> rows;
  for (auto r : indices) {
    detail::check_index(model, r);
    SimulationRow row{n, model.box_count(), s.replicates, s.seed, r};
    row.sim_mean = s.means.at(r);
    row.sim_var = s.variances.at(r);
    row.se_mean = s.std_errors.at(r);
    row.se_var = s.variance_std_errors.at(r);
    row.exact_mean = exact_mean(model, r);
    row.exact_var = exact_variance(model, r);
    row.approx_mean = row.approx_var = nan;
    row.bound_lo_mean = row.bound_hi_mean = row.bound_lo_var = row.bound_hi_var = nan;
    if (n > 0) {
      row.approx_mean = mean_expansion(model, r).value();
      row.approx_var = variance_expansion(model, r).value();
      if (bounds_applicable(model)) {
        const auto bm = inv_n2 * r1_bounds(r, model.beta());
        const auto bv = inv_n2 * variance_bounds(r, model.alpha(), model.beta());
        row.bound_lo_mean = bm.lower;
        row.bound_hi_mean = bm.upper;
        row.bound_lo_var = bv.lower;
        row.bound_hi_var = bv.upper;
      }
    }
    row.diff_mean = row.sim_mean - row.approx_mean;
    row.diff_var = row.sim_var - row.approx_var;
    rows.push_back(row);
  }
  return rows;
}

/// Default figure grid: n = 10, 15, ..., 100.
inline std::vector<std::uint64_t> figure1_default_grid() {
  std::vector<std::uint64_t> grid;
  for (std::uint64_t n = 10; n <= 100; n += 5) grid.push_back(n);
  return grid;
}

/*!
  Simulated mean and variance of the empty-box proportion for an
  equiprobable model with `boxes` boxes at each n, against the equiprobable
  envelope. Row n is simulated with seed mix_seed(seed, n), which is the
  value reported in its seed column.
*/
inline std::vector<SimulationRow> figure1_data(std::uint64_t boxes,
                                               std::span<const std::uint64_t> n_values,
                                               std::uint64_t replicates, std::uint64_t seed,
                                               unsigned workers = 1) {
  if (boxes < 4) throw Error(ErrorCode::ApplicabilityError, "figure needs N >= 4");
  std::vector<SimulationRow> rows;
  const auto profile = equiprobable_profile(boxes);
  for (auto n : n_values) {
    const AllocationModel model(n, profile);
    SimulationOptions opts;
    opts.replicates = replicates;
    opts.seed = mix_seed(seed, n);
    opts.workers = workers;
    const auto summary = simulate(model, opts);
    const auto mean_env = equiprobable_envelope(n, boxes, EnvelopeQuantity::Mean);
    const auto var_env = equiprobable_envelope(n, boxes, EnvelopeQuantity::Variance);
    SimulationRow row{n, boxes, replicates, opts.seed, 0};
    row.sim_mean = summary.means.at(0);
    row.sim_var = summary.variances.at(0);
    row.se_mean = summary.std_errors.at(0);
    row.se_var = summary.variance_std_errors.at(0);
    row.exact_mean = exact_mean(model, 0);
    row.exact_var = exact_variance(model, 0);
    row.approx_mean = mean_env.approximation;
    row.approx_var = var_env.approximation;
    row.diff_mean = row.sim_mean - row.approx_mean;
    row.diff_var = row.sim_var - row.approx_var;
    row.bound_lo_mean = mean_env.lower;
    row.bound_hi_mean = mean_env.upper;
    row.bound_lo_var = var_env.lower;
    row.bound_hi_var = var_env.upper;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace occupancy
