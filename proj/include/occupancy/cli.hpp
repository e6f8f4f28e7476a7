#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "approx.hpp"
#include "error.hpp"
#include "exact.hpp"
#include "model.hpp"
#include "sim.hpp"
#include "table.hpp"

namespace occupancy::cli {

enum class Command { Exact, Approx, Bounds, Simulate, Figure1, Verify };
enum class Format { Csv, Json };

enum ExitCode : int {
  kSuccess = 0,
  kBoundViolation = 1,
  kInvalidConfig = 2,
  kApplicability = 3,
};

struct RunConfig {
  Command command = Command::Exact;
  std::string profile_spec = "equi:100";
  std::uint64_t n = 0;
  std::vector<std::uint64_t> r_list{0};
  std::optional<std::vector<std::uint64_t>> t_list;
  std::uint64_t replicates = 50'000;
  std::uint64_t seed = 42;
  /// Empty means standard output.
  std::string output;
  Format format = Format::Csv;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  /// bounds: exit 3 when not applicable, 1 on a violated bound.
  bool strict = false;
  /// figure1 grid.
  std::uint64_t boxes = 100;
  std::vector<std::uint64_t> n_values = figure1_default_grid();
  /// verify: largest occupancy index certified per model.
  std::uint64_t max_index = kCorpusMaxIndex;
};

namespace detail {

inline void validate(const RunConfig& config) {
  auto in_range = [&](const std::vector<std::uint64_t>& list, std::string_view name) {
    for (auto r : list) {
      if (r > config.n) {
        throw Error(ErrorCode::RangeError,
                    std::string(name) + " entry " + std::to_string(r) + " exceeds n");
      }
    }
  };
  switch (config.command) {
    case Command::Exact:
    case Command::Approx:
    case Command::Bounds:
    case Command::Simulate:
      in_range(config.r_list, "r");
      if (config.t_list) in_range(*config.t_list, "t");
      break;
    case Command::Figure1:
    case Command::Verify:
      break;
  }
  if (config.command == Command::Simulate && config.replicates < 2) {
    throw Error(ErrorCode::RangeError, "need at least 2 replicates");
  }
}

/// (r, t) pairs with r != t drawn from r_list x t_list.
inline std::vector<std::pair<std::uint64_t, std::uint64_t>> covariance_requests(
    const RunConfig& config) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  if (!config.t_list) return out;
  for (auto r : config.r_list) {
    for (auto t : *config.t_list) {
      if (r != t) out.emplace_back(r, t);
    }
  }
  return out;
}

inline std::vector<Cell> model_cells(const std::string& id, const AllocationModel& m) {
  return {id, m.ball_count(), std::uint64_t{m.box_count()}};
}

inline const std::vector<std::string>& bound_columns() {
  static const std::vector<std::string> cols{"model_id", "n",     "N",     "r",          "t",
                                             "kind",     "remainder", "lower", "upper",
                                             "applicable", "satisfied"};
  return cols;
}

inline std::vector<Cell> bound_cells(const std::string& id, const AllocationModel& m,
                                     const BoundReport& b) {
  auto row = model_cells(id, m);
  row.insert(row.end(), {Cell{b.r},
                         b.kind == BoundKind::R2Cov ? Cell{b.t} : Cell{Blank{}},
                         std::string(to_string(b.kind)), b.remainder, b.lower, b.upper,
                         b.applicable, b.satisfied});
  return row;
}

inline Table simulation_table(const std::vector<SimulationRow>& rows) {
  Table table{{"n", "N", "replicates", "seed", "r", "sim_mean", "sim_var", "se_mean",
               "exact_mean", "approx_mean", "diff_mean", "bound_lo_mean", "bound_hi_mean",
               "se_var", "exact_var", "approx_var", "diff_var", "bound_lo_var", "bound_hi_var"},
              {}};
  for (const auto& r : rows) {
    table.rows.push_back({r.n, r.boxes, r.replicates, r.seed, r.r, r.sim_mean, r.sim_var,
                          r.se_mean, r.exact_mean, r.approx_mean, r.diff_mean, r.bound_lo_mean,
                          r.bound_hi_mean, r.se_var, r.exact_var, r.approx_var, r.diff_var,
                          r.bound_lo_var, r.bound_hi_var});
  }
  return table;
}

}  // namespace detail

/// Table plus the exit status implied by its content.
struct Report {
  Table table;
  int status = kSuccess;
};

inline Report build_report(const RunConfig& config) {
  detail::validate(config);
  const auto pairs = detail::covariance_requests(config);

  if (config.command == Command::Figure1) {
    return {detail::simulation_table(figure1_data(config.boxes, config.n_values,
                                                  config.replicates, config.seed,
                                                  config.workers))};
  }

  if (config.command == Command::Verify) {
    Report report{{detail::bound_columns(), {}}};
    for (const auto& entry : verification_corpus()) {
      for (const auto& b : certify(entry.model, config.max_index)) {
        report.table.rows.push_back(detail::bound_cells(entry.id, entry.model, b));
        if (b.violated()) report.status = kBoundViolation;
      }
    }
    return report;
  }

  const AllocationModel model(config.n, parse_profile_spec(config.profile_spec));
  const auto& id = config.profile_spec;

  switch (config.command) {
    case Command::Exact: {
      Report report{{{"model_id", "n", "N", "r", "t", "quantity", "value"}, {}}};
      for (auto r : config.r_list) {
        auto row = detail::model_cells(id, model);
        row.insert(row.end(), {Cell{r}, Cell{Blank{}}, std::string("mean"), exact_mean(model, r)});
        report.table.rows.push_back(row);
        row = detail::model_cells(id, model);
        row.insert(row.end(),
                   {Cell{r}, Cell{Blank{}}, std::string("variance"), exact_variance(model, r)});
        report.table.rows.push_back(row);
      }
      for (auto [r, t] : pairs) {
        auto row = detail::model_cells(id, model);
        row.insert(row.end(),
                   {Cell{r}, Cell{t}, std::string("covariance"), exact_covariance(model, r, t)});
        report.table.rows.push_back(row);
      }
      return report;
    }
    case Command::Approx: {
      Report report{{{"model_id", "n", "N", "r", "t", "quantity", "leading", "correction",
                      "approximation", "exact"},
                     {}}};
      auto emit = [&](std::uint64_t r, Cell t, std::string quantity, const ApproxExpansion& e,
                      double exact) {
        auto row = detail::model_cells(id, model);
        row.insert(row.end(), {Cell{r}, t, std::move(quantity), e.leading, e.correction,
                               e.value(), exact});
        report.table.rows.push_back(row);
      };
      for (auto r : config.r_list) {
        emit(r, Blank{}, "mean", mean_expansion(model, r), exact_mean(model, r));
        emit(r, Blank{}, "variance", variance_expansion(model, r), exact_variance(model, r));
      }
      for (auto [r, t] : pairs) {
        emit(r, t, "covariance", covariance_expansion(model, r, t), exact_covariance(model, r, t));
      }
      return report;
    }
    case Command::Bounds: {
      Report report{{detail::bound_columns(), {}}};
      std::vector<BoundReport> reports;
      for (auto r : config.r_list) {
        reports.push_back(r0_report(model, r));
        reports.push_back(r1_report(model, r));
        reports.push_back(r2_var_report(model, r));
      }
      for (auto [r, t] : pairs) reports.push_back(r2_cov_report(model, r, t));
      for (const auto& b : reports) {
        report.table.rows.push_back(detail::bound_cells(id, model, b));
        if (config.strict && b.violated()) report.status = kBoundViolation;
      }
      if (config.strict && !bounds_applicable(model)) report.status = kApplicability;
      return report;
    }
    case Command::Simulate: {
      SimulationOptions opts;
      opts.replicates = config.replicates;
      opts.seed = config.seed;
      opts.workers = config.workers;
      const auto summary = simulate(model, opts);
      return {detail::simulation_table(simulation_rows(summary, config.r_list))};
    }
    case Command::Figure1:
    case Command::Verify:
      break;
  }
  throw Error(ErrorCode::ParseError, "unhandled command");
}

/*!
  Runs one command, writing its table to config.output (or `out` when
  empty) and diagnostics to `err`. Returns the process exit status.
*/
inline int run(const RunConfig& config, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  Report report;
  try {
    report = build_report(config);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::ApplicabilityError ? kApplicability : kInvalidConfig;
  }
  std::ofstream file;
  std::ostream* sink = &out;
  if (!config.output.empty()) {
    file.open(config.output);
    if (!file) {
      err << "error: cannot open output file '" << config.output << "'\n";
      return kInvalidConfig;
    }
    sink = &file;
  }
  if (config.format == Format::Json) {
    report.table.write_json(*sink);
  } else {
    report.table.write_csv(*sink);
  }
  if (report.status == kBoundViolation) err << "bound violation detected\n";
  return report.status;
}

}  // namespace occupancy::cli
