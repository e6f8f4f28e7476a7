#include <CLI11.hpp>

#include <map>
#include <string>

#include <occupancy/cli.hpp>

namespace cli = occupancy::cli;

int main(int argc, char** argv) {
  CLI::App app{"Occupancy statistics for the multinomial allocation model"};
  app.require_subcommand(1);

  cli::RunConfig config;
  std::vector<std::uint64_t> t_list;
  std::string format = "csv";

  const std::map<std::string, cli::Format> formats{{"csv", cli::Format::Csv},
                                                   {"json", cli::Format::Json}};

  auto common = [&](CLI::App* sub) {
    sub->add_option("-o,--output", config.output, "Output path (default: stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  auto model_opts = [&](CLI::App* sub) {
    sub->add_option("--profile", config.profile_spec, "equi:N | powerlaw:N:s | file:PATH")
        ->capture_default_str();
    sub->add_option("--n", config.n, "Number of balls")->required();
    sub->add_option("--r", config.r_list, "Occupancy indices")->capture_default_str();
    sub->add_option("--t", t_list, "Second indices for covariances");
  };
  auto sim_opts = [&](CLI::App* sub) {
    sub->add_option("--replicates", config.replicates)->capture_default_str();
    sub->add_option("--seed", config.seed)->capture_default_str();
    sub->add_option("--workers", config.workers)->capture_default_str();
  };

  struct Entry {
    cli::Command command;
    CLI::App* app;
  };
  std::vector<Entry> entries;

  auto* exact = app.add_subcommand("exact", "Exact finite-n moments");
  model_opts(exact);
  common(exact);
  entries.push_back({cli::Command::Exact, exact});

  auto* approx = app.add_subcommand("approx", "Order-1/n approximations next to exact values");
  model_opts(approx);
  common(approx);
  entries.push_back({cli::Command::Approx, approx});

  auto* bounds = app.add_subcommand("bounds", "Remainders with their certified intervals");
  model_opts(bounds);
  common(bounds);
  bounds->add_flag("--strict", config.strict, "Exit 3 if not applicable, 1 on violation");
  entries.push_back({cli::Command::Bounds, bounds});

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo occupancy moments");
  model_opts(simulate);
  sim_opts(simulate);
  common(simulate);
  entries.push_back({cli::Command::Simulate, simulate});

  auto* figure1 = app.add_subcommand("figure1", "Simulated empty-box mean/variance versus the envelope");
  figure1->add_option("--boxes", config.boxes, "Number of boxes N")->capture_default_str();
  figure1->add_option("--n-values", config.n_values, "Ball counts")->capture_default_str();
  sim_opts(figure1);
  common(figure1);
  entries.push_back({cli::Command::Figure1, figure1});

  auto* verify = app.add_subcommand("verify", "Certify every bound on the built-in corpus");
  verify->add_option("--max-index", config.max_index)->capture_default_str();
  common(verify);
  entries.push_back({cli::Command::Verify, verify});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kInvalidConfig;
  }

  for (const auto& e : entries) {
    if (e.app->parsed()) config.command = e.command;
  }
  if (!t_list.empty()) config.t_list = t_list;
  config.format = formats.at(format);
  return cli::run(config);
}
