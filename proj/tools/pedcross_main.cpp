// Command-line front end: train, simulate, fit, report.
#include <CLI11.hpp>
#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "pedcross/commands.hpp"

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "key=value config file");
  cmd->add_option("--seed", c.seed, "random seed (overrides the config)");
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
}

pedcross::CommandArgs make_args(const Common& c) {
  pedcross::CommandArgs args;
  if (!c.config.empty()) args.config = pedcross::load_config(c.config);
  if (c.seed) args.config.seed = *c.seed;
  args.out_dir = c.out;
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pedestrian crossing decision models: train, simulate, fit, report"};
  app.require_subcommand(1);

  Common train_opts, sim_opts, fit_opts, report_opts;
  std::string weights, samples, trials, reference;
  bool synthesize = false;

  auto* train = app.add_subcommand("train", "train a policy and write weights.csv and reward_log.csv");
  add_common(train, train_opts);

  auto* simulate = app.add_subcommand("simulate", "roll out a policy over the parameter grid");
  add_common(simulate, sim_opts);
  simulate->add_option("--weights", weights, "weights file (defaults to the config's 'weights')");
  simulate->add_flag("--synthesize-trials", synthesize, "also write synthetic participant trials");

  auto* fit = app.add_subcommand("fit", "fit (sigma_v, c) per participant and pooled");
  add_common(fit, fit_opts);
  fit->add_option("--samples", samples, "CIT samples from simulate");
  fit->add_option("--trials", trials, "observed trials CSV");

  auto* report = app.add_subcommand("report", "write plot-ready tables from an output directory");
  add_common(report, report_opts);
  report->add_option("--reference", reference, "observed trials for the MAD table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return pedcross::cmd_train(make_args(train_opts), std::cout);
    if (simulate->parsed()) {
      auto args = make_args(sim_opts);
      args.weights = weights;
      args.synthesize_trials = synthesize;
      return pedcross::cmd_simulate(args, std::cout);
    }
    if (fit->parsed()) {
      auto args = make_args(fit_opts);
      args.samples = samples;
      args.trials = trials;
      return pedcross::cmd_fit(args, std::cout);
    }
    if (report->parsed()) {
      auto args = make_args(report_opts);
      args.trials = reference;
      return pedcross::cmd_report(args, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
