#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pedcross/episode.hpp"
#include "pedcross/grid.hpp"
#include "pedcross/qnet.hpp"

namespace pedcross {

struct TrialResult {
  std::string scenario_id;
  ModelParams params;
  std::optional<double> cit;  // present iff Go was taken
  std::optional<int> go_step;
  TerminalKind outcome = TerminalKind::none;
};

struct RolloutOptions {
  bool greedy = true;
  double epsilon = 0.0;  // used when greedy is false
};

TrialResult rollout(const QNet& net, const ScenarioSpec& spec, const ModelParams& params, const SimContext& ctx,
                    Rng& rng, const RolloutOptions& opts = {});

struct CitKey {
  std::string scenario_id;
  double sigma_v = 0.0;
  double c = 0.0;

  friend auto operator<=>(const CitKey&, const CitKey&) = default;
  friend bool operator==(const CitKey&, const CitKey&) = default;
};

// Sorted CIT values per (scenario, cell). A key with an empty list means the
// cell was simulated but no trial crossed.
using CitSampleSet = std::map<CitKey, std::vector<double>>;

struct GridTrial {
  int rep = 0;
  TrialResult result;
};

struct GridSimulation {
  std::vector<GridTrial> trials;  // ordered by scenario, cell, rep
  CitSampleSet samples;
};

CitSampleSet collect_cits(const std::vector<GridTrial>& trials);

// n_reps greedy rollouts per (evaluation scenario, cell). Each pair draws
// from its own stream keyed by (seed, scenario id, cell indices), so the
// result does not depend on the worker count.
GridSimulation simulate_grid(const QNet& net, const std::vector<ScenarioSpec>& catalog, const ParamGrid& grid,
                             int n_reps, const SimContext& ctx, std::uint64_t seed, unsigned workers = 1);

// Fraction of CITs below tau0; constant-speed scenarios only.
double gap_acceptance_rate(const std::vector<double>& cits, const ScenarioSpec& spec);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

// Mean over scenarios of |predicted mean - observed mean|.
double mad(const std::map<std::string, double>& predicted_means, const std::map<std::string, double>& observed_means);

double mean(const std::vector<double>& xs);

}  // namespace pedcross
