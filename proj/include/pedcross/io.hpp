#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pedcross/dqn.hpp"
#include "pedcross/evaluator.hpp"
#include "pedcross/fitter.hpp"
#include "pedcross/grid.hpp"
#include "pedcross/scenario.hpp"
#include "pedcross/trainer.hpp"

namespace pedcross {

// desk: 64/64 net, Adam at 1e-3, short runs; paper: 512/256, SGD at 1e-4
// and the long schedule;
// custom: train.* keys are taken as given.
enum class Profile { desk, paper, custom };

std::string to_string(Profile p);
Profile parse_profile(const std::string& text);

struct SynthSpec {
  std::vector<ModelParams> cells;  // one synthetic participant per entry
  int reps = 5;                    // rollouts per evaluation scenario
};

struct ExperimentConfig {
  std::optional<Variant> variant;
  Profile profile = Profile::desk;
  WorldConfig world;
  PerceptionConfig perception;
  TrainConfig train;
  ParamGrid grid;
  bool grid_given = false;
  int n_reps = 200;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::optional<double> min_final_reward;
  std::string weights_path;
  std::string trials_path;
  std::string samples_path;
  std::string reference_path;
  SynthSpec synth;
  // (log_lik, k) pairs echoed through the AIC table.
  std::vector<std::pair<double, int>> aic_pairs;

  // Grid to use for the variant: the configured grid, or the standard grid
  // when none was given.
  ParamGrid effective_grid() const;
};

// Episode budget and layer sizes of a profile; custom returns cfg unchanged.
TrainConfig apply_profile(TrainConfig cfg, Profile profile, Variant variant);

// Plain key=value lines; '#' starts a comment. Unknown keys are errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

// Catalog CSV: id,kind,v0_mps,d0_m,tau0_s,dstop_m
void write_catalog(std::ostream& out, const std::vector<ScenarioSpec>& catalog);
std::vector<ScenarioSpec> read_catalog(std::istream& in);

// Header "variant,in_dim,h1,h2", then per layer (hidden1, hidden2, value,
// advantage) one row per output unit and one bias row.
void write_weights(std::ostream& out, const QNet& net);
QNet read_weights(std::istream& in);
QNet load_weights(const std::filesystem::path& path);

void write_reward_log(std::ostream& out, const std::vector<RewardLogEntry>& log);
std::vector<RewardLogEntry> read_reward_log(std::istream& in);

// participant_id,scenario_id,cit. Unknown scenario ids and non-positive CITs
// are reported with their line number.
void write_trials(std::ostream& out, const std::vector<TrialRecord>& trials);
std::vector<TrialRecord> read_trials(std::istream& in, const std::vector<ScenarioSpec>& catalog);

// scenario_id,sigma_v,c,rep,go_step,cit_s,outcome; empty fields for trials
// that never crossed.
void write_cit_samples(std::ostream& out, const std::vector<GridTrial>& trials);
std::vector<GridTrial> read_cit_samples(std::istream& in);

// CITs per scenario from either a trials file or a CIT sample file.
std::map<std::string, std::vector<double>> read_reference(std::istream& in);

void write_fits(std::ostream& out, const std::vector<FitResult>& fits);
std::vector<FitResult> read_fits(std::istream& in);

// Opens for writing or throws std::runtime_error naming the path.
std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

}  // namespace pedcross
