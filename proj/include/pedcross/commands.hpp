#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "pedcross/io.hpp"

namespace pedcross {

// Inputs shared by the subcommands. Empty paths fall back to the config.
struct CommandArgs {
  ExperimentConfig config;
  std::filesystem::path out_dir;
  std::filesystem::path weights;
  std::filesystem::path samples;
  std::filesystem::path trials;
  bool synthesize_trials = false;
};

// Exit status when the final logged mean reward is below train.min_final_reward.
inline constexpr int kExitNotConverged = 3;

// Each returns a process exit status; invalid input throws.
int cmd_train(const CommandArgs& args, std::ostream& log);
int cmd_simulate(const CommandArgs& args, std::ostream& log);
int cmd_fit(const CommandArgs& args, std::ostream& log);
int cmd_report(const CommandArgs& args, std::ostream& log);

}  // namespace pedcross
