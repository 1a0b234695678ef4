#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pedcross {

enum class ScenarioKind { constant, yielding, infeasible_training };

std::string to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(const std::string& text);

// One vehicle-approach condition. Distances are longitudinal, measured from
// the crossing line to the vehicle's front bumper.
struct ScenarioSpec {
  std::string id;
  ScenarioKind kind = ScenarioKind::constant;
  double v0 = 0.0;      // m/s
  double d0 = 0.0;      // m
  double tau0 = 0.0;    // s, d0 / v0
  std::optional<double> d_stop;  // m, yielding only

  bool is_evaluation() const { return kind != ScenarioKind::infeasible_training; }

  // Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
};

struct WorldConfig {
  double road_width = 5.85;
  double walk_speed = 1.31;
  double dt = 0.1;
  double eye_height = 1.6;
  double vehicle_length = 4.5;
  double vehicle_width = 2.0;
  double lane_near_edge = 0.4625;
  double ped_radius = 0.25;
  double max_episode_s = 20.0;
  double motor_delay_mean = 0.6;
  double motor_delay_std = 0.2;
  // When false the pedestrian starts walking on the Go step and the motor
  // delay only shifts the recorded crossing initiation time.
  bool delay_before_walk = false;
  double reward_success = 20.0;
  double reward_collision = -20.0;
  double time_penalty_rate = 0.01;

  double lane_center() const { return lane_near_edge + 0.5 * vehicle_width; }

  // Number of steps after which an undecided episode times out.
  int max_steps() const;

  void validate() const;
};

// Table of the 14 experiment conditions followed by the two 1 s TTA
// training-only conditions (one per speed level).
std::vector<ScenarioSpec> build_catalog(const WorldConfig& cfg = {});

std::vector<ScenarioSpec> evaluation_scenarios(const std::vector<ScenarioSpec>& catalog);

const ScenarioSpec& find_scenario(const std::vector<ScenarioSpec>& catalog, const std::string& id);

struct VehicleKinematics {
  double x = 0.0;  // front bumper distance to the crossing line, m
  double v = 0.0;  // m/s
};

// Closed-form vehicle trajectory; time must be >= 0.
VehicleKinematics vehicle_state(const ScenarioSpec& spec, double time);

// Time at which the vehicle's rear has cleared the pedestrian disc, or
// nullopt if it never does (yielding).
std::optional<double> vehicle_pass_time(const ScenarioSpec& spec, const WorldConfig& cfg);

}  // namespace pedcross
