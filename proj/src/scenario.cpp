#include "pedcross/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include "pedcross/strings.hpp"

namespace pedcross {

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::constant: return "constant";
    case ScenarioKind::yielding: return "yielding";
    case ScenarioKind::infeasible_training: return "infeasible_training";
  }
  return "constant";
}

ScenarioKind parse_scenario_kind(const std::string& text) {
  if (text == "constant") return ScenarioKind::constant;
  if (text == "yielding") return ScenarioKind::yielding;
  if (text == "infeasible_training") return ScenarioKind::infeasible_training;
  throw std::invalid_argument("unknown scenario kind '" + text + "'");
}

void ScenarioSpec::validate() const {
  if (!(v0 > 0.0) || !(d0 > 0.0)) {
    throw std::invalid_argument("scenario " + id + ": v0 and d0 must be positive");
  }
  if (std::abs(tau0 - d0 / v0) > 1e-6 * tau0) {
    throw std::invalid_argument("scenario " + id + ": tau0 inconsistent with d0/v0");
  }
  if (kind == ScenarioKind::yielding) {
    if (!d_stop || !(*d_stop > 0.0) || !(*d_stop < d0)) {
      throw std::invalid_argument("scenario " + id + ": yielding requires 0 < d_stop < d0");
    }
  } else if (d_stop) {
    throw std::invalid_argument("scenario " + id + ": d_stop only valid for yielding");
  }
}

int WorldConfig::max_steps() const {
  return static_cast<int>(std::ceil(max_episode_s / dt - 1e-9));
}

void WorldConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string("world config: ") + name + " must be positive");
  };
  positive(dt, "dt");
  positive(road_width, "road_width");
  positive(walk_speed, "walk_speed");
  positive(eye_height, "eye_height");
  positive(vehicle_length, "vehicle_length");
  positive(vehicle_width, "vehicle_width");
  positive(lane_near_edge, "lane_near_edge");
  positive(ped_radius, "ped_radius");
  positive(max_episode_s, "max_episode_s");
  if (motor_delay_std < 0.0) throw std::invalid_argument("world config: motor_delay_std must be >= 0");
  if (lane_near_edge + vehicle_width > road_width) {
    throw std::invalid_argument("world config: vehicle lane band exceeds road width");
  }
}

namespace {

ScenarioSpec make(ScenarioKind kind, double v0, double d0, std::optional<double> d_stop = std::nullopt) {
  ScenarioSpec s;
  s.kind = kind;
  s.v0 = v0;
  s.d0 = d0;
  s.tau0 = d0 / v0;
  s.d_stop = d_stop;
  switch (kind) {
    case ScenarioKind::constant:
      s.id = "const_v" + format_fixed(v0, 2) + "_d" + format_fixed(d0, 2);
      break;
    case ScenarioKind::yielding:
      s.id = "yield_v" + format_fixed(v0, 2) + "_d" + format_fixed(d0, 2) + "_s" + format_fixed(*d_stop, 0);
      break;
    case ScenarioKind::infeasible_training:
      s.id = "train_v" + format_fixed(v0, 2) + "_d" + format_fixed(d0, 2);
      break;
  }
  return s;
}

}  // namespace

std::vector<ScenarioSpec> build_catalog(const WorldConfig&) {
  constexpr double slow = 6.94;
  constexpr double fast = 13.89;
  using K = ScenarioKind;
  return {
      make(K::constant, slow, 15.90),
      make(K::constant, fast, 31.81),
      make(K::constant, slow, 31.81),
      make(K::constant, fast, 63.61),
      make(K::constant, slow, 47.71),
      make(K::constant, fast, 95.42),
      make(K::yielding, slow, 15.90, 4.0),
      make(K::yielding, fast, 31.81, 4.0),
      make(K::yielding, fast, 31.81, 8.0),
      make(K::yielding, slow, 31.81, 4.0),
      make(K::yielding, fast, 63.61, 4.0),
      make(K::yielding, fast, 63.61, 8.0),
      make(K::yielding, slow, 47.71, 4.0),
      make(K::yielding, fast, 95.42, 4.0),
      make(K::infeasible_training, slow, slow * 1.0),
      make(K::infeasible_training, fast, fast * 1.0),
  };
}

std::vector<ScenarioSpec> evaluation_scenarios(const std::vector<ScenarioSpec>& catalog) {
  std::vector<ScenarioSpec> out;
  for (const auto& s : catalog) {
    if (s.is_evaluation()) out.push_back(s);
  }
  return out;
}

const ScenarioSpec& find_scenario(const std::vector<ScenarioSpec>& catalog, const std::string& id) {
  for (const auto& s : catalog) {
    if (s.id == id) return s;
  }
  throw std::invalid_argument("unknown scenario id '" + id + "'");
}

VehicleKinematics vehicle_state(const ScenarioSpec& spec, double time) {
  if (time < 0.0) throw std::invalid_argument("vehicle_state: time must be >= 0");
  if (spec.kind != ScenarioKind::yielding) {
    return {spec.d0 - spec.v0 * time, spec.v0};
  }
  if (!spec.d_stop || !(*spec.d_stop < spec.d0)) {
    throw std::invalid_argument("vehicle_state: yielding scenario " + spec.id + " needs d_stop < d0");
  }
  const double decel = spec.v0 * spec.v0 / (2.0 * (spec.d0 - *spec.d_stop));
  const double stop_time = spec.v0 / decel;
  if (time >= stop_time) return {*spec.d_stop, 0.0};
  return {spec.d0 - spec.v0 * time + 0.5 * decel * time * time, spec.v0 - decel * time};
}

std::optional<double> vehicle_pass_time(const ScenarioSpec& spec, const WorldConfig& cfg) {
  if (spec.kind == ScenarioKind::yielding) return std::nullopt;
  return (spec.d0 + cfg.vehicle_length + cfg.ped_radius) / spec.v0;
}

}  // namespace pedcross
