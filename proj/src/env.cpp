#include "pedcross/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pedcross/perception.hpp"

namespace pedcross {

std::string to_string(TerminalKind kind) {
  switch (kind) {
    case TerminalKind::none: return "none";
    case TerminalKind::arrival: return "arrival";
    case TerminalKind::collision: return "collision";
    case TerminalKind::timeout: return "timeout";
  }
  return "none";
}

TerminalKind parse_terminal_kind(const std::string& text) {
  if (text == "none") return TerminalKind::none;
  if (text == "arrival") return TerminalKind::arrival;
  if (text == "collision") return TerminalKind::collision;
  if (text == "timeout") return TerminalKind::timeout;
  throw std::invalid_argument("unknown outcome '" + text + "'");
}

SimState initial_state(const ScenarioSpec& spec) {
  SimState s;
  s.x_veh = spec.d0;
  s.v_veh = spec.v0;
  return s;
}

bool check_collision(const SimState& state, const WorldConfig& cfg) {
  // Closest point of the rectangle to the disc centre.
  const double lo_x = state.x_veh;
  const double hi_x = state.x_veh + cfg.vehicle_length;
  const double lo_y = cfg.lane_near_edge;
  const double hi_y = cfg.lane_near_edge + cfg.vehicle_width;
  const double cx = std::clamp(0.0, lo_x, hi_x);
  const double cy = std::clamp(state.y_ped, lo_y, hi_y);
  const double dx = cx;
  const double dy = cy - state.y_ped;
  return dx * dx + dy * dy < cfg.ped_radius * cfg.ped_radius;
}

double sample_motor_delay(const WorldConfig& cfg, Rng& rng) {
  if (cfg.motor_delay_std <= 0.0) return std::max(0.0, cfg.motor_delay_mean);
  std::normal_distribution<double> normal(cfg.motor_delay_mean, cfg.motor_delay_std);
  return std::max(0.0, normal(rng));
}

StepOutcome step(const SimState& state, Action action, const ScenarioSpec& spec, const WorldConfig& cfg, Rng& rng) {
  StepOutcome out;
  SimState next = state;
  next.t = state.t + 1;
  const auto veh = vehicle_state(spec, next.t * cfg.dt);
  next.x_veh = veh.x;
  next.v_veh = veh.v;

  switch (state.ped_phase) {
    case PedPhase::waiting:
      if (action == Action::go) {
        out.inverse_tau_at_go = inverse_tau(state.x_veh, state.v_veh);
        out.motor_delay = sample_motor_delay(cfg, rng);
        if (cfg.delay_before_walk && out.motor_delay > 0.0) {
          next.ped_phase = PedPhase::delaying;
          next.delay_remaining = out.motor_delay;
        } else {
          next.ped_phase = PedPhase::walking;
        }
      }
      break;
    case PedPhase::delaying:
      next.delay_remaining = state.delay_remaining - cfg.dt;
      if (next.delay_remaining <= 1e-12) {
        next.delay_remaining = 0.0;
        next.ped_phase = PedPhase::walking;
      }
      break;
    case PedPhase::walking:
      next.y_ped = std::min(cfg.road_width, state.y_ped + cfg.walk_speed * cfg.dt);
      break;
    case PedPhase::done:
      throw std::logic_error("step called on a finished episode");
  }

  if (next.ped_phase == PedPhase::walking && check_collision(next, cfg)) {
    out.terminal = true;
    out.terminal_kind = TerminalKind::collision;
  } else if (next.ped_phase == PedPhase::walking && next.y_ped >= cfg.road_width - 1e-9) {
    out.terminal = true;
    out.terminal_kind = TerminalKind::arrival;
  } else if (next.ped_phase == PedPhase::waiting && next.t >= cfg.max_steps()) {
    out.terminal = true;
    out.terminal_kind = TerminalKind::timeout;
  }
  if (out.terminal) next.ped_phase = PedPhase::done;
  out.next_state = next;
  return out;
}

double terminal_reward(TerminalKind kind, int t_steps, double looming_weight, double inverse_tau,
                       const WorldConfig& cfg) {
  switch (kind) {
    case TerminalKind::collision:
    case TerminalKind::timeout:
      return cfg.reward_collision;
    case TerminalKind::arrival: {
      const double raw = cfg.reward_success - cfg.time_penalty_rate * t_steps - looming_weight * inverse_tau;
      return std::clamp(raw, -cfg.reward_success, cfg.reward_success);
    }
    case TerminalKind::none:
      break;
  }
  return 0.0;
}

}  // namespace pedcross
