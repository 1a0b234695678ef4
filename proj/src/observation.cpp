#include "pedcross/observation.hpp"

#include <stdexcept>

namespace pedcross {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::BM: return "BM";
    case Variant::LM: return "LM";
    case Variant::VM: return "VM";
    case Variant::VLM: return "VLM";
  }
  return "BM";
}

Variant parse_variant(const std::string& text) {
  if (text == "BM") return Variant::BM;
  if (text == "LM") return Variant::LM;
  if (text == "VM") return Variant::VM;
  if (text == "VLM") return Variant::VLM;
  throw std::invalid_argument("unknown variant '" + text + "'");
}

std::size_t observation_size(Variant v) {
  switch (v) {
    case Variant::BM: return 6;
    case Variant::LM: return 7;
    case Variant::VM: return 9;
    case Variant::VLM: return 10;
  }
  return 0;
}

ObservationScale make_observation_scale(const WorldConfig& cfg, const BeliefPrior& prior) {
  ObservationScale s;
  s.time_steps = static_cast<double>(cfg.max_steps());
  const double pv = prior.pos_std * prior.pos_std;
  const double vv = prior.vel_std * prior.vel_std;
  s.pos_variance = pv > 0.0 ? pv : 1.0;
  s.vel_variance = vv > 0.0 ? vv : 1.0;
  return s;
}

Observation encode_features(Variant variant, const ObservationFeatures& f, const ObservationScale& scale) {
  Observation o;
  o.reserve(observation_size(variant));
  o.push_back(f.x_p / scale.position);
  o.push_back(f.y_p / scale.position);
  o.push_back(f.x_veh / scale.position);
  o.push_back(f.y_veh / scale.position);
  o.push_back(f.v / scale.speed);
  if (uses_belief(variant)) {
    o.push_back(f.p_pos / scale.pos_variance);
    o.push_back(f.p_vel / scale.vel_variance);
    o.push_back(f.sigma_v / scale.sigma_v);
  }
  if (uses_looming(variant)) o.push_back(f.looming_weight / scale.looming_weight);
  o.push_back(f.t / scale.time_steps);
  return o;
}

ObservationFeatures decode_observation(Variant variant, std::span<const double> obs, const ObservationScale& scale) {
  if (obs.size() != observation_size(variant)) {
    throw std::invalid_argument("decode_observation: length mismatch for variant " + to_string(variant));
  }
  ObservationFeatures f;
  std::size_t i = 0;
  f.x_p = obs[i++] * scale.position;
  f.y_p = obs[i++] * scale.position;
  f.x_veh = obs[i++] * scale.position;
  f.y_veh = obs[i++] * scale.position;
  f.v = obs[i++] * scale.speed;
  if (uses_belief(variant)) {
    f.p_pos = obs[i++] * scale.pos_variance;
    f.p_vel = obs[i++] * scale.vel_variance;
    f.sigma_v = obs[i++] * scale.sigma_v;
  }
  if (uses_looming(variant)) f.looming_weight = obs[i++] * scale.looming_weight;
  f.t = obs[i++] * scale.time_steps;
  return f;
}

Observation encode_observation(Variant variant, const SimState& state, const WorldConfig& cfg,
                               const ObservationScale& scale, const std::optional<Belief>& belief,
                               std::optional<double> sigma_v, std::optional<double> looming_weight) {
  ObservationFeatures f;
  f.x_p = 0.0;
  f.y_p = state.y_ped;
  f.y_veh = cfg.lane_center();
  f.t = state.t;
  if (uses_belief(variant)) {
    if (!belief) throw std::invalid_argument(to_string(variant) + " observation requires a belief");
    if (!sigma_v) throw std::invalid_argument(to_string(variant) + " observation requires sigma_v");
    f.x_veh = belief->x_hat;
    f.v = belief->v_hat;
    f.p_pos = belief->p_xx;
    f.p_vel = belief->p_vv;
    f.sigma_v = *sigma_v;
  } else {
    f.x_veh = state.x_veh;
    f.v = state.v_veh;
  }
  if (uses_looming(variant)) {
    if (!looming_weight) throw std::invalid_argument(to_string(variant) + " observation requires looming weight c");
    f.looming_weight = *looming_weight;
  }
  return encode_features(variant, f, scale);
}

}  // namespace pedcross
