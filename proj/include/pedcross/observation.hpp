#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pedcross/env.hpp"
#include "pedcross/perception.hpp"

namespace pedcross {

// BM: exact state. LM: exact state + looming reward. VM: Kalman belief.
// VLM: Kalman belief + looming reward.
enum class Variant { BM, LM, VM, VLM };

std::string to_string(Variant v);
Variant parse_variant(const std::string& text);

constexpr bool uses_belief(Variant v) { return v == Variant::VM || v == Variant::VLM; }
constexpr bool uses_looming(Variant v) { return v == Variant::LM || v == Variant::VLM; }

std::size_t observation_size(Variant v);

using Observation = std::vector<double>;

// Fixed divisors applied to each feature.
struct ObservationScale {
  double position = 100.0;
  double speed = 15.0;
  double time_steps = 200.0;
  double pos_variance = 1.0;
  double vel_variance = 1.0;
  double sigma_v = 1.0;
  double looming_weight = 100.0;
};

ObservationScale make_observation_scale(const WorldConfig& cfg, const BeliefPrior& prior);

// Unscaled feature values. Fields that a variant does not observe are ignored.
struct ObservationFeatures {
  double x_p = 0.0;
  double y_p = 0.0;
  double x_veh = 0.0;
  double y_veh = 0.0;
  double v = 0.0;
  double p_pos = 0.0;
  double p_vel = 0.0;
  double sigma_v = 0.0;
  double looming_weight = 0.0;
  double t = 0.0;  // steps
};

Observation encode_features(Variant variant, const ObservationFeatures& f, const ObservationScale& scale);
ObservationFeatures decode_observation(Variant variant, std::span<const double> obs, const ObservationScale& scale);

// Throws std::invalid_argument when an input required by the variant is absent.
Observation encode_observation(Variant variant, const SimState& state, const WorldConfig& cfg,
                               const ObservationScale& scale, const std::optional<Belief>& belief,
                               std::optional<double> sigma_v, std::optional<double> looming_weight);

}  // namespace pedcross
