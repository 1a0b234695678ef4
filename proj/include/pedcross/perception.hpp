#pragma once

#include <array>
#include <vector>

#include "pedcross/env.hpp"
#include "pedcross/scenario.hpp"

namespace pedcross {

struct NoiseParams {
  double sigma_v = 0.0;  // angular noise standard deviation, rad
};

// Kalman belief over (distance of the vehicle front to the crossing line,
// approach speed). Covariance is stored as its three unique entries.
struct Belief {
  double x_hat = 0.0;
  double v_hat = 0.0;
  double p_xx = 0.0;
  double p_xv = 0.0;
  double p_vv = 0.0;
};

struct PerceptionConfig {
  double process_accel_std = 2.0;  // m/s^2
};

// Prior standard deviations, taken from the spread of the evaluation scenarios.
struct BeliefPrior {
  double pos_std = 0.0;
  double vel_std = 0.0;
};

// Positional noise induced by angular noise on the angle below the horizon.
// Saturates at |d_l| once the perturbed angle reaches pi/2.
double angular_noise_std(double d_l, double d, double h, double sigma_v);

// Euclidean distance from the pedestrian's eye point on the ground to the
// vehicle front.
double viewing_distance(double x_veh, double y_ped, const WorldConfig& cfg);

double sample_measurement(double true_x_veh, double y_ped, const WorldConfig& cfg, const NoiseParams& noise, Rng& rng);

BeliefPrior belief_prior(const std::vector<ScenarioSpec>& catalog);

Belief belief_init(const ScenarioSpec& spec, const BeliefPrior& prior);
Belief belief_init(const ScenarioSpec& spec, const std::vector<ScenarioSpec>& catalog);

Belief belief_predict(const Belief& b, double dt, const PerceptionConfig& cfg);

// Constant-velocity predict followed by a position update with variance r.
Belief belief_step(const Belief& b, double z, double r, double dt, const PerceptionConfig& cfg);

// Measurement variance the agent assumes, from its own predicted distance.
double measurement_variance(const Belief& predicted, double y_ped, const WorldConfig& cfg, const NoiseParams& noise);

// v / x on the open quadrant x > 0, v > 0; zero otherwise.
double inverse_tau(double x_front, double v);

}  // namespace pedcross
