#include "pedcross/perception.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace pedcross {

double angular_noise_std(double d_l, double d, double h, double sigma_v) {
  if (!(d > 0.0) || !(h > 0.0)) throw std::invalid_argument("angular_noise_std: d and h must be positive");
  const double dist = std::abs(d_l);
  if (sigma_v <= 0.0 || dist == 0.0) return 0.0;
  const double angle = std::atan(h / d) + sigma_v;
  if (angle >= std::numbers::pi / 2) return dist;
  return dist * (1.0 - h / (d * std::tan(angle)));
}

double viewing_distance(double x_veh, double y_ped, const WorldConfig& cfg) {
  const double dy = cfg.lane_center() - y_ped;
  return std::sqrt(x_veh * x_veh + dy * dy);
}

double sample_measurement(double true_x_veh, double y_ped, const WorldConfig& cfg, const NoiseParams& noise, Rng& rng) {
  const double d = viewing_distance(true_x_veh, y_ped, cfg);
  if (!(d > 0.0)) return true_x_veh;
  const double sigma = angular_noise_std(true_x_veh, d, cfg.eye_height, noise.sigma_v);
  if (sigma <= 0.0) return true_x_veh;
  std::normal_distribution<double> normal(0.0, sigma);
  return true_x_veh + normal(rng);
}

namespace {

double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

BeliefPrior belief_prior(const std::vector<ScenarioSpec>& catalog) {
  if (catalog.empty()) throw std::invalid_argument("belief_prior: empty catalog");
  std::vector<double> d0s, v0s;
  for (const auto& s : catalog) {
    if (!s.is_evaluation()) continue;
    d0s.push_back(s.d0);
    v0s.push_back(s.v0);
  }
  if (d0s.empty()) {
    for (const auto& s : catalog) {
      d0s.push_back(s.d0);
      v0s.push_back(s.v0);
    }
  }
  return {sample_std(d0s), sample_std(v0s)};
}

Belief belief_init(const ScenarioSpec& spec, const BeliefPrior& prior) {
  Belief b;
  b.x_hat = spec.d0;
  b.v_hat = spec.v0;
  b.p_xx = prior.pos_std * prior.pos_std;
  b.p_vv = prior.vel_std * prior.vel_std;
  b.p_xv = 0.0;
  return b;
}

Belief belief_init(const ScenarioSpec& spec, const std::vector<ScenarioSpec>& catalog) {
  return belief_init(spec, belief_prior(catalog));
}

Belief belief_predict(const Belief& b, double dt, const PerceptionConfig& cfg) {
  // x' = x - v dt, v' = v; white acceleration enters through G = (-dt^2/2, dt).
  Belief p;
  p.x_hat = b.x_hat - b.v_hat * dt;
  p.v_hat = b.v_hat;
  const double q = cfg.process_accel_std * cfg.process_accel_std;
  const double g0 = -0.5 * dt * dt;
  const double g1 = dt;
  p.p_xx = b.p_xx - 2.0 * dt * b.p_xv + dt * dt * b.p_vv + q * g0 * g0;
  p.p_xv = b.p_xv - dt * b.p_vv + q * g0 * g1;
  p.p_vv = b.p_vv + q * g1 * g1;
  return p;
}

Belief belief_step(const Belief& b, double z, double r, double dt, const PerceptionConfig& cfg) {
  if (r < 0.0) throw std::invalid_argument("belief_step: measurement variance must be >= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("belief_step: dt must be positive");
  const Belief p = belief_predict(b, dt, cfg);
  const double s = p.p_xx + r;
  Belief post = p;
  if (s <= 0.0) {
    // Exact prior and exact measurement; the measurement wins.
    post.x_hat = z;
    return post;
  }
  const double kx = p.p_xx / s;
  const double kv = p.p_xv / s;
  const double innovation = z - p.x_hat;
  post.x_hat = p.x_hat + kx * innovation;
  post.v_hat = p.v_hat + kv * innovation;
  // Joseph form keeps the covariance symmetric positive semidefinite.
  const double a = 1.0 - kx;
  post.p_xx = a * a * p.p_xx + kx * kx * r;
  post.p_xv = a * (p.p_xv - kv * p.p_xx) + kx * kv * r;
  post.p_vv = p.p_vv - 2.0 * kv * p.p_xv + kv * kv * p.p_xx + kv * kv * r;
  if (r == 0.0) {
    post.x_hat = z;
    post.p_xx = 0.0;
    post.p_xv = 0.0;
  }
  return post;
}

double measurement_variance(const Belief& predicted, double y_ped, const WorldConfig& cfg, const NoiseParams& noise) {
  const double d = viewing_distance(predicted.x_hat, y_ped, cfg);
  if (!(d > 0.0)) return 0.0;
  const double sigma = angular_noise_std(predicted.x_hat, d, cfg.eye_height, noise.sigma_v);
  return sigma * sigma;
}

double inverse_tau(double x_front, double v) {
  if (x_front > 0.0 && v > 0.0) return v / x_front;
  return 0.0;
}

}  // namespace pedcross
