#include "pedcross/fitter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pedcross {

namespace {

// Linear-interpolation quantile of sorted data.
double quantile_sorted(const std::vector<double>& xs, double q) {
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return xs[lo] + frac * (xs[hi] - xs[lo]);
}

}  // namespace

double silverman_bandwidth(const std::vector<double>& samples) {
  if (samples.empty()) throw std::invalid_argument("bandwidth of an empty sample");
  const auto n = static_cast<double>(samples.size());
  if (samples.size() < 2) return kBandwidthFloor;
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double m = mean(sorted);
  double ss = 0.0;
  for (double x : sorted) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / (n - 1.0));
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  const double spread = std::min(sd, iqr / 1.34);
  return std::max(kBandwidthFloor, 0.9 * spread * std::pow(n, -0.2));
}

Kde::Kde(std::vector<double> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw std::invalid_argument("kde: empty samples");
  bandwidth_ = silverman_bandwidth(samples_);
}

Kde::Kde(std::vector<double> samples, double bandwidth) : samples_(std::move(samples)), bandwidth_(bandwidth) {
  if (samples_.empty()) throw std::invalid_argument("kde: empty samples");
  if (!(bandwidth_ > 0.0)) throw std::invalid_argument("kde: bandwidth must be positive");
}

double Kde::pdf(double x) const {
  const double inv_h = 1.0 / bandwidth_;
  double acc = 0.0;
  for (double s : samples_) {
    const double u = (x - s) * inv_h;
    acc += std::exp(-0.5 * u * u);
  }
  return acc * inv_h / (static_cast<double>(samples_.size()) * std::sqrt(2.0 * std::numbers::pi));
}

double kde_pdf(const std::vector<double>& samples, double query) { return Kde(samples).pdf(query); }

double scenario_loglik(const std::vector<double>& model_samples, const std::vector<double>& observed_cits,
                       double floor) {
  if (observed_cits.empty()) return 0.0;
  if (model_samples.empty()) {
    return floor > 0.0 ? static_cast<double>(observed_cits.size()) * std::log(floor)
                       : -std::numeric_limits<double>::infinity();
  }
  const Kde kde(model_samples);
  double total = 0.0;
  for (double c : observed_cits) total += std::log(std::max(kde.pdf(c), floor));
  return total;
}

LikelihoodTable::LikelihoodTable(const CitSampleSet& samples) {
  for (const auto& [key, list] : samples) {
    Entry e;
    if (!list.empty()) {
      e.empty = false;
      e.kde = Kde(list);
    }
    entries_.emplace(key, std::move(e));
    const ModelParams cell{key.sigma_v, key.c};
    const bool seen = std::any_of(cells_.begin(), cells_.end(), [&](const ModelParams& p) {
      return p.sigma_v == cell.sigma_v && p.looming_weight == cell.looming_weight;
    });
    if (!seen) cells_.push_back(cell);
  }
  std::sort(cells_.begin(), cells_.end(), [](const ModelParams& a, const ModelParams& b) {
    if (a.sigma_v != b.sigma_v) return a.sigma_v < b.sigma_v;
    return a.looming_weight < b.looming_weight;
  });
}

double LikelihoodTable::loglik(const ModelParams& cell, const std::vector<TrialRecord>& trials, double floor) const {
  const double log_floor = floor > 0.0 ? std::log(floor) : -std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (const auto& t : trials) {
    const auto it = entries_.find(CitKey{t.scenario_id, cell.sigma_v, cell.looming_weight});
    if (it == entries_.end()) {
      throw std::invalid_argument("no model samples for scenario '" + t.scenario_id + "'");
    }
    if (it->second.empty) {
      total += log_floor;
    } else {
      const double p = it->second.kde.pdf(t.cit);
      total += p > floor ? std::log(p) : log_floor;
    }
  }
  return total;
}

namespace {

bool in_grid(const ModelParams& cell, const ParamGrid& grid) {
  const bool s_ok = grid.sigma_v_values.empty() || grid.has_sigma_v(cell.sigma_v) || cell.sigma_v == 0.0;
  const bool c_ok = grid.c_values.empty() || grid.has_c(cell.looming_weight) || cell.looming_weight == 0.0;
  return s_ok && c_ok;
}

FitResult best_cell(const LikelihoodTable& table, const std::vector<TrialRecord>& trials, const ParamGrid& grid,
                    std::string id) {
  if (trials.empty()) throw std::invalid_argument("fit: no trials for '" + id + "'");
  FitResult best;
  best.participant_id = std::move(id);
  best.n_trials = static_cast<int>(trials.size());
  bool found = false;
  for (const auto& cell : table.cells()) {
    if (!in_grid(cell, grid)) continue;
    const double ll = table.loglik(cell, trials);
    if (!found || ll > best.log_lik) {
      found = true;
      best.sigma_v = cell.sigma_v;
      best.c = cell.looming_weight;
      best.log_lik = ll;
    }
  }
  if (!found) throw std::invalid_argument("fit: no grid cell has model samples");
  return best;
}

}  // namespace

FitResult fit_participant(const LikelihoodTable& table, const std::vector<TrialRecord>& trials, const ParamGrid& grid) {
  if (trials.empty()) throw std::invalid_argument("fit_participant: no trials");
  return best_cell(table, trials, grid, trials.front().participant_id);
}

FitResult fit_participant(const CitSampleSet& grid_samples, const std::vector<TrialRecord>& trials,
                          const ParamGrid& grid) {
  return fit_participant(LikelihoodTable(grid_samples), trials, grid);
}

FitResult fit_pooled(const LikelihoodTable& table, const std::vector<TrialRecord>& all_trials, const ParamGrid& grid) {
  return best_cell(table, all_trials, grid, "pooled");
}

FitResult fit_pooled(const CitSampleSet& grid_samples, const std::vector<TrialRecord>& all_trials,
                     const ParamGrid& grid) {
  return fit_pooled(LikelihoodTable(grid_samples), all_trials, grid);
}

std::vector<FitResult> fit_each_participant(const LikelihoodTable& table, const std::vector<TrialRecord>& trials,
                                            const ParamGrid& grid) {
  std::map<std::string, std::vector<TrialRecord>> by_participant;
  for (const auto& t : trials) by_participant[t.participant_id].push_back(t);
  std::vector<FitResult> out;
  for (const auto& [id, list] : by_participant) out.push_back(fit_participant(table, list, grid));
  return out;
}

double aic(double log_lik, int k) {
  if (k < 0) throw std::invalid_argument("aic: k must be >= 0");
  return 2.0 * k - 2.0 * log_lik;
}

}  // namespace pedcross
