#pragma once

#include <map>
#include <string>
#include <vector>

#include "pedcross/evaluator.hpp"
#include "pedcross/grid.hpp"

namespace pedcross {

inline constexpr double kDensityFloor = 1e-9;
inline constexpr double kBandwidthFloor = 0.05;

// One observed (or synthesized) crossing initiation time.
struct TrialRecord {
  std::string participant_id;
  std::string scenario_id;
  double cit = 0.0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct FitResult {
  std::string participant_id;
  double sigma_v = 0.0;
  double c = 0.0;
  double log_lik = 0.0;
  int n_trials = 0;
};

// 0.9 * min(sd, IQR / 1.34) * n^(-1/5), floored at kBandwidthFloor.
double silverman_bandwidth(const std::vector<double>& samples);

// Gaussian kernel density estimate.
class Kde {
 public:
  explicit Kde(std::vector<double> samples);
  Kde(std::vector<double> samples, double bandwidth);

  double bandwidth() const { return bandwidth_; }
  double pdf(double x) const;

 private:
  std::vector<double> samples_;
  double bandwidth_ = 0.0;
};

double kde_pdf(const std::vector<double>& samples, double query);

// Sum of log max(pdf, floor) over the observed CITs. A zero floor disables
// flooring; an empty sample list then yields -inf for any observation.
double scenario_loglik(const std::vector<double>& model_samples, const std::vector<double>& observed_cits,
                       double floor = kDensityFloor);

// Density estimates for every (scenario, cell) entry of a sample set.
class LikelihoodTable {
 public:
  explicit LikelihoodTable(const CitSampleSet& samples);

  // Cells present in the sample set, sorted by (sigma_v, c).
  const std::vector<ModelParams>& cells() const { return cells_; }

  // Throws std::invalid_argument when no samples exist for a trial's scenario.
  double loglik(const ModelParams& cell, const std::vector<TrialRecord>& trials, double floor = kDensityFloor) const;

 private:
  struct Entry {
    bool empty = true;
    Kde kde{std::vector<double>{0.0}, 1.0};
  };
  std::map<CitKey, Entry> entries_;
  std::vector<ModelParams> cells_;
};

// Grid search over the cells of grid_samples that lie in the grid. Ties go to
// the smaller sigma_v, then the smaller c.
FitResult fit_participant(const LikelihoodTable& table, const std::vector<TrialRecord>& trials, const ParamGrid& grid);
FitResult fit_participant(const CitSampleSet& grid_samples, const std::vector<TrialRecord>& trials,
                          const ParamGrid& grid);

// Single cell for all trials of all participants.
FitResult fit_pooled(const LikelihoodTable& table, const std::vector<TrialRecord>& all_trials, const ParamGrid& grid);
FitResult fit_pooled(const CitSampleSet& grid_samples, const std::vector<TrialRecord>& all_trials,
                     const ParamGrid& grid);

// Per-participant fits, ordered by participant id.
std::vector<FitResult> fit_each_participant(const LikelihoodTable& table, const std::vector<TrialRecord>& trials,
                                            const ParamGrid& grid);

double aic(double log_lik, int k);

}  // namespace pedcross
