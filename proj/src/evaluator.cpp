#include "pedcross/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "pedcross/dqn.hpp"
#include "pedcross/rng.hpp"

namespace pedcross {

TrialResult rollout(const QNet& net, const ScenarioSpec& spec, const ModelParams& params, const SimContext& ctx,
                    Rng& rng, const RolloutOptions& opts) {
  if (net.in_dim() != observation_size(net.variant())) {
    throw std::invalid_argument("rollout: network input size does not match its variant");
  }
  CrossingEpisode ep(spec, net.variant(), params, ctx);
  const double eps = opts.greedy ? 0.0 : opts.epsilon;
  while (!ep.finished()) {
    const Observation obs = ep.observe();
    ep.act(select_action(net, obs, eps, rng), rng);
  }
  TrialResult r;
  r.scenario_id = spec.id;
  r.params = params;
  r.cit = ep.cit();
  r.go_step = ep.go_step();
  r.outcome = ep.outcome();
  return r;
}

CitSampleSet collect_cits(const std::vector<GridTrial>& trials) {
  CitSampleSet out;
  for (const auto& t : trials) {
    auto& list = out[CitKey{t.result.scenario_id, t.result.params.sigma_v, t.result.params.looming_weight}];
    if (t.result.cit) list.push_back(*t.result.cit);
  }
  for (auto& [key, list] : out) std::sort(list.begin(), list.end());
  return out;
}

GridSimulation simulate_grid(const QNet& net, const std::vector<ScenarioSpec>& catalog, const ParamGrid& grid,
                             int n_reps, const SimContext& ctx, std::uint64_t seed, unsigned workers) {
  if (n_reps < 1) throw std::invalid_argument("simulate_grid: n_reps must be >= 1");
  const Variant variant = net.variant();
  const std::vector<double> zero{0.0};
  const auto& sigmas = uses_belief(variant) ? grid.sigma_v_values : zero;
  const auto& cs = uses_looming(variant) ? grid.c_values : zero;

  struct Job {
    const ScenarioSpec* spec;
    std::size_t si, ci;
  };
  std::vector<Job> jobs;
  for (const auto& spec : catalog) {
    if (!spec.is_evaluation()) continue;
    for (std::size_t si = 0; si < sigmas.size(); ++si) {
      for (std::size_t ci = 0; ci < cs.size(); ++ci) jobs.push_back({&spec, si, ci});
    }
  }

  GridSimulation out;
  out.trials.resize(jobs.size() * static_cast<std::size_t>(n_reps));
  auto run_job = [&](std::size_t j) {
    const Job& job = jobs[j];
    Rng rng = derive_rng(seed, {fnv1a(job.spec->id), job.si, job.ci});
    const ModelParams params{sigmas[job.si], cs[job.ci]};
    for (int rep = 0; rep < n_reps; ++rep) {
      auto& slot = out.trials[j * static_cast<std::size_t>(n_reps) + static_cast<std::size_t>(rep)];
      slot.rep = rep;
      slot.result = rollout(net, *job.spec, params, ctx, rng);
    }
  };

  workers = std::max(1u, workers);
  if (workers == 1 || jobs.size() < 2) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) run_job(j);
      });
    }
  }
  out.samples = collect_cits(out.trials);
  return out;
}

double gap_acceptance_rate(const std::vector<double>& cits, const ScenarioSpec& spec) {
  if (spec.kind == ScenarioKind::yielding) {
    throw std::invalid_argument("gap acceptance is defined for constant-speed scenarios only (" + spec.id + ")");
  }
  if (cits.empty()) return 0.0;
  const auto accepted = std::count_if(cits.begin(), cits.end(), [&](double c) { return c < spec.tau0; });
  return static_cast<double>(accepted) / static_cast<double>(cits.size());
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: both samples must be nonempty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return d;
}

double mad(const std::map<std::string, double>& predicted_means, const std::map<std::string, double>& observed_means) {
  if (predicted_means.size() != observed_means.size()) throw std::invalid_argument("mad: scenario sets differ");
  if (predicted_means.empty()) throw std::invalid_argument("mad: no scenarios");
  double total = 0.0;
  for (const auto& [id, pred] : predicted_means) {
    const auto it = observed_means.find(id);
    if (it == observed_means.end()) throw std::invalid_argument("mad: scenario '" + id + "' missing from observations");
    total += std::abs(pred - it->second);
  }
  return total / static_cast<double>(predicted_means.size());
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean of empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace pedcross
