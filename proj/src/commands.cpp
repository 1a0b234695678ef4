#include "pedcross/commands.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>
#include <stdexcept>

#include "pedcross/rng.hpp"
#include "pedcross/strings.hpp"

namespace pedcross {

using nlohmann::ordered_json;

namespace {

Variant require_variant(const ExperimentConfig& cfg) {
  if (!cfg.variant) throw std::invalid_argument("config must set 'variant' (BM, LM, VM or VLM)");
  return *cfg.variant;
}

std::filesystem::path pick(const std::filesystem::path& arg, const std::string& from_config, const char* what) {
  if (!arg.empty()) return arg;
  if (!from_config.empty()) return from_config;
  throw std::invalid_argument(std::string("no ") + what + " path given");
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory '" + dir.string() + "'");
  }
}

void write_json(const std::filesystem::path& path, const ordered_json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
}

// Map of scenario -> sorted CITs for one cell of a sample set.
std::map<std::string, std::vector<double>> cell_samples(const CitSampleSet& set, const ModelParams& cell) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& [key, list] : set) {
    if (key.sigma_v == cell.sigma_v && key.c == cell.looming_weight) out[key.scenario_id] = list;
  }
  return out;
}

std::vector<ModelParams> sample_cells(const CitSampleSet& set) {
  std::vector<ModelParams> cells;
  std::set<std::pair<double, double>> seen;
  for (const auto& [key, list] : set) {
    if (seen.insert({key.sigma_v, key.c}).second) cells.push_back({key.sigma_v, key.c});
  }
  return cells;
}

// Means over scenarios present with data in both maps.
std::optional<double> mad_over_common(const std::map<std::string, std::vector<double>>& model,
                                      const std::map<std::string, std::vector<double>>& reference) {
  std::map<std::string, double> pred, obs;
  for (const auto& [id, list] : model) {
    const auto it = reference.find(id);
    if (list.empty() || it == reference.end() || it->second.empty()) continue;
    pred[id] = mean(list);
    obs[id] = mean(it->second);
  }
  if (pred.empty()) return std::nullopt;
  return mad(pred, obs);
}

}  // namespace

int cmd_train(const CommandArgs& args, std::ostream& log) {
  const auto& cfg = args.config;
  const Variant variant = require_variant(cfg);
  check_grid_for_variant(variant, cfg.grid);
  TrainConfig tc = apply_profile(cfg.train, cfg.profile, variant);
  tc.seed = cfg.seed;
  tc.validate();
  ensure_dir(args.out_dir);

  const auto catalog = build_catalog(cfg.world);
  const auto ctx = SimContext::make(cfg.world, cfg.perception, catalog);
  Rng rng(tc.seed);
  log << "training " << to_string(variant) << " (" << to_string(cfg.profile) << ", " << tc.hidden1 << "/"
      << tc.hidden2 << ", " << tc.episodes << " episodes, seed " << tc.seed << ")\n";
  const auto result = train_variant(variant, catalog, ctx, tc, cfg.grid, rng, [&](const RewardLogEntry& e) {
    log << "  episode " << e.episode << "  mean reward " << format_fixed(e.mean_reward, 3) << '\n';
  });

  {
    auto out = open_output(args.out_dir / "weights.csv");
    write_weights(out, result.net);
  }
  {
    auto out = open_output(args.out_dir / "reward_log.csv");
    write_reward_log(out, result.reward_log);
  }
  log << result.learn_steps << " learn steps, final epsilon " << format_double(epsilon(result.learn_steps, tc)) << '\n';
  log << "wrote " << (args.out_dir / "weights.csv").string() << " and " << (args.out_dir / "reward_log.csv").string()
      << '\n';

  if (cfg.min_final_reward && !result.reward_log.empty() &&
      result.reward_log.back().mean_reward < *cfg.min_final_reward) {
    log << "final mean reward " << format_fixed(result.reward_log.back().mean_reward, 3) << " is below threshold "
        << format_double(*cfg.min_final_reward) << '\n';
    return kExitNotConverged;
  }
  return 0;
}

int cmd_simulate(const CommandArgs& args, std::ostream& log) {
  const auto& cfg = args.config;
  const auto weights_path = pick(args.weights, cfg.weights_path, "weights");
  const QNet net = load_weights(weights_path);
  if (cfg.variant && *cfg.variant != net.variant()) {
    throw std::invalid_argument("variant mismatch: weights '" + weights_path.string() + "' are " +
                                to_string(net.variant()) + ", config says " + to_string(*cfg.variant));
  }
  ensure_dir(args.out_dir);
  const auto catalog = build_catalog(cfg.world);
  const auto ctx = SimContext::make(cfg.world, cfg.perception, catalog);
  const ParamGrid grid = cfg.effective_grid();
  grid.validate();

  log << "simulating " << to_string(net.variant()) << " over " << grid.cells_for(net.variant()).size()
      << " cell(s), " << cfg.n_reps << " reps\n";
  const auto sim = simulate_grid(net, catalog, grid, cfg.n_reps, ctx, cfg.seed, cfg.workers);
  {
    auto out = open_output(args.out_dir / "cit_samples.csv");
    write_cit_samples(out, sim.trials);
  }

  std::optional<std::map<std::string, std::vector<double>>> reference;
  if (!cfg.reference_path.empty()) {
    auto in = open_input(cfg.reference_path);
    reference = read_reference(in);
  }

  // Outcome counts per key, in trial order.
  std::map<CitKey, std::map<std::string, int>> outcomes;
  for (const auto& t : sim.trials) {
    ++outcomes[CitKey{t.result.scenario_id, t.result.params.sigma_v, t.result.params.looming_weight}]
              [to_string(t.result.outcome)];
  }

  ordered_json doc;
  doc["variant"] = to_string(net.variant());
  doc["seed"] = cfg.seed;
  doc["n_reps"] = cfg.n_reps;
  ordered_json cells = ordered_json::array();
  for (const auto& cell : sample_cells(sim.samples)) {
    ordered_json jc;
    jc["sigma_v"] = cell.sigma_v;
    jc["c"] = cell.looming_weight;
    const auto per_scenario = cell_samples(sim.samples, cell);
    ordered_json scen = ordered_json::object();
    for (const auto& spec : evaluation_scenarios(catalog)) {
      const auto it = per_scenario.find(spec.id);
      if (it == per_scenario.end()) continue;
      const auto& cits = it->second;
      ordered_json js;
      js["tau0"] = spec.tau0;
      js["n_crossed"] = cits.size();
      js["outcomes"] = outcomes[CitKey{spec.id, cell.sigma_v, cell.looming_weight}];
      js["mean_cit"] = cits.empty() ? ordered_json(nullptr) : ordered_json(mean(cits));
      if (spec.kind == ScenarioKind::constant) js["gap_acceptance"] = gap_acceptance_rate(cits, spec);
      if (reference) {
        const auto ref = reference->find(spec.id);
        if (!cits.empty() && ref != reference->end() && !ref->second.empty()) {
          js["ks"] = ks_statistic(cits, ref->second);
        }
      }
      scen[spec.id] = std::move(js);
    }
    jc["scenarios"] = std::move(scen);
    if (reference) {
      const auto m = mad_over_common(per_scenario, *reference);
      jc["mad"] = m ? ordered_json(*m) : ordered_json(nullptr);
    }
    cells.push_back(std::move(jc));
  }
  doc["cells"] = std::move(cells);
  write_json(args.out_dir / "metrics.json", doc);
  log << "wrote " << (args.out_dir / "cit_samples.csv").string() << " and "
      << (args.out_dir / "metrics.json").string() << '\n';

  if (args.synthesize_trials) {
    if (cfg.synth.cells.empty()) throw std::invalid_argument("synthesize-trials requires synth.cells in the config");
    if (cfg.synth.reps < 1) throw std::invalid_argument("synth.reps must be >= 1");
    std::vector<TrialRecord> trials;
    auto truth = open_output(args.out_dir / "synth_truth.csv");
    truth << "participant_id,sigma_v,c\n";
    for (std::size_t p = 0; p < cfg.synth.cells.size(); ++p) {
      const auto& cell = cfg.synth.cells[p];
      const std::string id = "S" + std::string(p + 1 < 10 ? "0" : "") + std::to_string(p + 1);
      truth << id << ',' << format_double(cell.sigma_v) << ',' << format_double(cell.looming_weight) << '\n';
      for (const auto& spec : evaluation_scenarios(catalog)) {
        Rng rng = derive_rng(cfg.seed, {fnv1a("synthetic-participant"), p, fnv1a(spec.id)});
        for (int r = 0; r < cfg.synth.reps; ++r) {
          const auto res = rollout(net, spec, cell, ctx, rng);
          if (res.cit) trials.push_back({id, spec.id, *res.cit});
        }
      }
    }
    auto out = open_output(args.out_dir / "trials.csv");
    write_trials(out, trials);
    log << "wrote " << trials.size() << " synthetic trials for " << cfg.synth.cells.size() << " participant(s)\n";
  }
  return 0;
}

int cmd_fit(const CommandArgs& args, std::ostream& log) {
  const auto& cfg = args.config;
  // default to what simulate wrote into the output directory
  const auto samples_path =
      args.samples.empty() && cfg.samples_path.empty() ? args.out_dir / "cit_samples.csv"
                                                       : pick(args.samples, cfg.samples_path, "CIT samples");
  const auto trials_path = args.trials.empty() && cfg.trials_path.empty()
                               ? args.out_dir / "trials.csv"
                               : pick(args.trials, cfg.trials_path, "trials");
  const auto catalog = build_catalog(cfg.world);

  CitSampleSet samples;
  {
    auto in = open_input(samples_path);
    samples = collect_cits(read_cit_samples(in));
  }
  std::vector<TrialRecord> trials;
  {
    auto in = open_input(trials_path);
    try {
      trials = read_trials(in, catalog);
    } catch (const std::exception& e) {
      throw std::invalid_argument(trials_path.string() + ": " + e.what());
    }
  }
  if (trials.empty()) throw std::invalid_argument(trials_path.string() + ": no trials");
  ensure_dir(args.out_dir);

  const ParamGrid grid = cfg.grid_given ? cfg.grid : ParamGrid{};
  const LikelihoodTable table(samples);
  auto fits = fit_each_participant(table, trials, grid);
  const FitResult pooled = fit_pooled(table, trials, grid);

  double ll_sum = 0.0;
  for (const auto& f : fits) ll_sum += f.log_lik;
  // Free non-policy parameters per fitted unit: sigma_v for belief variants,
  // c for looming variants; both when the variant is not stated.
  const int per_unit =
      cfg.variant ? int{uses_belief(*cfg.variant)} + int{uses_looming(*cfg.variant)} : 2;
  const int k_individual = per_unit * static_cast<int>(fits.size());

  {
    auto out = open_output(args.out_dir / "fits.csv");
    auto rows = fits;
    rows.push_back(pooled);
    write_fits(out, rows);
  }

  ordered_json doc;
  doc["n_participants"] = fits.size();
  doc["n_trials"] = trials.size();
  doc["individual"] = {{"log_lik", ll_sum}, {"k", k_individual}, {"aic", aic(ll_sum, k_individual)}};
  doc["pooled"] = {{"sigma_v", pooled.sigma_v},
                   {"c", pooled.c},
                   {"log_lik", pooled.log_lik},
                   {"k", per_unit},
                   {"aic", aic(pooled.log_lik, per_unit)}};
  ordered_json pairs = ordered_json::array();
  for (const auto& [ll, k] : cfg.aic_pairs) pairs.push_back({{"log_lik", ll}, {"k", k}, {"aic", aic(ll, k)}});
  doc["aic_table"] = std::move(pairs);
  write_json(args.out_dir / "aic.json", doc);

  log << "fitted " << fits.size() << " participant(s); pooled cell (" << format_double(pooled.sigma_v) << ", "
      << format_double(pooled.c) << ")\n";
  return 0;
}

int cmd_report(const CommandArgs& args, std::ostream& log) {
  const auto& cfg = args.config;
  const auto catalog = build_catalog(cfg.world);
  const auto samples_path = args.samples.empty() ? args.out_dir / "cit_samples.csv" : args.samples;
  if (!std::filesystem::exists(samples_path)) {
    throw std::invalid_argument("missing input '" + samples_path.string() + "' (run simulate first)");
  }
  CitSampleSet samples;
  {
    auto in = open_input(samples_path);
    samples = collect_cits(read_cit_samples(in));
  }

  std::optional<std::map<std::string, std::vector<double>>> reference;
  std::filesystem::path ref_path = !args.trials.empty() ? args.trials : std::filesystem::path(cfg.reference_path);
  if (!ref_path.empty()) {
    auto in = open_input(ref_path);
    reference = read_reference(in);
  }

  ordered_json warnings = ordered_json::array();
  {
    auto cdf = open_output(args.out_dir / "cdf.csv");
    cdf << "scenario_id,sigma_v,c,cit_s,cum_frac\n";
    for (const auto& [key, list] : samples) {
      if (list.empty()) {
        warnings.push_back("no crossings for " + key.scenario_id + " at sigma_v=" + format_double(key.sigma_v) +
                           ", c=" + format_double(key.c) + "; omitted");
        continue;
      }
      const auto n = static_cast<double>(list.size());
      for (std::size_t i = 0; i < list.size(); ++i) {
        cdf << key.scenario_id << ',' << format_double(key.sigma_v) << ',' << format_double(key.c) << ','
            << format_double(list[i]) << ',' << format_double(static_cast<double>(i + 1) / n) << '\n';
      }
    }
  }

  ordered_json gap = ordered_json::array();
  {
    auto out = open_output(args.out_dir / "gap_acceptance.csv");
    out << "scenario_id,tau0_s,sigma_v,c,n_crossed,rate\n";
    for (const auto& [key, list] : samples) {
      const auto& spec = find_scenario(catalog, key.scenario_id);
      if (spec.kind != ScenarioKind::constant) continue;
      const double rate = gap_acceptance_rate(list, spec);
      out << key.scenario_id << ',' << format_double(spec.tau0) << ',' << format_double(key.sigma_v) << ','
          << format_double(key.c) << ',' << list.size() << ',' << format_double(rate) << '\n';
      gap.push_back({{"scenario_id", key.scenario_id},
                     {"tau0", spec.tau0},
                     {"sigma_v", key.sigma_v},
                     {"c", key.c},
                     {"rate", rate}});
    }
  }

  ordered_json mads = ordered_json::array();
  {
    auto out = open_output(args.out_dir / "mad.csv");
    out << "sigma_v,c,mad_s\n";
    if (!reference) warnings.push_back("no reference trials given; MAD table is empty");
    for (const auto& cell : sample_cells(samples)) {
      if (!reference) break;
      const auto m = mad_over_common(cell_samples(samples, cell), *reference);
      if (!m) continue;
      out << format_double(cell.sigma_v) << ',' << format_double(cell.looming_weight) << ',' << format_double(*m)
          << '\n';
      mads.push_back({{"sigma_v", cell.sigma_v}, {"c", cell.looming_weight}, {"mad", *m}});
    }
  }

  ordered_json doc;
  doc["samples"] = samples_path.string();
  doc["gap_acceptance"] = std::move(gap);
  doc["mad"] = std::move(mads);
  const auto fits_path = args.out_dir / "fits.csv";
  if (std::filesystem::exists(fits_path)) {
    auto in = open_input(fits_path);
    ordered_json jf = ordered_json::array();
    for (const auto& f : read_fits(in)) {
      jf.push_back({{"participant_id", f.participant_id},
                    {"sigma_v", f.sigma_v},
                    {"c", f.c},
                    {"log_lik", f.log_lik},
                    {"n_trials", f.n_trials}});
    }
    doc["fits"] = std::move(jf);
  }
  doc["warnings"] = warnings;
  write_json(args.out_dir / "report.json", doc);
  for (const auto& w : warnings) log << "warning: " << w.get<std::string>() << '\n';
  log << "wrote report to " << args.out_dir.string() << '\n';
  return 0;
}

}  // namespace pedcross
