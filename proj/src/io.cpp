#include "pedcross/io.hpp"

#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "pedcross/strings.hpp"

namespace pedcross {

std::string to_string(Profile p) {
  switch (p) {
    case Profile::desk: return "desk";
    case Profile::paper: return "paper";
    case Profile::custom: return "custom";
  }
  return "?";
}

Profile parse_profile(const std::string& text) {
  if (text == "desk") return Profile::desk;
  if (text == "paper") return Profile::paper;
  if (text == "custom") return Profile::custom;
  throw std::invalid_argument("unknown profile '" + text + "' (expected desk, paper or custom)");
}

ParamGrid ExperimentConfig::effective_grid() const { return grid_given ? grid : ParamGrid::standard(); }

TrainConfig apply_profile(TrainConfig cfg, Profile profile, Variant variant) {
  switch (profile) {
    case Profile::paper:
      cfg.hidden1 = 512;
      cfg.hidden2 = 256;
      cfg.episodes = variant == Variant::VLM ? 45000 : 25000;
      break;
    case Profile::desk:
      cfg.hidden1 = 64;
      cfg.hidden2 = 64;
      cfg.episodes = variant == Variant::VLM ? 10000 : 5000;
      cfg.optimizer = OptimizerKind::adam;
      cfg.learning_rate = 1e-3;
      break;
    case Profile::custom:
      break;
  }
  return cfg;
}

namespace {

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("not a boolean: '" + v + "'");
}

OptimizerKind parse_optimizer(const std::string& v) {
  if (v == "sgd") return OptimizerKind::sgd;
  if (v == "adam") return OptimizerKind::adam;
  throw std::invalid_argument("unknown optimizer '" + v + "' (expected sgd or adam)");
}

std::size_t parse_size(const std::string& v) {
  const long long n = parse_int(v);
  if (n < 0) throw std::invalid_argument("expected a nonnegative integer: '" + v + "'");
  return static_cast<std::size_t>(n);
}

// "a/b;c/d" -> [(a, b), (c, d)]
std::vector<std::pair<double, double>> parse_pairs(const std::string& v) {
  std::vector<std::pair<double, double>> out;
  for (const auto& item : split(v, ';')) {
    if (trim(item).empty()) continue;
    const auto parts = split(item, '/');
    if (parts.size() != 2) throw std::invalid_argument("expected 'x/y' pairs separated by ';': '" + v + "'");
    out.emplace_back(parse_double(parts[0]), parse_double(parts[1]));
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto num = [&](const std::string& key, auto member_of) {
      t[key] = [member_of](ExperimentConfig& c, const std::string& v) { member_of(c) = parse_double(v); };
    };
    num("world.road_width", [](ExperimentConfig& c) -> double& { return c.world.road_width; });
    num("world.walk_speed", [](ExperimentConfig& c) -> double& { return c.world.walk_speed; });
    num("world.dt", [](ExperimentConfig& c) -> double& { return c.world.dt; });
    num("world.eye_height", [](ExperimentConfig& c) -> double& { return c.world.eye_height; });
    num("world.vehicle_length", [](ExperimentConfig& c) -> double& { return c.world.vehicle_length; });
    num("world.vehicle_width", [](ExperimentConfig& c) -> double& { return c.world.vehicle_width; });
    num("world.lane_near_edge", [](ExperimentConfig& c) -> double& { return c.world.lane_near_edge; });
    num("world.ped_radius", [](ExperimentConfig& c) -> double& { return c.world.ped_radius; });
    num("world.max_episode_s", [](ExperimentConfig& c) -> double& { return c.world.max_episode_s; });
    num("world.motor_delay_mean", [](ExperimentConfig& c) -> double& { return c.world.motor_delay_mean; });
    num("world.motor_delay_std", [](ExperimentConfig& c) -> double& { return c.world.motor_delay_std; });
    num("world.reward_success", [](ExperimentConfig& c) -> double& { return c.world.reward_success; });
    num("world.reward_collision", [](ExperimentConfig& c) -> double& { return c.world.reward_collision; });
    num("world.time_penalty_rate", [](ExperimentConfig& c) -> double& { return c.world.time_penalty_rate; });
    num("perception.process_accel_std",
        [](ExperimentConfig& c) -> double& { return c.perception.process_accel_std; });
    num("train.learning_rate", [](ExperimentConfig& c) -> double& { return c.train.learning_rate; });
    num("train.gamma", [](ExperimentConfig& c) -> double& { return c.train.gamma; });
    num("train.eps_start", [](ExperimentConfig& c) -> double& { return c.train.eps_start; });
    num("train.eps_decay_per_step", [](ExperimentConfig& c) -> double& { return c.train.eps_decay_per_step; });
    num("train.eps_min", [](ExperimentConfig& c) -> double& { return c.train.eps_min; });

    t["world.delay_before_walk"] = [](ExperimentConfig& c, const std::string& v) {
      c.world.delay_before_walk = parse_bool(v);
    };
    t["train.episodes"] = [](ExperimentConfig& c, const std::string& v) {
      c.train.episodes = static_cast<int>(parse_int(v));
    };
    t["train.replay_capacity"] = [](ExperimentConfig& c, const std::string& v) {
      c.train.replay_capacity = parse_size(v);
    };
    t["train.batch_size"] = [](ExperimentConfig& c, const std::string& v) { c.train.batch_size = parse_size(v); };
    t["train.target_sync_steps"] = [](ExperimentConfig& c, const std::string& v) {
      c.train.target_sync_steps = parse_int(v);
    };
    t["train.hidden1"] = [](ExperimentConfig& c, const std::string& v) { c.train.hidden1 = parse_size(v); };
    t["train.hidden2"] = [](ExperimentConfig& c, const std::string& v) { c.train.hidden2 = parse_size(v); };
    t["train.optimizer"] = [](ExperimentConfig& c, const std::string& v) { c.train.optimizer = parse_optimizer(v); };
    t["train.log_every"] = [](ExperimentConfig& c, const std::string& v) {
      c.train.log_every = static_cast<int>(parse_int(v));
    };
    t["train.min_final_reward"] = [](ExperimentConfig& c, const std::string& v) {
      c.min_final_reward = parse_double(v);
    };

    t["grid.sigma_v_values"] = [](ExperimentConfig& c, const std::string& v) {
      c.grid.sigma_v_values = parse_value_list(v);
      c.grid_given = true;
    };
    t["grid.c_values"] = [](ExperimentConfig& c, const std::string& v) {
      c.grid.c_values = parse_value_list(v);
      c.grid_given = true;
    };

    t["variant"] = [](ExperimentConfig& c, const std::string& v) { c.variant = parse_variant(v); };
    t["profile"] = [](ExperimentConfig& c, const std::string& v) { c.profile = parse_profile(v); };
    t["seed"] = [](ExperimentConfig& c, const std::string& v) {
      const long long s = parse_int(v);
      if (s < 0) throw std::invalid_argument("seed must be nonnegative");
      c.seed = static_cast<std::uint64_t>(s);
    };
    t["n_reps"] = [](ExperimentConfig& c, const std::string& v) { c.n_reps = static_cast<int>(parse_int(v)); };
    t["workers"] = [](ExperimentConfig& c, const std::string& v) {
      c.workers = static_cast<unsigned>(parse_size(v));
    };
    t["weights"] = [](ExperimentConfig& c, const std::string& v) { c.weights_path = v; };
    t["trials"] = [](ExperimentConfig& c, const std::string& v) { c.trials_path = v; };
    t["samples"] = [](ExperimentConfig& c, const std::string& v) { c.samples_path = v; };
    t["reference"] = [](ExperimentConfig& c, const std::string& v) { c.reference_path = v; };
    t["synth.cells"] = [](ExperimentConfig& c, const std::string& v) {
      c.synth.cells.clear();
      for (const auto& [s, w] : parse_pairs(v)) c.synth.cells.push_back({canonical_decimal(s), canonical_decimal(w)});
    };
    t["synth.reps"] = [](ExperimentConfig& c, const std::string& v) { c.synth.reps = static_cast<int>(parse_int(v)); };
    t["aic.pairs"] = [](ExperimentConfig& c, const std::string& v) {
      c.aic_pairs.clear();
      for (const auto& [ll, k] : parse_pairs(v)) c.aic_pairs.emplace_back(ll, static_cast<int>(k));
    };
    return t;
  }();
  return table;
}

// Reads non-empty lines, skipping a header that must match `expected`.
std::vector<std::pair<int, std::vector<std::string>>> read_csv(std::istream& in, const std::string& expected) {
  std::vector<std::pair<int, std::vector<std::string>>> rows;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (!header_seen) {
      if (t != expected) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": expected header '" + expected + "', got '" +
                                    std::string(t) + "'");
      }
      header_seen = true;
      continue;
    }
    auto fields = split(t, ',');
    const auto want = split(expected, ',').size();
    if (fields.size() != want) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected " + std::to_string(want) +
                                  " fields, got " + std::to_string(fields.size()));
    }
    for (auto& f : fields) f = std::string(trim(f));
    rows.emplace_back(line_no, std::move(fields));
  }
  if (!header_seen) throw std::invalid_argument("missing header '" + expected + "'");
  return rows;
}

[[noreturn]] void rethrow_at(int line_no, const std::exception& e) {
  throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
}

constexpr const char* kCatalogHeader = "id,kind,v0_mps,d0_m,tau0_s,dstop_m";
constexpr const char* kRewardHeader = "episode,mean_reward";
constexpr const char* kTrialsHeader = "participant_id,scenario_id,cit";
constexpr const char* kSamplesHeader = "scenario_id,sigma_v,c,rep,go_step,cit_s,outcome";
constexpr const char* kFitsHeader = "participant_id,sigma_v,c,log_lik,n_trials";

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = std::string_view(line);
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    try {
      it->second(cfg, value);
    } catch (const std::exception& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + " (" + key + "): " + e.what());
    }
  }
  cfg.world.validate();
  if (cfg.grid_given) cfg.grid.validate();
  if (cfg.n_reps < 1) throw std::invalid_argument("n_reps must be >= 1");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_config(in);
  } catch (const std::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void write_catalog(std::ostream& out, const std::vector<ScenarioSpec>& catalog) {
  out << kCatalogHeader << '\n';
  for (const auto& s : catalog) {
    out << s.id << ',' << to_string(s.kind) << ',' << format_double(s.v0) << ',' << format_double(s.d0) << ','
        << format_double(s.tau0) << ',' << (s.d_stop ? format_double(*s.d_stop) : "") << '\n';
  }
}

std::vector<ScenarioSpec> read_catalog(std::istream& in) {
  std::vector<ScenarioSpec> out;
  for (const auto& [line_no, f] : read_csv(in, kCatalogHeader)) {
    try {
      ScenarioSpec s;
      s.id = f[0];
      s.kind = parse_scenario_kind(f[1]);
      s.v0 = parse_double(f[2]);
      s.d0 = parse_double(f[3]);
      s.tau0 = parse_double(f[4]);
      if (!f[5].empty()) s.d_stop = parse_double(f[5]);
      s.validate();
      out.push_back(std::move(s));
    } catch (const std::exception& e) {
      rethrow_at(line_no, e);
    }
  }
  return out;
}

void write_weights(std::ostream& out, const QNet& net) {
  out << to_string(net.variant()) << ',' << net.in_dim() << ',' << net.hidden1() << ',' << net.hidden2() << '\n';
  for (auto id : {LayerId::hidden1, LayerId::hidden2, LayerId::value, LayerId::advantage}) {
    const auto& shape = net.layer(id);
    const auto w = net.weights(id);
    for (std::size_t r = 0; r < shape.out; ++r) {
      for (std::size_t c = 0; c < shape.in; ++c) {
        if (c) out << ',';
        out << format_double(w[r * shape.in + c]);
      }
      out << '\n';
    }
    const auto b = net.biases(id);
    for (std::size_t r = 0; r < shape.out; ++r) {
      if (r) out << ',';
      out << format_double(b[r]);
    }
    out << '\n';
  }
}

QNet read_weights(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> std::string {
    while (std::getline(in, line)) {
      ++line_no;
      if (!trim(line).empty()) return std::string(trim(line));
    }
    throw std::invalid_argument("weights: unexpected end of file after line " + std::to_string(line_no));
  };
  const auto header = split(next_line(), ',');
  if (header.size() != 4) throw std::invalid_argument("weights: header must be 'variant,in_dim,h1,h2'");
  const Variant variant = parse_variant(std::string(trim(header[0])));
  const auto in_dim = static_cast<std::size_t>(parse_int(header[1]));
  const auto h1 = static_cast<std::size_t>(parse_int(header[2]));
  const auto h2 = static_cast<std::size_t>(parse_int(header[3]));
  if (in_dim != observation_size(variant)) {
    throw std::invalid_argument("weights: in_dim " + std::to_string(in_dim) + " does not match variant " +
                                to_string(variant));
  }
  QNet net(variant, in_dim, h1, h2);
  auto read_row = [&](std::span<double> dst) {
    const auto fields = split(next_line(), ',');
    if (fields.size() != dst.size()) {
      throw std::invalid_argument("weights line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(dst.size()) + " values, got " + std::to_string(fields.size()));
    }
    try {
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = parse_double(fields[i]);
    } catch (const std::exception& e) {
      rethrow_at(line_no, e);
    }
  };
  for (auto id : {LayerId::hidden1, LayerId::hidden2, LayerId::value, LayerId::advantage}) {
    const auto& shape = net.layer(id);
    auto w = net.weights(id);
    for (std::size_t r = 0; r < shape.out; ++r) read_row(w.subspan(r * shape.in, shape.in));
    read_row(net.biases(id));
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) throw std::invalid_argument("weights line " + std::to_string(line_no) + ": trailing data");
  }
  return net;
}

QNet load_weights(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_weights(in);
  } catch (const std::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void write_reward_log(std::ostream& out, const std::vector<RewardLogEntry>& log) {
  out << kRewardHeader << '\n';
  for (const auto& e : log) out << e.episode << ',' << format_double(e.mean_reward) << '\n';
}

std::vector<RewardLogEntry> read_reward_log(std::istream& in) {
  std::vector<RewardLogEntry> out;
  for (const auto& [line_no, f] : read_csv(in, kRewardHeader)) {
    try {
      out.push_back({static_cast<int>(parse_int(f[0])), parse_double(f[1])});
    } catch (const std::exception& e) {
      rethrow_at(line_no, e);
    }
  }
  return out;
}

void write_trials(std::ostream& out, const std::vector<TrialRecord>& trials) {
  out << kTrialsHeader << '\n';
  for (const auto& t : trials) out << t.participant_id << ',' << t.scenario_id << ',' << format_double(t.cit) << '\n';
}

std::vector<TrialRecord> read_trials(std::istream& in, const std::vector<ScenarioSpec>& catalog) {
  std::vector<TrialRecord> out;
  for (const auto& [line_no, f] : read_csv(in, kTrialsHeader)) {
    TrialRecord t;
    t.participant_id = f[0];
    t.scenario_id = f[1];
    if (t.participant_id.empty()) rethrow_at(line_no, std::invalid_argument("empty participant id"));
    const bool known = std::any_of(catalog.begin(), catalog.end(),
                                   [&](const ScenarioSpec& s) { return s.id == t.scenario_id && s.is_evaluation(); });
    if (!known) rethrow_at(line_no, std::invalid_argument("unknown scenario id '" + t.scenario_id + "'"));
    try {
      t.cit = parse_double(f[2]);
    } catch (const std::exception& e) {
      rethrow_at(line_no, e);
    }
    if (!(t.cit > 0.0)) rethrow_at(line_no, std::invalid_argument("cit must be positive"));
    out.push_back(std::move(t));
  }
  return out;
}

void write_cit_samples(std::ostream& out, const std::vector<GridTrial>& trials) {
  out << kSamplesHeader << '\n';
  for (const auto& t : trials) {
    const auto& r = t.result;
    out << r.scenario_id << ',' << format_double(r.params.sigma_v) << ',' << format_double(r.params.looming_weight)
        << ',' << t.rep << ',' << (r.go_step ? std::to_string(*r.go_step) : "") << ','
        << (r.cit ? format_double(*r.cit) : "") << ',' << to_string(r.outcome) << '\n';
  }
}

std::vector<GridTrial> read_cit_samples(std::istream& in) {
  std::vector<GridTrial> out;
  for (const auto& [line_no, f] : read_csv(in, kSamplesHeader)) {
    try {
      GridTrial t;
      t.result.scenario_id = f[0];
      t.result.params.sigma_v = parse_double(f[1]);
      t.result.params.looming_weight = parse_double(f[2]);
      t.rep = static_cast<int>(parse_int(f[3]));
      if (!f[4].empty()) t.result.go_step = static_cast<int>(parse_int(f[4]));
      if (!f[5].empty()) t.result.cit = parse_double(f[5]);
      t.result.outcome = parse_terminal_kind(f[6]);
      out.push_back(std::move(t));
    } catch (const std::exception& e) {
      rethrow_at(line_no, e);
    }
  }
  return out;
}

std::map<std::string, std::vector<double>> read_reference(std::istream& in) {
  std::stringstream buf;
  buf << in.rdbuf();
  std::string first;
  {
    std::istringstream peek(buf.str());
    while (std::getline(peek, first) && trim(first).empty()) {
    }
  }
  std::map<std::string, std::vector<double>> out;
  std::istringstream body(buf.str());
  if (trim(first) == kTrialsHeader) {
    for (const auto& [line_no, f] : read_csv(body, kTrialsHeader)) {
      try {
        out[f[1]].push_back(parse_double(f[2]));
      } catch (const std::exception& e) {
        rethrow_at(line_no, e);
      }
    }
  } else if (trim(first) == kSamplesHeader) {
    for (const auto& t : read_cit_samples(body)) {
      auto& list = out[t.result.scenario_id];
      if (t.result.cit) list.push_back(*t.result.cit);
    }
  } else {
    throw std::invalid_argument("reference: unrecognized header '" + std::string(trim(first)) + "'");
  }
  return out;
}

void write_fits(std::ostream& out, const std::vector<FitResult>& fits) {
  out << kFitsHeader << '\n';
  for (const auto& f : fits) {
    out << f.participant_id << ',' << format_double(f.sigma_v) << ',' << format_double(f.c) << ','
        << format_double(f.log_lik) << ',' << f.n_trials << '\n';
  }
}

std::vector<FitResult> read_fits(std::istream& in) {
  std::vector<FitResult> out;
  for (const auto& [line_no, f] : read_csv(in, kFitsHeader)) {
    try {
      out.push_back({f[0], parse_double(f[1]), parse_double(f[2]), parse_double(f[3]),
                     static_cast<int>(parse_int(f[4]))});
    } catch (const std::exception& e) {
      rethrow_at(line_no, e);
    }
  }
  return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  return in;
}

}  // namespace pedcross
