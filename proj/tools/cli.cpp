#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "latent_reach/dynamics.hpp"
#include "latent_reach/metrics.hpp"
#include "latent_reach/monitor.hpp"
#include "latent_reach/oracle.hpp"
#include "latent_reach/parallel.hpp"
#include "latent_reach/steer.hpp"
#include "latent_reach/store.hpp"
#include "latent_reach/toy.hpp"
#include "latent_reach/train.hpp"

namespace latent_reach::cli {

namespace {

using Json = nlohmann::ordered_json;

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

void emit(std::ostream& out, const Json& j) { out << j.dump() << '\n'; }

struct ToyFlags {
  std::size_t dim = 2;
  double lambda = 0.2;
  double failure_radius = 0.3;

  void add_to(CLI::App& app, bool radius_is_failure_radius) {
    app.add_option("--dim", dim, "Latent dimension of the toy system")->check(CLI::PositiveNumber);
    app.add_option("--lambda", lambda, "Contraction rate of the toy system");
    if (radius_is_failure_radius) {
      app.add_option("--radius,--failure-radius", failure_radius, "Failure disk radius around the unsafe attractor");
    } else {
      app.add_option("--failure-radius", failure_radius, "Failure disk radius around the unsafe attractor");
    }
  }
  TwoAttractorSystem system() const { return TwoAttractorSystem(TwoAttractorParams{dim, lambda, failure_radius}); }
};

struct StartFlags {
  std::string data;
  std::size_t count = 100;
  std::uint64_t seed = 1;
  double box = 2.0;

  void add_to(CLI::App& app) {
    app.add_option("--data", data, "Dataset whose initial states are used as starts");
    app.add_option("--count", count, "Number of random starts when --data is absent");
    app.add_option("--start-seed", seed, "Seed for random starts");
    app.add_option("--box", box, "Random starts are uniform in [-box, box]^dim");
  }
  std::vector<LatentPoint> starts(std::size_t dim) const {
    if (data.empty()) return toy::sample_starts(count, dim, box, seed);
    const auto ds = store::read_dataset(data);
    if (ds.header.dim != dim) throw DimensionError("dataset dim does not match system dim");
    std::vector<LatentPoint> out;
    for (const auto& t : ds.trajectories) out.push_back(t.states.front());
    return out;
  }
};

// A value function plus whatever it borrows from.
struct ValueSource {
  std::optional<ValueNetwork> net;
  std::unique_ptr<ValueFunction> fn;
};

ValueSource make_value_source(const std::string& ckpt, const std::string& oracle, const TwoAttractorSystem& system,
                              std::size_t oracle_horizon, std::size_t grid_res) {
  ValueSource src;
  if (!ckpt.empty() && !oracle.empty()) throw CLI::ValidationError("--ckpt and --oracle are mutually exclusive");
  if (!ckpt.empty()) {
    src.net = store::load_checkpoint(ckpt, system.dim()).net;
    src.fn = std::make_unique<NetworkValue>(*src.net);
  } else if (oracle == "rollout") {
    src.fn = std::make_unique<RolloutValue>(system, toy::failure_target(system), oracle_horizon);
  } else if (oracle == "grid") {
    src.fn = std::make_unique<GridValue>(grid_brt(system, toy::failure_target(system),
                                                  GridSpec::uniform(system.dim(), -2.0, 2.0, grid_res), oracle_horizon));
  } else if (!oracle.empty()) {
    throw CLI::ValidationError("--oracle must be 'rollout' or 'grid'");
  } else {
    throw CLI::ValidationError("one of --ckpt or --oracle is required");
  }
  return src;
}

struct SteerOutcome {
  std::vector<Trajectory> unsteered;
  std::vector<Trajectory> steered;
  std::size_t interventions = 0;
  double max_control_norm = 0.0;
};

SteerOutcome steer_all(const TwoAttractorSystem& system, const ValueFunction& value,
                       const std::vector<LatentPoint>& starts, std::size_t horizon, const SteeringConfig& cfg) {
  SteerOutcome out;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    SteeringConfig per = cfg;
    per.seed = cfg.seed + i;
    const auto steered = steered_rollout(system, value, starts[i], horizon, per);
    out.interventions += steered.interventions();
    out.max_control_norm = std::max(out.max_control_norm, steered.max_control_norm());
    out.steered.push_back(toy::label_rollout(system, steered.states));
    out.unsteered.push_back(toy::label_rollout(system, rollout(system, starts[i], horizon)));
  }
  return out;
}

struct QualityStats {
  std::optional<double> coherence;
  std::optional<double> diversity;
};

QualityStats response_quality(const std::vector<Trajectory>& trajs) {
  double coh = 0.0, div = 0.0;
  std::size_t n_coh = 0, n_div = 0;
  for (const auto& t : trajs) {
    if (t.prompt_embedding && t.response_embedding) {
      if (auto c = coherence(*t.prompt_embedding, *t.response_embedding)) {
        coh += *c;
        ++n_coh;
      }
    }
    if (t.tokens) {
      div += diversity(*t.tokens);
      ++n_div;
    }
  }
  QualityStats q;
  if (n_coh) q.coherence = coh / static_cast<double>(n_coh);
  if (n_div) q.diversity = div / static_cast<double>(n_div);
  return q;
}

std::vector<bool> unsafe_flags(const std::vector<Trajectory>& trajs) {
  std::vector<bool> out;
  for (const auto& t : trajs) out.push_back(trajectory_is_unsafe(t));
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path + ": malformed JSON (" + e.what() + ")");
  }
}

std::vector<double> parse_bounds(const std::vector<double>& flat, std::size_t dim, std::vector<double>& hi) {
  std::vector<double> lo;
  hi.clear();
  if (flat.size() == 2) {
    lo.assign(dim, flat[0]);
    hi.assign(dim, flat[1]);
  } else if (flat.size() == 2 * dim) {
    for (std::size_t a = 0; a < dim; ++a) {
      lo.push_back(flat[2 * a]);
      hi.push_back(flat[2 * a + 1]);
    }
  } else {
    throw CLI::ValidationError("--bounds takes lo,hi or one lo,hi pair per axis");
  }
  return lo;
}

std::string config_arg_value(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (const auto& x : v) {
      if (!s.empty()) s += ',';
      s += config_arg_value(x);
    }
    return s;
  }
  return v.dump();
}

void append_config_args(const Json& obj, CLI::App* sub, bool strict, std::vector<std::string>& args) {
  for (const auto& [key, val] : obj.items()) {
    if (val.is_object()) continue;
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    flag = "--" + flag;
    if (flag == "--config") continue;
    CLI::Option* opt = nullptr;
    try {
      opt = sub->get_option(flag);
    } catch (const CLI::OptionNotFound&) {
      if (strict) throw CLI::ValidationError("config key '" + key + "' is not a flag of " + sub->get_name());
      continue;
    }
    if (val.is_boolean()) {
      if (val.get<bool>()) args.push_back(flag);
      continue;
    }
    if (val.is_null()) continue;
    (void)opt;
    args.push_back(flag);
    args.push_back(config_arg_value(val));
  }
}

// Splices flags from a JSON config file in front of the explicit ones; with
// last-value-wins parsing, explicit flags override file values. Top-level keys
// apply to any subcommand that has the flag; an object keyed by the subcommand
// name applies to that subcommand only and must name valid flags.
std::vector<std::string> expand_config(CLI::App& app, const std::vector<std::string>& args) {
  if (args.size() < 2) return args;
  CLI::App* sub = nullptr;
  for (auto* s : app.get_subcommands([](CLI::App*) { return true; })) {
    if (s->get_name() == args[1]) sub = s;
  }
  if (!sub) return args;
  std::optional<std::string> config_path;
  std::vector<std::string> rest;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!config_path) return args;
  const Json cfg = read_json_file(*config_path);
  if (!cfg.is_object()) throw CLI::ValidationError("config file must hold a JSON object");
  std::vector<std::string> out = {args[0], args[1]};
  append_config_args(cfg, sub, false, out);
  if (cfg.contains(sub->get_name()) && cfg[sub->get_name()].is_object()) {
    append_config_args(cfg[sub->get_name()], sub, true, out);
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  configure_threads_from_env();

  CLI::App app{"Reachability-based safety monitoring and steering for latent dynamical systems", "latent-reach"};
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config_unused;  // consumed by expand_config
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  // gen-toy
  auto* gen = app.add_subcommand("gen-toy", "Generate a toy trajectory dataset");
  toy::ToyDatasetConfig gen_cfg;
  ToyFlags gen_toy;
  std::string gen_out = "-";
  gen->add_option("--count", gen_cfg.count, "Number of trajectories");
  gen->add_option("--horizon", gen_cfg.horizon, "Steps per trajectory (T)")->check(CLI::PositiveNumber);
  gen_toy.add_to(*gen, true);
  gen->add_option("--seed", gen_cfg.seed, "Seed for start states");
  gen->add_option("--box", gen_cfg.box, "Starts are uniform in [-box, box]^dim");
  gen->add_option("--out", gen_out, "Output path, '-' for stdout");
  gen->add_option("--config", config_unused, "JSON file supplying flag values");

  // train
  auto* tr = app.add_subcommand("train", "Train a safety value network");
  TrainConfig train_cfg;
  std::string train_mode = "sample", train_data, train_out, warm_start;
  std::optional<double> train_lr;
  tr->add_option("--mode", train_mode, "sample (terminal labels) or rl (discounted-min recursion)")
      ->check(CLI::IsMember({"sample", "rl"}));
  tr->add_option("--gamma", train_cfg.gamma, "Discount factor for rl mode");
  tr->add_option("--lr", train_lr, "Learning rate (default 1e-4 sample, 3e-5 rl)");
  tr->add_option("--batch", train_cfg.batch_size, "Batch size")->check(CLI::PositiveNumber);
  tr->add_option("--epochs", train_cfg.epochs, "Epochs");
  tr->add_option("--unsafe-weight", train_cfg.unsafe_weight, "Class weight of unsafe trajectories");
  tr->add_option("--curriculum", train_cfg.curriculum_epochs, "Curriculum ramp length in epochs (rl mode)");
  tr->add_option("--warm-start", warm_start, "Checkpoint to initialize from");
  tr->add_option("--seed", train_cfg.seed, "Seed for init and shuffling");
  tr->add_option("--hidden1", train_cfg.hidden1, "First hidden width")->check(CLI::PositiveNumber);
  tr->add_option("--hidden2", train_cfg.hidden2, "Second hidden width")->check(CLI::PositiveNumber);
  tr->add_option("--weight-decay", train_cfg.weight_decay, "Decoupled weight decay");
  tr->add_option("--data", train_data, "Training dataset")->required();
  tr->add_option("--out", train_out, "Checkpoint output path")->required();
  tr->add_option("--config", config_unused, "JSON file supplying flag values");

  // monitor
  auto* mon = app.add_subcommand("monitor", "Evaluate V along trajectories and flag BRT entry");
  std::string mon_ckpt, mon_data;
  double mon_threshold = 0.0;
  bool mon_verbose = false;
  mon->add_option("--ckpt", mon_ckpt, "Value network checkpoint")->required();
  mon->add_option("--data", mon_data, "Dataset to monitor")->required();
  mon->add_option("--threshold", mon_threshold, "Flag when V <= threshold");
  mon->add_flag("--verbose", mon_verbose, "Include per-state values");
  mon->add_option("--config", config_unused, "JSON file supplying flag values");

  // steer
  auto* st = app.add_subcommand("steer", "Steered rollouts on the toy system with the least-restrictive filter");
  SteeringConfig steer_cfg;
  ToyFlags steer_toy;
  StartFlags steer_starts;
  std::string steer_ckpt, steer_oracle, steer_out;
  std::size_t steer_horizon = 30, oracle_horizon = kDefaultOracleHorizon, oracle_res = 81;
  bool no_steer_initial = false;
  st->add_option("--ckpt", steer_ckpt, "Value network checkpoint");
  st->add_option("--oracle", steer_oracle, "Use an exact value instead of a network: rollout or grid");
  st->add_option("--alpha", steer_cfg.alpha, "Intervene when V <= alpha");
  st->add_option("--radius", steer_cfg.radius, "Radius of the perturbation ball");
  st->add_option("--candidates", steer_cfg.candidates, "Ball samples per intervention")->check(CLI::PositiveNumber);
  st->add_option("--seed", steer_cfg.seed, "Base seed for candidate sampling");
  st->add_flag("--no-steer-initial", no_steer_initial, "Never perturb the initial (prompt) state");
  st->add_option("--horizon", steer_horizon, "Steps per rollout")->check(CLI::PositiveNumber);
  st->add_option("--oracle-horizon", oracle_horizon, "Horizon of the exact oracle value");
  st->add_option("--oracle-res", oracle_res, "Nodes per axis for --oracle grid");
  st->add_option("--out", steer_out, "Write steered trajectories as a dataset");
  steer_toy.add_to(*st, false);
  steer_starts.add_to(*st);
  st->add_option("--config", config_unused, "JSON file supplying flag values");

  // eval
  auto* ev = app.add_subcommand("eval", "Metrics over monitor reports and datasets");
  std::string ev_reports, ev_data, ev_steered, ev_times;
  ev->add_option("--reports", ev_reports, "Monitor output (JSON lines)")->required();
  ev->add_option("--data", ev_data, "Dataset the reports were computed on")->required();
  ev->add_option("--steered", ev_steered, "Steered dataset aligned with --data, for safety rate");
  ev->add_option("--times", ev_times, "JSON array of generation times in seconds");
  ev->add_option("--config", config_unused, "JSON file supplying flag values");

  // oracle-compare
  auto* oc = app.add_subcommand("oracle-compare", "Compare a checkpoint against the grid BRT oracle");
  std::string oc_ckpt;
  std::vector<double> oc_bounds = {-2.0, 2.0};
  std::size_t oc_res = 41, oc_horizon = kDefaultOracleHorizon;
  double oc_confident = 0.05;
  ToyFlags oc_toy;
  oc->add_option("--ckpt", oc_ckpt, "Value network checkpoint")->required();
  oc->add_option("--bounds", oc_bounds, "lo,hi for all axes or one pair per axis")->delimiter(',')->expected(2, 6);
  oc->add_option("--res", oc_res, "Nodes per axis");
  oc->add_option("--horizon", oc_horizon, "Oracle rollout horizon");
  oc->add_option("--confident", oc_confident, "MAE is also reported over nodes with |V| >= this");
  oc_toy.add_to(*oc, false);
  oc->add_option("--config", config_unused, "JSON file supplying flag values");

  // validate
  auto* va = app.add_subcommand("validate", "Check a dataset file against the schema");
  std::string va_data;
  va->add_option("--data", va_data, "Dataset to check")->required();
  va->add_option("--config", config_unused, "JSON file supplying flag values");

  // sweep
  auto* sw = app.add_subcommand("sweep", "Grid search over alpha and radius");
  std::string sw_grid, sw_ckpt, sw_oracle;
  SteeringConfig sw_cfg;
  ToyFlags sw_toy;
  StartFlags sw_starts;
  std::size_t sw_horizon = 30, sw_oracle_horizon = kDefaultOracleHorizon, sw_oracle_res = 81;
  sw->add_option("--grid", sw_grid, "JSON {\"alpha\":[...],\"radius\":[...],\"radius_relative\":bool}");
  sw->add_option("--ckpt", sw_ckpt, "Value network checkpoint");
  sw->add_option("--oracle", sw_oracle, "Use an exact value instead of a network: rollout or grid");
  sw->add_option("--candidates", sw_cfg.candidates, "Ball samples per intervention")->check(CLI::PositiveNumber);
  sw->add_option("--seed", sw_cfg.seed, "Base seed for candidate sampling");
  sw->add_option("--horizon", sw_horizon, "Steps per rollout")->check(CLI::PositiveNumber);
  sw->add_option("--oracle-horizon", sw_oracle_horizon, "Horizon of the exact oracle value");
  sw->add_option("--oracle-res", sw_oracle_res, "Nodes per axis for --oracle grid");
  sw_toy.add_to(*sw, false);
  sw_starts.add_to(*sw);
  sw->add_option("--config", config_unused, "JSON file supplying flag values");

  std::vector<std::string> args;
  try {
    args = expand_config(app, raw_args);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      gen_cfg.system = TwoAttractorParams{gen_toy.dim, gen_toy.lambda, gen_toy.failure_radius};
      const auto ds = toy::make_dataset(gen_cfg);
      if (gen_out == "-") {
        store::write_dataset(out, ds);
      } else {
        store::write_dataset(gen_out, ds);
        std::size_t unsafe = 0;
        for (const auto& t : ds.trajectories) unsafe += trajectory_is_unsafe(t) ? 1 : 0;
        emit(out, Json{{"out", gen_out}, {"trajectories", ds.trajectories.size()}, {"unsafe", unsafe}});
      }
      return kExitOk;
    }

    if (tr->parsed()) {
      train_cfg.mode = parse_train_mode(train_mode);
      train_cfg.learning_rate = train_lr;
      if (!warm_start.empty()) train_cfg.warm_start = warm_start;
      const auto ds = store::read_dataset(train_data);
      auto result = train(ds, train_cfg);
      store::save_checkpoint(train_out, result.net, result.optimizer);
      const auto& r = result.report;
      Json cfg = {{"mode", to_string(train_cfg.mode)},
                  {"gamma", train_cfg.gamma},
                  {"lr", train_cfg.effective_learning_rate()},
                  {"batch", train_cfg.batch_size},
                  {"epochs", train_cfg.epochs},
                  {"unsafe_weight", train_cfg.unsafe_weight},
                  {"curriculum", train_cfg.curriculum_epochs},
                  {"seed", train_cfg.seed},
                  {"warm_start", warm_start.empty() ? Json(nullptr) : Json(warm_start)},
                  {"hidden1", train_cfg.hidden1},
                  {"hidden2", train_cfg.hidden2},
                  {"weight_decay", train_cfg.weight_decay}};
      emit(out, Json{{"checkpoint", train_out},
                     {"epoch_loss", r.epoch_loss},
                     {"train_mse", r.train_mse},
                     {"val_mse", optional_number(r.val_mse)},
                     {"train_trajectories", r.train_trajectories},
                     {"val_trajectories", r.val_trajectories},
                     {"steps", r.steps},
                     {"seconds", r.seconds},
                     {"config", cfg}});
      return kExitOk;
    }

    if (mon->parsed()) {
      const auto ds = store::read_dataset(mon_data);
      const auto ck = store::load_checkpoint(mon_ckpt, ds.header.dim);
      const NetworkValue value(ck.net);
      for (std::size_t i = 0; i < ds.trajectories.size(); ++i) {
        const auto rep = monitor_trajectory(value, ds.trajectories[i], mon_threshold);
        Json j = {{"index", i},
                  {"flagged", rep.flagged},
                  {"first_flag_index", rep.first_flag_index ? Json(*rep.first_flag_index) : Json(nullptr)},
                  {"threshold", rep.threshold}};
        if (mon_verbose) j["values"] = rep.values;
        emit(out, j);
      }
      return kExitOk;
    }

    if (st->parsed()) {
      const auto system = steer_toy.system();
      steer_cfg.steer_initial_state = !no_steer_initial;
      const auto src = make_value_source(steer_ckpt, steer_oracle, system, oracle_horizon, oracle_res);
      const auto starts = steer_starts.starts(system.dim());
      const auto res = steer_all(system, *src.fn, starts, steer_horizon, steer_cfg);
      if (!steer_out.empty()) {
        TrajectoryDataset ds{toy::toy_header(system.dim()), res.steered};
        ds.header.source = "toy:two-attractor:steered";
        store::write_dataset(steer_out, ds);
      }
      const auto before = unsafe_flags(res.unsteered), after = unsafe_flags(res.steered);
      const auto q = response_quality(res.steered);
      emit(out, Json{{"count", starts.size()},
                     {"unsafe_before", std::count(before.begin(), before.end(), true)},
                     {"unsafe_after", std::count(after.begin(), after.end(), true)},
                     {"safety_rate", optional_number(safety_rate(before, after))},
                     {"interventions", res.interventions},
                     {"max_control_norm", res.max_control_norm},
                     {"coherence", optional_number(q.coherence)},
                     {"diversity", optional_number(q.diversity)},
                     {"alpha", steer_cfg.alpha},
                     {"radius", steer_cfg.radius},
                     {"candidates", steer_cfg.candidates}});
      return kExitOk;
    }

    if (ev->parsed()) {
      const auto ds = store::read_dataset(ev_data);
      std::vector<MonitorReport> reports;
      {
        std::ifstream in(ev_reports);
        if (!in) throw Error("cannot open " + ev_reports);
        std::string line;
        std::size_t n = 0;
        while (std::getline(in, line)) {
          ++n;
          if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
          Json j;
          try {
            j = Json::parse(line);
          } catch (const nlohmann::json::exception&) {
            throw Error(ev_reports + ": line " + std::to_string(n) + ": malformed JSON");
          }
          MonitorReport r;
          r.flagged = j.at("flagged").get<bool>();
          if (!j.at("first_flag_index").is_null()) r.first_flag_index = j["first_flag_index"].get<std::size_t>();
          if (j.contains("threshold")) r.threshold = j["threshold"].get<double>();
          reports.push_back(std::move(r));
        }
      }
      if (reports.size() != ds.trajectories.size()) {
        throw Error("reports (" + std::to_string(reports.size()) + ") and trajectories (" +
                    std::to_string(ds.trajectories.size()) + ") differ in count");
      }
      std::vector<bool> predicted, truth = unsafe_flags(ds.trajectories);
      for (const auto& r : reports) predicted.push_back(r.flagged);
      const auto c = confusion_and_f1(predicted, truth);
      const auto q = response_quality(ds.trajectories);
      Json j = {{"count", reports.size()},
                {"confusion", {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}}},
                {"accuracy", c.accuracy},
                {"precision", optional_number(c.precision)},
                {"recall", optional_number(c.recall)},
                {"f1", optional_number(c.f1)},
                {"first_token_index", optional_number(first_token_index_stat(reports, truth))},
                {"coherence", optional_number(q.coherence)},
                {"diversity", optional_number(q.diversity)}};
      if (!ev_steered.empty()) {
        const auto steered = store::read_dataset(ev_steered);
        const auto after = unsafe_flags(steered.trajectories);
        if (after.size() != truth.size()) throw Error("steered dataset is not aligned with --data");
        const auto sq = response_quality(steered.trajectories);
        j["safety_rate"] = optional_number(safety_rate(truth, after));
        j["steered_coherence"] = optional_number(sq.coherence);
        j["steered_diversity"] = optional_number(sq.diversity);
      }
      if (!ev_times.empty()) {
        const auto times = read_json_file(ev_times).get<std::vector<double>>();
        j["inference_time"] = mean_inference_time(times);
      }
      emit(out, j);
      return kExitOk;
    }

    if (oc->parsed()) {
      const auto ck = store::load_checkpoint(oc_ckpt);
      ToyFlags flags = oc_toy;
      flags.dim = ck.net.input_dim();
      const auto system = flags.system();
      GridSpec spec;
      spec.lo = parse_bounds(oc_bounds, system.dim(), spec.hi);
      spec.resolution.assign(system.dim(), oc_res);
      const auto grid = grid_brt(system, toy::failure_target(system), spec, oc_horizon);
      const NetworkValue value(ck.net);
      std::vector<double> pred(grid.values.size());
      for_each_index(Execution::parallel, pred.size(), [&](std::size_t i) { pred[i] = value(grid.node(i)); });
      std::size_t agree = 0, confident = 0;
      double abs_sum = 0.0, conf_sum = 0.0;
      for (std::size_t i = 0; i < pred.size(); ++i) {
        const double v = grid.values[i];
        if ((v <= 0.0) == (pred[i] <= 0.0)) ++agree;
        abs_sum += std::abs(v - pred[i]);
        if (std::abs(v) >= oc_confident) {
          ++confident;
          conf_sum += std::abs(v - pred[i]);
        }
      }
      const double n = static_cast<double>(pred.size());
      emit(out, Json{{"sign_agreement", static_cast<double>(agree) / n},
                     {"mae", abs_sum / n},
                     {"mae_confident", confident ? Json(conf_sum / static_cast<double>(confident)) : Json(nullptr)},
                     {"confident_threshold", oc_confident},
                     {"confident_nodes", confident},
                     {"grid_meta",
                      {{"dim", system.dim()},
                       {"lo", spec.lo},
                       {"hi", spec.hi},
                       {"resolution", spec.resolution},
                       {"horizon", oc_horizon},
                       {"nodes", pred.size()}}}});
      return kExitOk;
    }

    if (va->parsed()) {
      try {
        const auto ds = store::read_dataset(va_data);
        emit(out, Json{{"valid", true}, {"trajectories", ds.trajectories.size()}, {"dim", ds.header.dim}});
        return kExitOk;
      } catch (const Error& e) {
        emit(out, Json{{"valid", false}, {"error", e.what()}});
        err << "invalid: " << e.what() << '\n';
        return kExitFailure;
      }
    }

    if (sw->parsed()) {
      std::vector<double> alphas = {0.0, 0.1, 0.2, 0.3};
      std::vector<double> radii = {0.2, 0.4, 0.6, 0.8, 1.0};
      bool relative = false;
      if (!sw_grid.empty()) {
        const Json g = read_json_file(sw_grid);
        if (g.contains("alpha")) alphas = g["alpha"].get<std::vector<double>>();
        if (g.contains("radius")) radii = g["radius"].get<std::vector<double>>();
        if (g.contains("radius_relative")) relative = g["radius_relative"].get<bool>();
      }
      const auto system = sw_toy.system();
      const auto src = make_value_source(sw_ckpt, sw_oracle, system, sw_oracle_horizon, sw_oracle_res);
      // unsafe test scenarios only
      std::vector<LatentPoint> starts;
      double max_norm = 0.0;
      for (const auto& z0 : sw_starts.starts(system.dim())) {
        const auto states = rollout(system, z0, sw_horizon);
        for (const auto& s : states) max_norm = std::max(max_norm, s.norm());
        if (trajectory_is_unsafe(toy::label_rollout(system, states))) starts.push_back(z0);
      }
      Json cells = Json::array();
      Json best = nullptr;
      double best_score = -std::numeric_limits<double>::infinity();
      for (double a : alphas) {
        for (double r : radii) {
          SteeringConfig cfg = sw_cfg;
          cfg.alpha = a;
          cfg.radius = relative ? r * max_norm : r;
          const auto res = steer_all(system, *src.fn, starts, sw_horizon, cfg);
          const auto sr = safety_rate(unsafe_flags(res.unsteered), unsafe_flags(res.steered));
          const auto q = response_quality(res.steered);
          std::optional<double> score;
          if (sr && q.coherence && q.diversity) score = *sr + *q.coherence + *q.diversity;
          Json cell = {{"alpha", a},
                       {"radius", cfg.radius},
                       {"safety_rate", optional_number(sr)},
                       {"coherence", optional_number(q.coherence)},
                       {"diversity", optional_number(q.diversity)},
                       {"score", optional_number(score)}};
          if (score && *score > best_score) {
            best_score = *score;
            best = cell;
          }
          cells.push_back(std::move(cell));
        }
      }
      emit(out, Json{{"scenarios", starts.size()}, {"max_norm", max_norm}, {"cells", cells}, {"best", best}});
      return kExitOk;
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace latent_reach::cli
