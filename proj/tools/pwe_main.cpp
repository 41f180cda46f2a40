#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pwe/configurators.hpp"
#include "pwe/layered_net.hpp"
#include "pwe/learner.hpp"
#include "pwe/raytracer.hpp"
#include "pwe/scenario_io.hpp"
#include "pwe/svg_render.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("PWE_LOG");
    if (env == nullptr) return LogLevel::Info;
    const std::string v = env;
    if (v == "debug") return LogLevel::Debug;
    if (v == "error") return LogLevel::Error;
    return LogLevel::Info;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) std::cerr << "[info] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::Debug) std::cerr << "[debug] " << msg << "\n";
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string join_counts(const std::vector<int>& counts) {
  std::string out;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (i) out += '|';
    out += std::to_string(counts[i]);
  }
  return out;
}

std::vector<int> active_tiles_per_layer(const pwe::Scenario& s,
                                        const pwe::EnvironmentConfig& config) {
  std::vector<int> counts;
  for (int wall_id : s.layer_order) {
    int n = 0;
    for (const auto& [key, tc] : config.tiles)
      if (key.first == wall_id && tc.active) ++n;
    counts.push_back(n);
  }
  return counts;
}

std::vector<pwe::Ray> scenario_rays(const pwe::Scenario& s) {
  const pwe::User& tx = s.tx();
  return pwe::emit_rays(tx, s.physics.ray_count, pwe::dbm_to_watts(tx.tx_power_dbm));
}

// ---------------------------------------------------------------------------
// validate

int cmd_validate(const std::string& path) {
  pwe::Scenario s;
  try {
    s = pwe::load_scenario(path);
  } catch (const std::exception& e) {
    std::cout << "error: " << e.what() << "\n";
    return 1;
  }

  const std::vector<std::string> issues = pwe::validate_scenario(s);
  if (!issues.empty()) {
    std::cout << "scenario: " << issues.size() << " problem(s)\n";
    for (const std::string& i : issues) std::cout << "  - " << i << "\n";
    return 1;
  }
  std::cout << "scenario: ok (" << s.walls.size() << " walls, " << s.layer_order.size()
            << " coated layers, " << s.users.size() << " users)\n";

  pwe::LayeredNet net;
  try {
    net = pwe::build_layered_net(s);
  } catch (const std::exception& e) {
    std::cout << "error: " << e.what() << "\n";
    return 1;
  }
  const std::vector<std::string> net_issues = pwe::validate_net(net);
  if (!net_issues.empty()) {
    std::cout << "network: " << net_issues.size() << " problem(s)\n";
    for (const std::string& i : net_issues) std::cout << "  - " << i << "\n";
    return 1;
  }
  std::cout << "network: ok (" << net.kappa() << " layers, " << net.nodes.size()
            << " nodes, " << net.links.size() << " links)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train

void write_network_svg_file(const pwe::LayeredNet& net, const pwe::TrainParams& params,
                            const pwe::TrainingResult& result, pwe::NetState& state,
                            const std::string& path) {
  pwe::NetState before_state = pwe::make_net_state(net, params);
  pwe::set_input_powers(net, before_state, params.virtual_input_fractions);
  const std::vector<double> before_omegas = pwe::initial_omegas(net, params);
  pwe::feed_forward_with(net, before_omegas, before_state);

  pwe::NetworkView before;
  before.state = &before_state;
  before.omegas = before_omegas;
  before.label = "untrained (rmse " + fmt("%.3g", pwe::rmse_of(before_state)) + ")";

  pwe::NetworkView after;
  after.state = &state;
  after.omegas = result.final_omegas;
  after.label = "trained (rmse " + fmt("%.3g", pwe::rmse_of(state)) + ", " +
                std::to_string(result.cycles_run) + " cycles)";

  pwe::write_text_file(pwe::render_network_svg(net, before, after), path);
}

int cmd_train(const std::string& path, const std::string& out_dir,
              std::optional<std::uint64_t> seed_override) {
  pwe::Scenario s = pwe::load_scenario(path);
  pwe::require_valid(s);
  pwe::LayeredNet net = pwe::build_layered_net(s);

  pwe::TrainParams params = s.train;
  if (seed_override) params.seed = *seed_override;

  fs::create_directories(out_dir);
  log_info("training on " + path + " with seed " + std::to_string(params.seed));

  const auto t0 = Clock::now();
  pwe::NetState state;
  const pwe::TrainingResult result = pwe::train(net, params, state);
  const double ms = ms_since(t0);

  // The recorded state can trail the last update when the cycle cap hits;
  // refresh so every artifact reflects the final steering angles.
  pwe::feed_forward(net, state);

  pwe::write_training_csv(result, (fs::path(out_dir) / "training_curve.csv").string());
  pwe::write_omegas_json(net, result, (fs::path(out_dir) / "omegas.json").string());
  write_network_svg_file(net, params, result, state,
                         (fs::path(out_dir) / "network.svg").string());

  std::cout << (result.converged ? "converged" : "did not converge") << " after "
            << result.cycles_run << " cycle(s)";
  if (!result.rmse_curve.empty())
    std::cout << ", rmse " << fmt("%.6g", result.rmse_curve.back());
  std::cout << " (" << fmt("%.1f", ms) << " ms)\n";
  std::cout << "wrote training_curve.csv, omegas.json, network.svg to " << out_dir
            << "\n";
  return result.converged ? 0 : 2;
}

// ---------------------------------------------------------------------------
// trace

nlohmann::ordered_json trace_summary_json(const std::string& scheme,
                                          const pwe::TraceResult& r) {
  nlohmann::ordered_json doc;
  doc["scheme"] = scheme;
  doc["received_w"] = r.received_w;
  const auto dbm = pwe::received_power_dbm(r);
  if (dbm)
    doc["received_dbm"] = *dbm;
  else
    doc["received_dbm"] = nullptr;
  doc["intercepted_ray_power_w"] = r.intercepted_ray_power_w;
  doc["absorbed_fraction"] = r.absorbed_fraction;
  doc["reasons"] = {{"received", r.reasons.received},
                    {"absorbed", r.reasons.absorbed},
                    {"bounce_limit", r.reasons.bounce_limit},
                    {"escaped", r.reasons.escaped},
                    {"truncated", r.reasons.truncated}};
  doc["ledger"] = {{"emitted", r.ledger.emitted},
                   {"received", r.ledger.received},
                   {"spread_loss", r.ledger.spread_loss},
                   {"absorbed", r.ledger.absorbed},
                   {"bounce_dissipated", r.ledger.bounce_dissipated},
                   {"bounce_limit", r.ledger.bounce_limit},
                   {"escaped", r.ledger.escaped},
                   {"truncated", r.ledger.truncated}};
  return doc;
}

std::string dbm_text(const std::optional<double>& dbm, const char* none) {
  return dbm ? fmt("%.2f", *dbm) : none;
}

int cmd_trace(const std::string& path, const std::string& config_path,
              const std::string& out_dir) {
  pwe::Scenario s = pwe::load_scenario(path);
  pwe::require_valid(s);
  const pwe::EnvironmentConfig config = pwe::load_config(config_path);

  fs::create_directories(out_dir);
  const auto t0 = Clock::now();
  const pwe::TraceResult result = pwe::trace(s, config, scenario_rays(s));
  const double ms = ms_since(t0);

  pwe::write_segments_csv(result, (fs::path(out_dir) / "segments.csv").string());
  const auto dbm = pwe::received_power_dbm(result);
  pwe::write_text_file(
      pwe::render_trace_svg(s, result,
                            config.scheme_name + ": " + dbm_text(dbm, "no signal") +
                                (dbm ? " dBm" : "")),
      (fs::path(out_dir) / "trace.svg").string());
  pwe::write_text_file(trace_summary_json(config.scheme_name, result).dump(2) + "\n",
                       (fs::path(out_dir) / "trace.json").string());

  std::cout << config.scheme_name << ": received " << dbm_text(dbm, "no signal")
            << (dbm ? " dBm" : "") << " (" << fmt("%.1f", ms) << " ms)\n";
  std::cout << "wrote segments.csv, trace.svg, trace.json to " << out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// compare

struct SchemeOutcome {
  std::string name;
  bool ok = true;
  std::string error;
  pwe::EnvironmentConfig config;
  pwe::TraceResult result;
  std::optional<double> received_dbm;
  std::vector<int> active_per_layer;
  int cycles = -1;      // nnconfig only
  double rmse = -1.0;   // nnconfig only
  bool converged = true;
  double ms = 0.0;
};

SchemeOutcome run_regular(const pwe::Scenario& s, const std::vector<pwe::Ray>& rays) {
  SchemeOutcome o;
  o.name = "regular";
  const auto t0 = Clock::now();
  o.config = pwe::regular_config(s);
  o.result = pwe::trace(s, o.config, rays);
  o.ms = ms_since(t0);
  o.received_dbm = pwe::received_power_dbm(o.result);
  o.active_per_layer = active_tiles_per_layer(s, o.config);
  return o;
}

SchemeOutcome run_kpconfig(const pwe::Scenario& s, const pwe::LayeredNet& net,
                           const std::vector<pwe::Ray>& rays) {
  SchemeOutcome o;
  o.name = "kpconfig";
  const auto t0 = Clock::now();
  try {
    o.config = pwe::kp_config(s, net);
    o.result = pwe::trace(s, o.config, rays);
    o.received_dbm = pwe::received_power_dbm(o.result);
    o.active_per_layer = active_tiles_per_layer(s, o.config);
  } catch (const std::runtime_error& e) {
    o.ok = false;
    o.error = e.what();
    o.active_per_layer.assign(s.layer_order.size(), 0);
  }
  o.ms = ms_since(t0);
  return o;
}

SchemeOutcome run_nnconfig(const pwe::Scenario& s, const pwe::LayeredNet& base_net,
                           const pwe::TrainParams& params,
                           const std::vector<pwe::Ray>& rays) {
  SchemeOutcome o;
  o.name = "nnconfig";
  const auto t0 = Clock::now();
  pwe::LayeredNet net = base_net;
  pwe::NetState state;
  const pwe::TrainingResult result = pwe::train(net, params, state);
  pwe::feed_forward(net, state);
  o.config = pwe::interpret_trained_net(net, result, state, params.activity_threshold);
  o.result = pwe::trace(s, o.config, rays);
  o.ms = ms_since(t0);
  o.received_dbm = pwe::received_power_dbm(o.result);
  o.active_per_layer = active_tiles_per_layer(s, o.config);
  o.cycles = result.cycles_run;
  o.rmse = result.rmse_curve.empty() ? -1.0 : result.rmse_curve.back();
  o.converged = result.converged;
  return o;
}

std::string outcome_status(const SchemeOutcome& o) {
  if (!o.ok) return "routing_failure";
  if (o.name == "nnconfig") return o.converged ? "converged" : "not_converged";
  return "ok";
}

void write_comparison_files(const pwe::Scenario& s,
                            const std::vector<SchemeOutcome>& outcomes,
                            const std::string& out_dir) {
  std::string csv = "scheme,received_dbm,active_tiles_per_layer,cycles,rmse_final,status\n";
  for (const SchemeOutcome& o : outcomes) {
    csv += o.name;
    csv += ',';
    csv += o.received_dbm ? fmt("%.17g", *o.received_dbm) : "no_signal";
    csv += ',';
    csv += join_counts(o.active_per_layer);
    csv += ',';
    if (o.cycles >= 0) csv += std::to_string(o.cycles);
    csv += ',';
    if (o.rmse >= 0.0) csv += fmt("%.17g", o.rmse);
    csv += ',';
    csv += outcome_status(o);
    csv += '\n';
  }
  pwe::write_text_file(csv, (fs::path(out_dir) / "comparison.csv").string());

  std::string txt;
  char row[160];
  std::snprintf(row, sizeof(row), "%-10s %14s %14s %8s %12s %s\n", "scheme",
                "received_dbm", "active_tiles", "cycles", "rmse_final", "status");
  txt += row;
  for (const SchemeOutcome& o : outcomes) {
    const std::string dbm = dbm_text(o.received_dbm, "no signal");
    const std::string tiles = join_counts(o.active_per_layer);
    const std::string cycles = o.cycles >= 0 ? std::to_string(o.cycles) : "-";
    const std::string rmse = o.rmse >= 0.0 ? fmt("%.3g", o.rmse) : "-";
    std::snprintf(row, sizeof(row), "%-10s %14s %14s %8s %12s %s\n", o.name.c_str(),
                  dbm.c_str(), tiles.c_str(), cycles.c_str(), rmse.c_str(),
                  outcome_status(o).c_str());
    txt += row;
  }
  for (const SchemeOutcome& o : outcomes)
    if (!o.ok) txt += o.name + " error: " + o.error + "\n";
  pwe::write_text_file(txt, (fs::path(out_dir) / "comparison.txt").string());

  for (const SchemeOutcome& o : outcomes) {
    const std::string label =
        o.ok ? o.name + ": " + dbm_text(o.received_dbm, "no signal") +
                   (o.received_dbm ? " dBm" : "")
             : o.name + ": routing failure";
    pwe::write_text_file(pwe::render_trace_svg(s, o.result, label),
                         (fs::path(out_dir) / (o.name + ".svg")).string());
  }
}

void write_seed_sweep(const pwe::Scenario& s, const pwe::LayeredNet& base_net,
                      const std::vector<pwe::Ray>& rays, int seeds, bool parallel,
                      const std::string& out_dir) {
  std::vector<SchemeOutcome> rows(seeds);
  const auto run_seed = [&](int i) {
    pwe::TrainParams params = s.train;
    params.seed = static_cast<std::uint64_t>(i) + 1;
    return run_nnconfig(s, base_net, params, rays);
  };
  if (parallel) {
    std::vector<std::future<SchemeOutcome>> futs;
    futs.reserve(seeds);
    for (int i = 0; i < seeds; ++i)
      futs.push_back(std::async(std::launch::async, run_seed, i));
    for (int i = 0; i < seeds; ++i) rows[i] = futs[i].get();
  } else {
    for (int i = 0; i < seeds; ++i) rows[i] = run_seed(i);
  }

  std::string csv = "seed,converged,cycles,rmse_final,received_dbm,active_tiles_per_layer\n";
  for (int i = 0; i < seeds; ++i) {
    const SchemeOutcome& o = rows[i];
    csv += std::to_string(i + 1);
    csv += ',';
    csv += o.converged ? "1" : "0";
    csv += ',';
    csv += std::to_string(o.cycles);
    csv += ',';
    csv += o.rmse >= 0.0 ? fmt("%.17g", o.rmse) : "";
    csv += ',';
    csv += o.received_dbm ? fmt("%.17g", *o.received_dbm) : "no_signal";
    csv += ',';
    csv += join_counts(o.active_per_layer);
    csv += '\n';
  }
  pwe::write_text_file(csv, (fs::path(out_dir) / "seed_sweep.csv").string());
}

int cmd_compare(const std::string& path, const std::string& out_dir, int seeds,
                bool parallel) {
  pwe::Scenario s = pwe::load_scenario(path);
  pwe::require_valid(s);
  const pwe::LayeredNet net = pwe::build_layered_net(s);
  const std::vector<pwe::Ray> rays = scenario_rays(s);

  fs::create_directories(out_dir);
  const auto t0 = Clock::now();

  std::vector<SchemeOutcome> outcomes;
  if (parallel) {
    auto f_reg = std::async(std::launch::async, run_regular, std::cref(s),
                            std::cref(rays));
    auto f_kp = std::async(std::launch::async, run_kpconfig, std::cref(s),
                           std::cref(net), std::cref(rays));
    auto f_nn = std::async(std::launch::async, run_nnconfig, std::cref(s),
                           std::cref(net), std::cref(s.train), std::cref(rays));
    outcomes.push_back(f_reg.get());
    outcomes.push_back(f_kp.get());
    outcomes.push_back(f_nn.get());
  } else {
    outcomes.push_back(run_regular(s, rays));
    outcomes.push_back(run_kpconfig(s, net, rays));
    outcomes.push_back(run_nnconfig(s, net, s.train, rays));
  }

  write_comparison_files(s, outcomes, out_dir);
  if (seeds > 0) write_seed_sweep(s, net, rays, seeds, parallel, out_dir);

  for (const SchemeOutcome& o : outcomes) {
    std::cout << o.name << ": "
              << (o.ok ? dbm_text(o.received_dbm, "no signal") +
                             (o.received_dbm ? " dBm" : "")
                       : "routing failure")
              << " [" << join_counts(o.active_per_layer) << " active] ("
              << fmt("%.1f", o.ms) << " ms)\n";
    log_debug(o.name + " status: " + outcome_status(o));
  }
  std::cout << "wrote comparison.csv, comparison.txt, per-scheme SVGs to " << out_dir
            << " (" << fmt("%.1f", ms_since(t0)) << " ms total)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"programmable wireless environment configurator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int seeds = 0;
  bool parallel = false;

  CLI::App* v = app.add_subcommand("validate", "check a scenario and its network");
  v->add_option("scenario", scenario_path, "scenario JSON file")->required();

  CLI::App* t = app.add_subcommand("train", "train the steering angles");
  t->add_option("scenario", scenario_path, "scenario JSON file")->required();
  t->add_option("--out", out_dir, "output directory")->required();
  t->add_option("--seed", seed, "override the scenario seed");

  CLI::App* tr = app.add_subcommand("trace", "trace rays through a tile config");
  tr->add_option("scenario", scenario_path, "scenario JSON file")->required();
  tr->add_option("--config", config_path, "tile config JSON file")->required();
  tr->add_option("--out", out_dir, "output directory")->required();

  CLI::App* c = app.add_subcommand("compare", "run and compare all three schemes");
  c->add_option("scenario", scenario_path, "scenario JSON file")->required();
  c->add_option("--out", out_dir, "output directory")->required();
  c->add_option("--seeds", seeds, "additionally sweep training seeds 1..N");
  c->add_flag("--parallel", parallel, "run schemes concurrently");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (v->parsed()) return cmd_validate(scenario_path);
    if (t->parsed()) return cmd_train(scenario_path, out_dir, seed);
    if (tr->parsed()) return cmd_trace(scenario_path, config_path, out_dir);
    if (c->parsed()) return cmd_compare(scenario_path, out_dir, seeds, parallel);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
