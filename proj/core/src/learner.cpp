#include "pwe/learner.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

namespace pwe {

namespace {

constexpr double kWeightEps = 1e-12;   // below this, a split sum counts as zero
constexpr double kOmegaMargin = 1e-6;  // keep omega strictly inside (-pi/2, pi/2)
constexpr double kPowerEps = 1e-12;

double clamp_omega(double omega) {
  return std::clamp(omega, -kPi / 2.0 + kOmegaMargin, kPi / 2.0 - kOmegaMargin);
}

void require_forwarded(const NetState& state) {
  if (!state.forwarded)
    throw std::logic_error("contract violation: feed_forward has not run");
}

int output_index_of(const LayeredNet& net, int node_id) {
  for (size_t i = 0; i < net.output_links.size(); ++i)
    if (net.links[net.output_links[i]].from == node_id) return static_cast<int>(i);
  return -1;
}

void apply_updates_to(LayeredNet& net, const NetState& state, double eta,
                      int only_layer) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw std::invalid_argument("eta must lie in (0, 1]");
  require_forwarded(state);
  if (!state.gradients_ready)
    throw std::logic_error("contract violation: gradients have not been computed");

  std::vector<double> next(net.nodes.size());
  for (size_t v = 0; v < net.nodes.size(); ++v) {
    next[v] = net.nodes[v].omega;
    if (only_layer >= 0 && net.nodes[v].layer != only_layer) continue;
    const double s = significance(net, state, static_cast<int>(v));
    next[v] = clamp_omega(net.nodes[v].omega -
                          eta * state.node_grad[v] * s);
  }
  for (size_t v = 0; v < net.nodes.size(); ++v) net.nodes[v].omega = next[v];
}

void check_train_params(const LayeredNet& net, const TrainParams& p) {
  if (!(p.eta > 0.0 && p.eta <= 1.0))
    throw std::invalid_argument("eta must lie in (0, 1]");
  if (!(p.rmse_target > 0.0))
    throw std::invalid_argument("rmse_target must be positive");
  if (p.max_cycles < 0)
    throw std::invalid_argument("max_cycles must be >= 0");
  double sum = 0.0;
  for (double f : p.virtual_input_fractions) sum += f;
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("virtual_input_fractions must sum to 1");
  sum = 0.0;
  for (double f : p.ideal_output_fractions) sum += f;
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("ideal_output_fractions must sum to 1");
  if (p.virtual_input_fractions.size() != net.input_links.size())
    throw std::invalid_argument(
        "virtual_input_fractions must have one entry per first-layer node");
  if (p.ideal_output_fractions.size() != net.output_links.size())
    throw std::invalid_argument(
        "ideal_output_fractions must have one entry per last-layer node");
}

}  // namespace

NetState make_net_state(const LayeredNet& net, const TrainParams& params) {
  if (params.ideal_output_fractions.size() != net.output_links.size())
    throw std::invalid_argument(
        "ideal_output_fractions must have one entry per last-layer node");
  NetState state;
  state.link_power.assign(net.links.size(), 0.0);
  state.link_gain.assign(net.links.size(), 0.0);
  state.node_grad.assign(net.nodes.size(), 0.0);
  state.ideal = params.ideal_output_fractions;
  state.delta.assign(net.output_links.size(), 0.0);
  return state;
}

void set_input_powers(const LayeredNet& net, NetState& state,
                      std::span<const double> fractions, double total_power) {
  if (fractions.size() != net.input_links.size())
    throw std::invalid_argument(
        "virtual_input_fractions must have one entry per first-layer node");
  for (size_t i = 0; i < fractions.size(); ++i) {
    if (fractions[i] < 0.0)
      throw std::invalid_argument("input fractions must be non-negative");
    state.link_power[net.input_links[i]] = fractions[i] * total_power;
  }
  state.inputs_set = true;
  state.forwarded = false;
  state.gradients_ready = false;
}

void link_weight_row(const LayeredNet& net, const TileNode& node, double omega,
                     Vec2 d, double* w, double* dw) {
  const Vec2 n = normal_from_angle(node.tile.base_normal, omega);
  const Vec2 r = d - 2.0 * d.dot(n) * n;
  const size_t m = node.outgoing.size();

  double sum_u = 0.0;
  for (size_t j = 0; j < m; ++j) {
    const double proj = r.dot(net.links[node.outgoing[j]].dir);
    w[j] = proj > 0.0 ? proj : 0.0;
    sum_u += w[j];
  }

  if (dw) {
    // dn/domega is the quarter turn of n; the reflection derivative follows.
    const Vec2 np = n.perp();
    const Vec2 rp = -2.0 * (d.dot(np)) * n - 2.0 * (d.dot(n)) * np;
    double sum_du = 0.0;
    for (size_t j = 0; j < m; ++j) {
      dw[j] = w[j] > 0.0 ? rp.dot(net.links[node.outgoing[j]].dir) : 0.0;
      sum_du += dw[j];
    }
    if (sum_u > kWeightEps) {
      for (size_t j = 0; j < m; ++j)
        dw[j] = (dw[j] * sum_u - w[j] * sum_du) / (sum_u * sum_u);
    } else {
      std::fill(dw, dw + m, 0.0);
    }
  }

  if (sum_u > kWeightEps) {
    for (size_t j = 0; j < m; ++j) w[j] /= sum_u;
  } else {
    std::fill(w, w + m, 0.0);
  }
}

std::vector<double> link_weights(const LayeredNet& net, int node_id, double omega,
                                 Vec2 d) {
  const TileNode& node = net.nodes.at(node_id);
  if (node.outgoing.empty())
    throw std::logic_error("contract violation: node has no outgoing link");
  std::vector<double> w(node.outgoing.size());
  link_weight_row(net, node, omega, d, w.data(), nullptr);
  return w;
}

void feed_forward_with(const LayeredNet& net, std::span<const double> omegas,
                       NetState& state) {
  if (!state.inputs_set)
    throw std::logic_error("contract violation: input powers not set");
  if (omegas.size() != net.nodes.size())
    throw std::invalid_argument("omega vector size does not match node count");

  std::vector<bool> is_input(net.links.size(), false);
  for (int id : net.input_links) is_input[id] = true;
  for (size_t i = 0; i < net.links.size(); ++i)
    if (!is_input[i]) state.link_power[i] = 0.0;

  std::vector<double> w;
  std::vector<double> acc;
  for (const auto& layer : net.layers) {
    for (int v : layer) {
      const TileNode& node = net.nodes[v];
      w.resize(node.outgoing.size());
      acc.assign(node.outgoing.size(), 0.0);
      for (int in_id : node.incoming) {
        const double p = state.link_power[in_id];
        if (p <= 0.0) continue;
        link_weight_row(net, node, omegas[v], net.links[in_id].dir, w.data(),
                        nullptr);
        for (size_t j = 0; j < acc.size(); ++j) acc[j] += w[j] * p;
      }
      for (size_t j = 0; j < acc.size(); ++j)
        state.link_power[node.outgoing[j]] = acc[j];
    }
  }

  state.deviation = 0.0;
  for (size_t i = 0; i < net.output_links.size(); ++i) {
    state.delta[i] = state.ideal[i] - state.link_power[net.output_links[i]];
    state.deviation += 0.5 * state.delta[i] * state.delta[i];
  }
  state.forwarded = true;
  state.gradients_ready = false;
}

void feed_forward(const LayeredNet& net, NetState& state) {
  const std::vector<double> omegas = net.omegas();
  feed_forward_with(net, omegas, state);
}

double significance(const LayeredNet& net, const NetState& state, int node_id) {
  require_forwarded(state);
  const TileNode& node = net.nodes.at(node_id);
  if (node.layer == net.kappa() - 1) {
    const int idx = output_index_of(net, node_id);
    if (idx < 0)
      throw std::logic_error("contract violation: last-layer node has no output link");
    return state.delta[idx];
  }
  return node_total_in(net, state, node_id);
}

void backprop_gradients(const LayeredNet& net, NetState& state) {
  require_forwarded(state);

  std::fill(state.link_gain.begin(), state.link_gain.end(), 0.0);
  for (size_t i = 0; i < net.output_links.size(); ++i)
    state.link_gain[net.output_links[i]] = state.delta[i];

  std::vector<double> w, dw;
  for (int k = net.kappa() - 1; k >= 0; --k) {
    for (int v : net.layers[k]) {
      const TileNode& node = net.nodes[v];
      const size_t m = node.outgoing.size();
      w.resize(m);
      dw.resize(m);
      double grad = 0.0;
      for (int in_id : node.incoming) {
        link_weight_row(net, node, node.omega, net.links[in_id].dir, w.data(),
                        dw.data());
        double gain = 0.0, slope = 0.0;
        for (size_t j = 0; j < m; ++j) {
          const double g = state.link_gain[node.outgoing[j]];
          gain += w[j] * g;
          slope += dw[j] * g;
        }
        state.link_gain[in_id] = gain;
        grad -= state.link_power[in_id] * slope;
      }
      state.node_grad[v] = grad;
    }
  }
  state.gradients_ready = true;
}

double fd_central(const std::function<double(double)>& f, double x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

double fd_gradient(const LayeredNet& net, std::vector<double> omegas,
                   const NetState& proto, int node_id, double h) {
  if (node_id < 0 || node_id >= static_cast<int>(net.nodes.size()))
    throw std::invalid_argument("bad node id");
  if (omegas.size() != net.nodes.size())
    throw std::invalid_argument("omega vector size does not match node count");
  const double base = omegas[node_id];
  if (!(base - h > -kPi / 2.0 && base + h < kPi / 2.0))
    throw std::domain_error("finite-difference step leaves the omega domain");

  NetState scratch = proto;
  return fd_central(
      [&](double x) {
        omegas[node_id] = x;
        feed_forward_with(net, omegas, scratch);
        return scratch.deviation;
      },
      base, h);
}

void apply_updates(LayeredNet& net, const NetState& state, double eta) {
  apply_updates_to(net, state, eta, -1);
}

double rmse_of(const NetState& state) {
  if (state.delta.empty()) return 0.0;
  double sum = 0.0;
  for (double d : state.delta) sum += d * d;
  return std::sqrt(sum / static_cast<double>(state.delta.size()));
}

double node_total_in(const LayeredNet& net, const NetState& state, int node_id) {
  double sum = 0.0;
  for (int id : net.nodes.at(node_id).incoming) sum += state.link_power[id];
  return sum;
}

double node_total_out(const LayeredNet& net, const NetState& state, int node_id) {
  double sum = 0.0;
  for (int id : net.nodes.at(node_id).outgoing) sum += state.link_power[id];
  return sum;
}

double total_input_power(const LayeredNet& net, const NetState& state) {
  double sum = 0.0;
  for (int id : net.input_links) sum += state.link_power[id];
  return sum;
}

std::vector<double> initial_omegas(const LayeredNet& net, const TrainParams& params) {
  // Mirrors the draw at the top of train(); keep the two in sync.
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> draw(deg_to_rad(params.init_omega_low_deg),
                                              deg_to_rad(params.init_omega_high_deg));
  std::vector<double> out(net.nodes.size());
  for (double& omega : out) omega = clamp_omega(draw(rng));
  return out;
}

TrainingResult train(LayeredNet& net, const TrainParams& params, NetState& state) {
  check_train_params(net, params);

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> draw(deg_to_rad(params.init_omega_low_deg),
                                              deg_to_rad(params.init_omega_high_deg));
  for (TileNode& node : net.nodes) node.omega = clamp_omega(draw(rng));

  state = make_net_state(net, params);
  set_input_powers(net, state, params.virtual_input_fractions);

  TrainingResult result;
  std::vector<int> stagnant(net.nodes.size(), 0);
  const int kappa = net.kappa();
  double plateau_anchor = std::numeric_limits<double>::infinity();
  int cycles_since_drop = 0;

  for (;;) {
    if (result.cycles_run == params.max_cycles) {
      result.converged = false;
      break;
    }
    feed_forward(net, state);
    const double rmse = rmse_of(state);
    result.rmse_curve.push_back(rmse);
    result.deviation_curve.push_back(state.deviation);
    ++result.cycles_run;
    if (rmse < params.rmse_target) {
      result.converged = true;
      break;
    }

    // Stagnation bookkeeping from the recorded pass, before any update.
    std::vector<int> redraw;
    if (params.revive_after_cycles > 0) {
      for (size_t v = 0; v < net.nodes.size(); ++v) {
        const double in = node_total_in(net, state, static_cast<int>(v));
        const double out = node_total_out(net, state, static_cast<int>(v));
        if (in > kPowerEps && out <= kPowerEps) {
          if (++stagnant[v] >= params.revive_after_cycles) {
            redraw.push_back(static_cast<int>(v));
            stagnant[v] = 0;
          }
        } else {
          stagnant[v] = 0;
        }
      }
    }

    backprop_gradients(net, state);

    // Two plateau clocks: runs far from target are culled after
    // plateau_window stale cycles, while runs inside the guard zone get
    // plateau_inner_window cycles so a slow but sound final approach is
    // not thrown away. The anchor resets to the kick-time RMSE so the
    // next basin is judged against where the restart landed, not the
    // best basin ever seen.
    bool kick = false;
    if (params.plateau_window > 0) {
      if (rmse < plateau_anchor * (1.0 - params.plateau_rel)) {
        plateau_anchor = rmse;
        cycles_since_drop = 0;
      } else {
        ++cycles_since_drop;
        const bool guarded = rmse < params.plateau_guard * params.rmse_target;
        const int limit =
            guarded ? params.plateau_inner_window : params.plateau_window;
        if (limit > 0 && cycles_since_drop >= limit) {
          kick = true;
          plateau_anchor = rmse;
          cycles_since_drop = 0;
        }
      }
    }
    if (kick) {
      for (size_t v = 0; v < net.nodes.size(); ++v)
        if (net.nodes[v].layer != kappa - 1)
          redraw.push_back(static_cast<int>(v));
    }

    if (params.update_mode == UpdateMode::Batch) {
      apply_updates_to(net, state, params.eta, -1);
    } else {
      for (int k = kappa - 1; k >= 0; --k) {
        if (k != kappa - 1) {
          feed_forward(net, state);
          backprop_gradients(net, state);
        }
        apply_updates_to(net, state, params.eta, k);
      }
    }

    // One fresh draw per redrawn node, in node-id order, after the
    // gradient step: the same seed always replays the same run.
    std::sort(redraw.begin(), redraw.end());
    redraw.erase(std::unique(redraw.begin(), redraw.end()), redraw.end());
    for (int v : redraw) net.nodes[v].omega = clamp_omega(draw(rng));
  }

  result.final_omegas = net.omegas();
  return result;
}

TrainingResult train(LayeredNet& net, const TrainParams& params) {
  NetState state;
  return train(net, params, state);
}

void write_training_csv(const TrainingResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "cycle,rmse,deviation\n";
  char buf[96];
  for (size_t i = 0; i < result.rmse_curve.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i + 1,
                  result.rmse_curve[i], result.deviation_curve[i]);
    out << buf;
  }
}

void write_omegas_json(const LayeredNet& net, const TrainingResult& result,
                       const std::string& path) {
  if (result.final_omegas.size() != net.nodes.size())
    throw std::invalid_argument("result does not match net");
  nlohmann::ordered_json omega;
  for (size_t v = 0; v < net.nodes.size(); ++v) {
    const TileNode& n = net.nodes[v];
    const std::string key = std::to_string(n.layer + 1) + "," +
                            std::to_string(n.index_in_layer + 1);
    omega[key] = result.final_omegas[v];
  }
  nlohmann::ordered_json doc;
  doc["units"] = "rad";
  doc["converged"] = result.converged;
  doc["cycles_run"] = result.cycles_run;
  doc["omega"] = std::move(omega);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace pwe
