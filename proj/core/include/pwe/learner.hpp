#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pwe/layered_net.hpp"

namespace pwe {

// Everything one feed-forward / back-propagation cycle touches. Link arrays
// are indexed by link id; delta and ideal follow output-link order.
struct NetState {
  std::vector<double> link_power;
  std::vector<double> link_gain;  // d(deviation)/d(link power), sign folded
  std::vector<double> node_grad;  // d(deviation)/d(omega) per node
  std::vector<double> ideal;
  std::vector<double> delta;      // ideal - delivered, per output link
  double deviation = 0.0;         // 1/2 * sum(delta^2)
  bool inputs_set = false;
  bool forwarded = false;
  bool gradients_ready = false;
};

NetState make_net_state(const LayeredNet& net, const TrainParams& params);

// Loads input-link powers as fractions of total_power. One fraction per
// first-layer node, in input-link order.
void set_input_powers(const LayeredNet& net, NetState& state,
                      std::span<const double> fractions, double total_power = 1.0);

// Per-outgoing-link split of power impinging on a node from direction d:
// clamped projections of the steered reflection onto each outgoing link,
// normalized to sum to 1, or all zero when nothing faces forward.
std::vector<double> link_weights(const LayeredNet& net, int node_id, double omega,
                                 Vec2 d);

// Kernel behind link_weights: fills w (size = outgoing count) and, when dw is
// non-null, the analytic d(w)/d(omega).
void link_weight_row(const LayeredNet& net, const TileNode& node, double omega,
                     Vec2 d, double* w, double* dw);

void feed_forward(const LayeredNet& net, NetState& state);
void feed_forward_with(const LayeredNet& net, std::span<const double> omegas,
                       NetState& state);

// Update scale of a node: signed output deviation on the last layer, total
// impinging power elsewhere.
double significance(const LayeredNet& net, const NetState& state, int node_id);

// Reverse pass. Per-link path gains accumulate the delta-weighted product of
// split weights over every downstream route to the receiver; a node's
// gradient is minus the dot of those gains with its per-link power
// derivatives, which makes the update rule descend the deviation.
void backprop_gradients(const LayeredNet& net, NetState& state);

// Central difference (f(x+h) - f(x-h)) / (2h).
double fd_central(const std::function<double(double)>& f, double x, double h);

// Finite-difference deviation gradient for one node, full re-evaluation per
// side. proto must have inputs and ideals set.
double fd_gradient(const LayeredNet& net, std::vector<double> omegas,
                   const NetState& proto, int node_id, double h);

// One simultaneous update step: omega <- omega - eta * grad * significance,
// clamped strictly inside (-pi/2, pi/2).
void apply_updates(LayeredNet& net, const NetState& state, double eta);

struct TrainingResult {
  std::vector<double> final_omegas;     // node order
  std::vector<double> rmse_curve;       // one entry per cycle
  std::vector<double> deviation_curve;
  int cycles_run = 0;
  bool converged = false;
};

// Runs the training loop on the net (omegas are initialized from the seed and
// mutated in place); state receives the last feed-forward.
TrainingResult train(LayeredNet& net, const TrainParams& params, NetState& state);
TrainingResult train(LayeredNet& net, const TrainParams& params);

// The omegas train() starts from under these params (same seed, same order).
std::vector<double> initial_omegas(const LayeredNet& net, const TrainParams& params);

double rmse_of(const NetState& state);

double node_total_in(const LayeredNet& net, const NetState& state, int node_id);
double node_total_out(const LayeredNet& net, const NetState& state, int node_id);
double total_input_power(const LayeredNet& net, const NetState& state);

void write_training_csv(const TrainingResult& result, const std::string& path);
void write_omegas_json(const LayeredNet& net, const TrainingResult& result,
                       const std::string& path);

}  // namespace pwe
