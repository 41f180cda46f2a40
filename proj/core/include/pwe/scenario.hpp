#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pwe/geometry.hpp"

namespace pwe {

struct PhysicsParams {
  double frequency_hz = 2.4e9;
  double tx_power_dbm = -30.0;
  int max_bounces = 5;
  double bounce_loss_fraction = 0.01;  // power lost per bounce
  double rx_aperture_width_m = 1.0;    // reception disc diameter
  int ray_count = 5;
  bool rx_angular_gate = false;  // when on, deposits only inside the Rx lobe
};

enum class UpdateMode { Batch, SequentialReverse };

struct TrainParams {
  double eta = 0.95;           // learning rate, (0, 1]
  double rmse_target = 1e-3;
  int max_cycles = 5000;
  double init_omega_low_deg = -90.0;
  double init_omega_high_deg = 90.0;
  std::uint64_t seed = 1;
  std::vector<double> virtual_input_fractions;   // one per first-layer node
  std::vector<double> ideal_output_fractions;    // one per last-layer node
  UpdateMode update_mode = UpdateMode::Batch;
  double activity_threshold = 0.01;  // share of total input that marks a tile active
  // Tiles that keep receiving power but forward none have exactly zero
  // gradient (clamped weights), so plain updates can never move them.
  // After this many stagnant cycles their angle is redrawn from the init
  // distribution; 0 disables revival.
  int revive_after_cycles = 1;
  // A run can also wedge with the error floor well above target: single
  // open links make weights locally constant and clamped links hide dark
  // routes, so nodes sit at exactly zero gradient while the rest crawl.
  // When the RMSE fails to improve by plateau_rel (relative) within a
  // window of cycles, every node outside the last layer is redrawn and
  // the anchor resets to the current RMSE. Far from target the window is
  // plateau_window; within plateau_guard times the target it stretches
  // to plateau_inner_window so a slow final approach survives. A window
  // of 0 disables its kick.
  int plateau_window = 1;
  int plateau_inner_window = 100;
  double plateau_rel = 5e-3;
  double plateau_guard = 2.0;
};

struct Scenario {
  std::vector<WallSegment> walls;
  std::vector<int> layer_order;  // coated wall ids, Tx-facing first
  std::vector<User> users;
  PhysicsParams physics;
  TrainParams train;

  const User& tx() const;
  const User& rx() const;
};

// All scenario-level diagnostics; empty means the scenario is usable.
std::vector<std::string> validate_scenario(const Scenario& s);

// Throws std::invalid_argument listing every diagnostic.
void require_valid(const Scenario& s);

}  // namespace pwe
