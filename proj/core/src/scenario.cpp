#include "pwe/scenario.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace pwe {

namespace {

const User* find_user(const Scenario& s, UserRole role) {
  for (const User& u : s.users)
    if (u.role == role) return &u;
  return nullptr;
}

bool sums_to_one(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return std::abs(sum - 1.0) <= 1e-9;
}

}  // namespace

const User& Scenario::tx() const {
  const User* u = find_user(*this, UserRole::Transmitter);
  if (!u) throw std::logic_error("scenario has no transmitter");
  return *u;
}

const User& Scenario::rx() const {
  const User* u = find_user(*this, UserRole::Receiver);
  if (!u) throw std::logic_error("scenario has no receiver");
  return *u;
}

std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> out;
  auto fail = [&out](std::string msg) { out.push_back(std::move(msg)); };

  for (size_t i = 0; i < s.walls.size(); ++i) {
    const WallSegment& w = s.walls[i];
    const std::string tag = "wall " + std::to_string(i);
    if (w.length() == 0.0) {
      fail(tag + ": degenerate segment");
      continue;
    }
    if (std::abs(w.base_normal.norm() - 1.0) > 1e-9)
      fail(tag + ": base normal is not unit length");
    else if (std::abs(w.base_normal.dot(w.dir())) > 1e-9)
      fail(tag + ": base normal is not perpendicular to the segment");
    if (w.tile_count < 1) fail(tag + ": tile count must be >= 1");
  }

  std::set<int> seen;
  for (int id : s.layer_order) {
    if (id < 0 || id >= static_cast<int>(s.walls.size())) {
      fail("layer_order references unknown wall " + std::to_string(id));
      continue;
    }
    if (!s.walls[id].coated)
      fail("layer_order wall " + std::to_string(id) + " is not coated");
    if (!seen.insert(id).second)
      fail("layer_order repeats wall " + std::to_string(id));
  }
  if (s.layer_order.empty()) fail("layer_order must name at least one wall");
  for (size_t i = 0; i < s.walls.size(); ++i)
    if (s.walls[i].coated && !seen.count(static_cast<int>(i)))
      fail("coated wall " + std::to_string(i) + " missing from layer_order");

  int n_tx = 0, n_rx = 0;
  for (const User& u : s.users) {
    (u.role == UserRole::Transmitter ? n_tx : n_rx)++;
    if (!(u.lobe_width_deg > 0.0 && u.lobe_width_deg <= 180.0))
      fail("user lobe width must lie in (0, 180] degrees");
  }
  if (n_tx != 1) fail("scenario needs exactly one transmitter");
  if (n_rx != 1) fail("scenario needs exactly one receiver");

  const PhysicsParams& p = s.physics;
  if (p.max_bounces < static_cast<int>(s.layer_order.size()))
    fail("max_bounces must be >= the number of layers");
  if (!(p.bounce_loss_fraction >= 0.0 && p.bounce_loss_fraction < 1.0))
    fail("bounce_loss_fraction must lie in [0, 1)");
  if (p.ray_count < 1) fail("ray_count must be >= 1");
  if (!(p.rx_aperture_width_m > 0.0)) fail("rx_aperture_width_m must be positive");
  if (!(p.frequency_hz > 0.0)) fail("frequency_hz must be positive");

  const TrainParams& t = s.train;
  if (!(t.eta > 0.0 && t.eta <= 1.0)) fail("eta must lie in (0, 1]");
  if (!(t.rmse_target > 0.0)) fail("rmse_target must be positive");
  if (t.max_cycles < 0) fail("max_cycles must be >= 0");
  if (!(t.init_omega_low_deg >= -90.0 && t.init_omega_high_deg <= 90.0 &&
        t.init_omega_low_deg <= t.init_omega_high_deg))
    fail("init omega range must be an interval inside [-90, 90] degrees");
  if (!(t.activity_threshold >= 0.0 && t.activity_threshold <= 1.0))
    fail("activity_threshold must lie in [0, 1]");
  if (t.revive_after_cycles < 0) fail("revive_after_cycles must be >= 0");
  for (double f : t.virtual_input_fractions)
    if (f < 0.0) fail("virtual_input_fractions must be non-negative");
  for (double f : t.ideal_output_fractions)
    if (f < 0.0) fail("ideal_output_fractions must be non-negative");
  if (!t.virtual_input_fractions.empty() && !sums_to_one(t.virtual_input_fractions))
    fail("virtual_input_fractions must sum to 1");
  if (!t.ideal_output_fractions.empty() && !sums_to_one(t.ideal_output_fractions))
    fail("ideal_output_fractions must sum to 1");
  if (t.virtual_input_fractions.empty()) fail("virtual_input_fractions is empty");
  if (t.ideal_output_fractions.empty()) fail("ideal_output_fractions is empty");

  return out;
}

void require_valid(const Scenario& s) {
  const auto problems = validate_scenario(s);
  if (problems.empty()) return;
  std::string msg = "invalid scenario:";
  for (const std::string& p : problems) msg += "\n  " + p;
  throw std::invalid_argument(msg);
}

}  // namespace pwe
