#include "pwe/scenario_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pwe {

namespace {

using nlohmann::json;

[[noreturn]] void bail(const std::string& origin, const std::string& what) {
  throw std::runtime_error(origin + ": " + what);
}

const json& field(const json& obj, const char* name, const std::string& origin) {
  auto it = obj.find(name);
  if (it == obj.end()) bail(origin, std::string("missing field '") + name + "'");
  return *it;
}

Vec2 point(const json& v, const char* name, const std::string& origin) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    bail(origin, std::string("'") + name + "' must be a [x, y] pair");
  return {v[0].get<double>(), v[1].get<double>()};
}

WallSegment parse_wall(const json& w, size_t idx, const std::string& origin) {
  const std::string where = origin + " wall " + std::to_string(idx);
  WallSegment wall;
  wall.a = point(field(w, "a", where), "a", where);
  wall.b = point(field(w, "b", where), "b", where);
  if ((wall.b - wall.a).norm() == 0.0) bail(where, "segment is degenerate");

  const std::string side = field(w, "normal_side", where).get<std::string>();
  const Vec2 dir = wall.dir();
  if (side == "left")
    wall.base_normal = dir.perp();
  else if (side == "right")
    wall.base_normal = -dir.perp();
  else
    bail(where, "normal_side must be \"left\" or \"right\"");

  wall.coated = field(w, "coated", where).get<bool>();
  wall.tile_count = w.value("tiles", 1);
  return wall;
}

User parse_user(const json& u, size_t idx, const std::string& origin) {
  const std::string where = origin + " user " + std::to_string(idx);
  User user;
  user.position = point(field(u, "position", where), "position", where);
  const std::string role = field(u, "role", where).get<std::string>();
  if (role == "transmitter")
    user.role = UserRole::Transmitter;
  else if (role == "receiver")
    user.role = UserRole::Receiver;
  else
    bail(where, "role must be \"transmitter\" or \"receiver\"");
  user.lobe_width_deg = field(u, "lobe_deg", where).get<double>();
  user.boresight_deg = field(u, "boresight_deg", where).get<double>();
  if (user.role == UserRole::Transmitter)
    user.tx_power_dbm = field(u, "tx_power_dbm", where).get<double>();
  return user;
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    bail(origin, std::string("not valid JSON (") + e.what() + ")");
  }
  if (!doc.is_object()) bail(origin, "top level must be an object");

  Scenario s;
  try {
    const json& walls = field(doc, "walls", origin);
    for (size_t i = 0; i < walls.size(); ++i)
      s.walls.push_back(parse_wall(walls[i], i, origin));

    for (const json& id : field(doc, "layer_order", origin))
      s.layer_order.push_back(id.get<int>());

    const json& users = field(doc, "users", origin);
    for (size_t i = 0; i < users.size(); ++i)
      s.users.push_back(parse_user(users[i], i, origin));

    const json& ph = field(doc, "physics", origin);
    s.physics.frequency_hz = field(ph, "frequency_hz", origin).get<double>();
    s.physics.max_bounces = field(ph, "max_bounces", origin).get<int>();
    s.physics.bounce_loss_fraction = field(ph, "bounce_loss", origin).get<double>();
    s.physics.ray_count = field(ph, "ray_count", origin).get<int>();
    s.physics.rx_aperture_width_m = field(ph, "rx_aperture_m", origin).get<double>();
    s.physics.rx_angular_gate = ph.value("rx_angular_gate", false);

    const json& tr = field(doc, "train", origin);
    s.train.eta = field(tr, "eta", origin).get<double>();
    s.train.rmse_target = field(tr, "rmse_target", origin).get<double>();
    s.train.max_cycles = field(tr, "max_cycles", origin).get<int>();
    s.train.seed = field(tr, "seed", origin).get<std::uint64_t>();
    const json& range = field(tr, "init_range_deg", origin);
    if (!range.is_array() || range.size() != 2)
      bail(origin, "'init_range_deg' must be a [low, high] pair");
    s.train.init_omega_low_deg = range[0].get<double>();
    s.train.init_omega_high_deg = range[1].get<double>();
    s.train.virtual_input_fractions =
        field(tr, "input_fractions", origin).get<std::vector<double>>();
    s.train.ideal_output_fractions =
        field(tr, "ideal_fractions", origin).get<std::vector<double>>();
    const std::string mode = tr.value("update_mode", "batch");
    if (mode == "batch")
      s.train.update_mode = UpdateMode::Batch;
    else if (mode == "sequential-reverse")
      s.train.update_mode = UpdateMode::SequentialReverse;
    else
      bail(origin, "update_mode must be \"batch\" or \"sequential-reverse\"");
    const TrainParams defaults;
    s.train.activity_threshold =
        tr.value("activity_threshold", defaults.activity_threshold);
    s.train.revive_after_cycles =
        tr.value("revive_after_cycles", defaults.revive_after_cycles);
    s.train.plateau_window = tr.value("plateau_window", defaults.plateau_window);
    s.train.plateau_inner_window =
        tr.value("plateau_inner_window", defaults.plateau_inner_window);
    s.train.plateau_rel = tr.value("plateau_rel", defaults.plateau_rel);
    s.train.plateau_guard = tr.value("plateau_guard", defaults.plateau_guard);
  } catch (const json::exception& e) {
    bail(origin, std::string("malformed field (") + e.what() + ")");
  }

  for (const User& u : s.users)
    if (u.role == UserRole::Transmitter) s.physics.tx_power_dbm = u.tx_power_dbm;

  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("scenario not found: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return scenario_from_json_text(buf.str(), path);
}

}  // namespace pwe
