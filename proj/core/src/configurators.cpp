#include "pwe/configurators.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pwe/raytracer.hpp"

namespace pwe {

namespace {

using nlohmann::ordered_json;

// One entry per coated tile, so lookups during tracing can never miss.
EnvironmentConfig blank_config(std::span<const WallSegment> walls, std::string name,
                               TileFunction fn, bool active) {
  EnvironmentConfig config;
  config.scheme_name = std::move(name);
  for (size_t wi = 0; wi < walls.size(); ++wi) {
    if (!walls[wi].coated) continue;
    for (int ti = 0; ti < walls[wi].tile_count; ++ti) {
      TileConfig tc;
      tc.fn = fn;
      tc.active = active;
      config.tiles[{static_cast<int>(wi), ti}] = tc;
    }
  }
  return config;
}

}  // namespace

const char* tile_function_name(TileFunction fn) {
  switch (fn) {
    case TileFunction::Steer: return "steer";
    case TileFunction::CollimateSteer: return "collimate_steer";
    case TileFunction::Absorb: return "absorb";
    case TileFunction::Specular: return "specular";
  }
  throw std::logic_error("unknown tile function");
}

TileFunction tile_function_from_name(const std::string& name) {
  if (name == "steer") return TileFunction::Steer;
  if (name == "collimate_steer") return TileFunction::CollimateSteer;
  if (name == "absorb") return TileFunction::Absorb;
  if (name == "specular") return TileFunction::Specular;
  throw std::runtime_error("unknown tile function: " + name);
}

EnvironmentConfig interpret_trained_net(const LayeredNet& net,
                                        const TrainingResult& result,
                                        const NetState& state,
                                        double activity_threshold,
                                        TileFunction inactive_fn) {
  if (state.link_power.size() != net.links.size() ||
      result.final_omegas.size() != net.nodes.size() || !state.forwarded)
    throw std::logic_error("contract violation: state does not match the net");
  for (size_t i = 0; i < net.nodes.size(); ++i)
    if (net.nodes[i].omega != result.final_omegas[i])
      throw std::logic_error(
          "contract violation: net steering angles differ from the training result");
  if (activity_threshold < 0.0)
    throw std::invalid_argument("activity_threshold must be >= 0");

  EnvironmentConfig config =
      blank_config(net.walls, "nnconfig", inactive_fn, false);
  const double total = total_input_power(net, state);

  for (int id = 0; id < static_cast<int>(net.nodes.size()); ++id) {
    const TileNode& node = net.nodes[id];
    if (node_total_in(net, state, id) < activity_threshold * total) continue;

    TileConfig& tc = config.tiles.at({node.tile.wall_id, node.tile.index_in_wall});
    tc.fn = TileFunction::CollimateSteer;
    tc.active = true;
    for (int li : node.incoming) {
      if (state.link_power[li] <= 0.0) continue;
      const std::vector<double> w = link_weights(net, id, node.omega, net.links[li].dir);
      Route route;
      route.in_dir = net.links[li].dir;
      for (size_t j = 0; j < node.outgoing.size(); ++j)
        if (w[j] > 0.0) route.out.push_back({net.links[node.outgoing[j]].dir, w[j]});
      tc.routes.push_back(std::move(route));
    }
  }
  return config;
}

EnvironmentConfig regular_config(const Scenario& scenario) {
  return blank_config(scenario.walls, "regular", TileFunction::Specular, true);
}

EnvironmentConfig kp_config(const Scenario& scenario, const LayeredNet& net) {
  if (net.kappa() == 0) throw std::invalid_argument("net has no layers");
  const User& tx = scenario.tx();
  const std::vector<Ray> rays =
      emit_rays(tx, scenario.physics.ray_count, dbm_to_watts(tx.tx_power_dbm));

  EnvironmentConfig config =
      blank_config(scenario.walls, "kpconfig", TileFunction::Absorb, false);
  std::vector<char> used(net.nodes.size(), 0);
  std::vector<int> stranded;

  // Claim each ray's first wall hit, which must be a fresh first-layer tile.
  const int first_wall = net.nodes[net.layers[0].front()].tile.wall_id;
  std::vector<int> entry_node(rays.size(), -1);
  for (size_t ri = 0; ri < rays.size(); ++ri) {
    int hit_wall = -1;
    double hit_s = 0.0;
    double best_t = std::numeric_limits<double>::infinity();
    for (size_t wi = 0; wi < scenario.walls.size(); ++wi) {
      const auto hit = ray_segment_intersect(rays[ri].origin, rays[ri].dir,
                                             scenario.walls[wi].a, scenario.walls[wi].b);
      if (hit && hit->t < best_t) {
        best_t = hit->t;
        hit_wall = static_cast<int>(wi);
        hit_s = hit->s;
      }
    }
    int claimed = -1;
    if (hit_wall == first_wall) {
      const int tiles = scenario.walls[hit_wall].tile_count;
      const int idx = std::min(static_cast<int>(hit_s * tiles), tiles - 1);
      for (int id : net.layers[0])
        if (net.nodes[id].tile.index_in_wall == idx) claimed = id;
    }
    if (claimed < 0 || used[claimed]) {
      stranded.push_back(static_cast<int>(ri));
      continue;
    }
    used[claimed] = 1;
    entry_node[ri] = claimed;
  }

  // Walk each claimed ray forward, one fresh tile per layer, ending at Rx.
  for (size_t ri = 0; ri < rays.size(); ++ri) {
    int at = entry_node[ri];
    if (at < 0) continue;
    Vec2 arrive = rays[ri].dir;
    bool routed = true;
    while (true) {
      const TileNode& node = net.nodes[at];
      const Vec2 specular = reflect(arrive, node.tile.base_normal);
      int best_link = -1;
      double best_dot = -std::numeric_limits<double>::infinity();
      for (int li : node.outgoing) {
        const Link& link = net.links[li];
        if (link.to != kRxNode && used[link.to]) continue;
        const double d = link.dir.dot(specular);
        if (d > best_dot) {
          best_dot = d;
          best_link = li;
        }
      }
      if (best_link < 0) {
        routed = false;
        break;
      }
      TileConfig& tc = config.tiles.at({node.tile.wall_id, node.tile.index_in_wall});
      tc.fn = TileFunction::Steer;
      tc.active = true;
      tc.routes.push_back({arrive, {{net.links[best_link].dir, 1.0}}});
      if (net.links[best_link].to == kRxNode) break;
      used[net.links[best_link].to] = 1;
      arrive = net.links[best_link].dir;
      at = net.links[best_link].to;
    }
    if (!routed) stranded.push_back(static_cast<int>(ri));
  }

  if (!stranded.empty()) {
    std::sort(stranded.begin(), stranded.end());
    std::ostringstream msg;
    msg << "kp_config routing failure: stranded rays";
    for (int ri : stranded) msg << ' ' << ri;
    throw std::runtime_error(msg.str());
  }
  return config;
}

std::string config_to_json_text(const EnvironmentConfig& config) {
  ordered_json doc;
  doc["scheme"] = config.scheme_name;
  ordered_json tiles = ordered_json::array();
  for (const auto& [key, tc] : config.tiles) {
    ordered_json t;
    t["wall"] = key.first;
    t["tile"] = key.second;
    t["function"] = tile_function_name(tc.fn);
    t["active"] = tc.active;
    ordered_json routes = ordered_json::array();
    for (const Route& r : tc.routes) {
      ordered_json jr;
      jr["in"] = {r.in_dir.x, r.in_dir.y};
      ordered_json outs = ordered_json::array();
      for (const RouteOut& o : r.out)
        outs.push_back({{"dir", {o.dir.x, o.dir.y}}, {"fraction", o.fraction}});
      jr["out"] = std::move(outs);
      routes.push_back(std::move(jr));
    }
    t["routes"] = std::move(routes);
    tiles.push_back(std::move(t));
  }
  doc["tiles"] = std::move(tiles);
  return doc.dump(2) + "\n";
}

void write_config_json(const EnvironmentConfig& config, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << config_to_json_text(config);
}

EnvironmentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("config not found: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": not valid JSON (" + e.what() + ")");
  }

  EnvironmentConfig config;
  try {
    config.scheme_name = doc.at("scheme").get<std::string>();
    for (const auto& t : doc.at("tiles")) {
      TileConfig tc;
      tc.fn = tile_function_from_name(t.at("function").get<std::string>());
      tc.active = t.at("active").get<bool>();
      for (const auto& jr : t.at("routes")) {
        Route route;
        route.in_dir = {jr.at("in")[0].get<double>(), jr.at("in")[1].get<double>()};
        for (const auto& jo : jr.at("out"))
          route.out.push_back({{jo.at("dir")[0].get<double>(),
                                jo.at("dir")[1].get<double>()},
                               jo.at("fraction").get<double>()});
        tc.routes.push_back(std::move(route));
      }
      config.tiles[{t.at("wall").get<int>(), t.at("tile").get<int>()}] = std::move(tc);
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": malformed config (" + e.what() + ")");
  }
  for (const auto& [key, tc] : config.tiles)
    for (const Route& r : tc.routes) {
      if (std::abs(r.in_dir.norm() - 1.0) > 1e-9)
        throw std::runtime_error(path + ": route direction is not unit length");
      for (const RouteOut& o : r.out)
        if (std::abs(o.dir.norm() - 1.0) > 1e-9)
          throw std::runtime_error(path + ": route direction is not unit length");
    }
  return config;
}

}  // namespace pwe
