#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pwe/layered_net.hpp"
#include "pwe/learner.hpp"
#include "pwe/scenario.hpp"

namespace pwe {

enum class TileFunction { Steer, CollimateSteer, Absorb, Specular };

const char* tile_function_name(TileFunction fn);
TileFunction tile_function_from_name(const std::string& name);

// One routed lobe: rays arriving along in_dir are re-emitted along each
// out direction carrying the given fraction of the impinging power.
struct RouteOut {
  Vec2 dir;
  double fraction = 0.0;
};

struct Route {
  Vec2 in_dir;
  std::vector<RouteOut> out;
};

struct TileConfig {
  TileFunction fn = TileFunction::Specular;
  bool active = true;
  std::vector<Route> routes;
};

// Keyed by (wall_id, index_in_wall) so a config stands alone without the net.
using TileKey = std::pair<int, int>;

struct EnvironmentConfig {
  std::string scheme_name;
  std::map<TileKey, TileConfig> tiles;
};

// Reads the trained net back out as per-tile EM functions. A node is active
// when its impinging power reaches threshold * total input power; active
// nodes collimate-steer each powered arrival direction with fractions equal
// to the link weights, inactive nodes get inactive_fn with active=false.
// Requires a forwarded state whose omegas match result.final_omegas.
EnvironmentConfig interpret_trained_net(const LayeredNet& net,
                                        const TrainingResult& result,
                                        const NetState& state,
                                        double activity_threshold,
                                        TileFunction inactive_fn = TileFunction::Absorb);

// Every coated tile acts as a plain mirror.
EnvironmentConfig regular_config(const Scenario& scenario);

// Greedy router: each source ray claims its first-hit first-layer tile, then
// hops layer to layer picking the unused tile nearest in angle to the
// specular reflection of the arrival direction, ending at the receiver.
// Throws std::runtime_error listing the rays it could not route.
EnvironmentConfig kp_config(const Scenario& scenario, const LayeredNet& net);

std::string config_to_json_text(const EnvironmentConfig& config);
void write_config_json(const EnvironmentConfig& config, const std::string& path);
EnvironmentConfig load_config(const std::string& path);

}  // namespace pwe
