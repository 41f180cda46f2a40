#pragma once

#include <string>
#include <vector>

#include "pwe/scenario.hpp"

namespace pwe {

// Sentinel endpoints for links that start at the transmitter or end at the
// receiver instead of at a tile node.
constexpr int kTxNode = -1;
constexpr int kRxNode = -2;

// Directed line-of-sight power transfer. dir is the unit propagation
// direction from source to target; at the target it is the impinging
// direction, at the source the outgoing one.
struct Link {
  int from = kTxNode;  // node id or kTxNode
  int to = kRxNode;    // node id or kRxNode
  Vec2 dir;
  double dist = 0.0;
};

struct TileNode {
  Tile tile;
  int layer = -1;
  int index_in_layer = -1;
  double omega = 0.0;  // steering angle, owned by the learner after build
  std::vector<int> incoming;  // link ids, fixed order
  std::vector<int> outgoing;
};

// Walls viewed as network layers: first layer faces the Tx, last one the Rx,
// links exist only between consecutive layers where sightlines are clear.
// Immutable after construction except for per-node omega.
struct LayeredNet {
  std::vector<TileNode> nodes;
  std::vector<std::vector<int>> layers;  // node ids per layer, wall order
  std::vector<Link> links;
  std::vector<int> input_links;   // Tx -> first layer, first-layer node order
  std::vector<int> output_links;  // last layer -> Rx, last-layer node order
  std::vector<WallSegment> walls;  // snapshot used for sightline checks
  Vec2 tx_pos;
  Vec2 rx_pos;

  int kappa() const { return static_cast<int>(layers.size()); }
  std::vector<double> omegas() const;
  void set_omegas(const std::vector<double>& values);
};

// Builds the net from a valid scenario. Tiles that end up with no incoming
// or no outgoing sightline are dropped; a layer losing every node raises a
// construction error ("disconnected layer k", 1-based).
LayeredNet build_layered_net(const Scenario& s);

// Structural diagnostics; empty iff every net invariant holds.
std::vector<std::string> validate_net(const LayeredNet& net);

}  // namespace pwe
