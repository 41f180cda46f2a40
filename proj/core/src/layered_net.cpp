#include "pwe/layered_net.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pwe {

std::vector<double> LayeredNet::omegas() const {
  std::vector<double> out(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) out[i] = nodes[i].omega;
  return out;
}

void LayeredNet::set_omegas(const std::vector<double>& values) {
  if (values.size() != nodes.size())
    throw std::invalid_argument("omega vector size does not match node count");
  for (size_t i = 0; i < nodes.size(); ++i) nodes[i].omega = values[i];
}

namespace {

struct Candidate {
  Tile tile;
  int layer;
  bool alive = true;
};

// Links are rebuilt from scratch on every prune pass; candidate counts are
// tiny (tens of tiles), so the quadratic cost is irrelevant.
struct CandidateLink {
  int from;  // candidate index or kTxNode
  int to;    // candidate index or kRxNode
};

}  // namespace

LayeredNet build_layered_net(const Scenario& s) {
  require_valid(s);

  const Vec2 tx = s.tx().position;
  const Vec2 rx = s.rx().position;
  const int kappa = static_cast<int>(s.layer_order.size());

  std::vector<Candidate> cand;
  std::vector<std::vector<int>> layer_members(kappa);
  for (int k = 0; k < kappa; ++k) {
    const int wall_id = s.layer_order[k];
    for (Tile& t : wall_tiles(s.walls[wall_id], wall_id)) {
      layer_members[k].push_back(static_cast<int>(cand.size()));
      cand.push_back({t, k});
    }
  }

  auto visible = [&s](Vec2 p, Vec2 q) { return los_visible(p, q, s.walls); };

  // Drop tiles with no usable sightline on either side until stable; power
  // could never flow through them and every surviving node must keep at
  // least one incoming and one outgoing link.
  for (;;) {
    bool changed = false;
    for (int k = 0; k < kappa; ++k) {
      for (int ci : layer_members[k]) {
        Candidate& c = cand[ci];
        if (!c.alive) continue;
        bool has_in = false, has_out = false;
        if (k == 0) {
          has_in = visible(tx, c.tile.center);
        } else {
          for (int pi : layer_members[k - 1])
            if (cand[pi].alive && visible(cand[pi].tile.center, c.tile.center)) {
              has_in = true;
              break;
            }
        }
        if (k == kappa - 1) {
          has_out = visible(c.tile.center, rx);
        } else {
          for (int ni : layer_members[k + 1])
            if (cand[ni].alive && visible(c.tile.center, cand[ni].tile.center)) {
              has_out = true;
              break;
            }
        }
        if (!has_in || !has_out) {
          c.alive = false;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }

  for (int k = 0; k < kappa; ++k) {
    const bool any = std::any_of(layer_members[k].begin(), layer_members[k].end(),
                                 [&cand](int ci) { return cand[ci].alive; });
    if (!any)
      throw std::runtime_error("disconnected layer " + std::to_string(k + 1));
  }

  LayeredNet net;
  net.walls = s.walls;
  net.tx_pos = tx;
  net.rx_pos = rx;
  net.layers.resize(kappa);

  std::vector<int> node_of(cand.size(), -1);
  for (int k = 0; k < kappa; ++k)
    for (int ci : layer_members[k]) {
      if (!cand[ci].alive) continue;
      TileNode node;
      node.tile = cand[ci].tile;
      node.layer = k;
      node.index_in_layer = static_cast<int>(net.layers[k].size());
      node_of[ci] = static_cast<int>(net.nodes.size());
      net.layers[k].push_back(node_of[ci]);
      net.nodes.push_back(std::move(node));
    }

  auto add_link = [&net](int from, int to, Vec2 from_pos, Vec2 to_pos) {
    auto [dir, dist] = unit_dir(from_pos, to_pos);
    const int id = static_cast<int>(net.links.size());
    net.links.push_back({from, to, dir, dist});
    if (from >= 0) net.nodes[from].outgoing.push_back(id);
    if (to >= 0) net.nodes[to].incoming.push_back(id);
    return id;
  };

  for (int v : net.layers[0])
    if (visible(tx, net.nodes[v].tile.center))
      net.input_links.push_back(add_link(kTxNode, v, tx, net.nodes[v].tile.center));
  for (int k = 0; k + 1 < kappa; ++k)
    for (int u : net.layers[k])
      for (int v : net.layers[k + 1])
        if (visible(net.nodes[u].tile.center, net.nodes[v].tile.center))
          add_link(u, v, net.nodes[u].tile.center, net.nodes[v].tile.center);
  for (int v : net.layers[kappa - 1])
    if (visible(net.nodes[v].tile.center, rx))
      net.output_links.push_back(add_link(v, kRxNode, net.nodes[v].tile.center, rx));

  return net;
}

std::vector<std::string> validate_net(const LayeredNet& net) {
  std::vector<std::string> out;
  auto where = [&net](int v) {
    return "(" + std::to_string(net.nodes[v].layer + 1) + "," +
           std::to_string(net.nodes[v].index_in_layer + 1) + ")";
  };

  if (net.layers.empty()) out.push_back("net has no layers");
  for (size_t k = 0; k < net.layers.size(); ++k)
    if (net.layers[k].empty())
      out.push_back("disconnected layer " + std::to_string(k + 1));

  for (size_t v = 0; v < net.nodes.size(); ++v) {
    const TileNode& n = net.nodes[v];
    if (n.incoming.empty())
      out.push_back("node " + where(static_cast<int>(v)) + " has no incoming link");
    if (n.outgoing.empty())
      out.push_back("node " + where(static_cast<int>(v)) + " has no outgoing link");
    if (!(n.omega > -kPi / 2.0 && n.omega < kPi / 2.0))
      out.push_back("node " + where(static_cast<int>(v)) + " omega out of range");
  }

  for (size_t i = 0; i < net.links.size(); ++i) {
    const Link& l = net.links[i];
    const std::string tag = "link " + std::to_string(i);
    if (std::abs(l.dir.norm() - 1.0) > 1e-9) out.push_back(tag + ": direction not unit");
    if (!(l.dist > 0.0)) out.push_back(tag + ": non-positive distance");

    Vec2 from_pos, to_pos;
    int from_layer, to_layer;
    if (l.from == kTxNode) {
      from_pos = net.tx_pos;
      from_layer = -1;
    } else if (l.from >= 0 && l.from < static_cast<int>(net.nodes.size())) {
      from_pos = net.nodes[l.from].tile.center;
      from_layer = net.nodes[l.from].layer;
    } else {
      out.push_back(tag + ": bad source id");
      continue;
    }
    if (l.to == kRxNode) {
      to_pos = net.rx_pos;
      to_layer = static_cast<int>(net.layers.size());
    } else if (l.to >= 0 && l.to < static_cast<int>(net.nodes.size())) {
      to_pos = net.nodes[l.to].tile.center;
      to_layer = net.nodes[l.to].layer;
    } else {
      out.push_back(tag + ": bad target id");
      continue;
    }
    if (to_layer - from_layer != 1)
      out.push_back(tag + ": does not connect consecutive layers");
    const auto [dir, dist] = unit_dir(from_pos, to_pos);
    if (std::abs(dir.x - l.dir.x) > 1e-9 || std::abs(dir.y - l.dir.y) > 1e-9 ||
        std::abs(dist - l.dist) > 1e-9)
      out.push_back(tag + ": stored direction/distance disagree with geometry");
    if (!los_visible(from_pos, to_pos, net.walls))
      out.push_back(tag + ": endpoints are not in line of sight");
  }

  return out;
}

}  // namespace pwe
