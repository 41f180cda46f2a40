#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "pwe/layered_net.hpp"
#include "pwe/scenario_io.hpp"
#include "test_support.hpp"

using namespace pwe;
using pwe::testing::random_scenario;

namespace {

Scenario default_scenario() { return load_scenario(PWE_SCENARIO_PATH); }

// Independent blocking oracle: solve p + t(q-p) = a + s(b-a) by Cramer's
// rule; a wall blocks when the crossing is strictly inside the sightline
// and lands on the wall segment. Parallel walls are treated as clear,
// which holds for every layout these tests build.
bool cramer_blocked(Vec2 p, Vec2 q, const std::vector<WallSegment>& walls) {
  for (const WallSegment& w : walls) {
    const double m00 = q.x - p.x, m01 = w.a.x - w.b.x;
    const double m10 = q.y - p.y, m11 = w.a.y - w.b.y;
    const double det = m00 * m11 - m01 * m10;
    if (std::abs(det) < 1e-12) continue;
    const double rx = w.a.x - p.x, ry = w.a.y - p.y;
    const double t = (rx * m11 - m01 * ry) / det;
    const double s = (m00 * ry - rx * m10) / det;
    if (t > 1e-12 && t < 1.0 - 1e-12 && s >= 0.0 && s <= 1.0) return true;
  }
  return false;
}

bool oracle_visible(Vec2 p, Vec2 q, const std::vector<WallSegment>& walls) {
  return !cramer_blocked(p, q, walls);
}

}  // namespace

TEST_CASE("default floorplan builds the expected net") {
  const Scenario s = default_scenario();
  const LayeredNet net = build_layered_net(s);

  REQUIRE(net.kappa() == 3);
  REQUIRE(net.nodes.size() == 15);
  for (int k = 0; k < 3; ++k) CHECK(net.layers[k].size() == 5);
  CHECK(net.input_links.size() == 5);
  CHECK(net.output_links.size() == 5);
  // Every tile of every consecutive pair is mutually visible here.
  CHECK(net.links.size() == 5 + 25 + 25 + 5);
  CHECK(validate_net(net).empty());
  CHECK(net.tx_pos == Vec2{2.5, 7.5});
  CHECK(net.rx_pos == Vec2{7.5, 7.5});
}

TEST_CASE("links connect consecutive layers with unit directions") {
  const Scenario s = default_scenario();
  const LayeredNet net = build_layered_net(s);

  for (size_t i = 0; i < net.links.size(); ++i) {
    const Link& l = net.links[i];
    CHECK(l.dir.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(l.dist > 0.0);

    const Vec2 from =
        l.from == kTxNode ? net.tx_pos : net.nodes[l.from].tile.center;
    const Vec2 to = l.to == kRxNode ? net.rx_pos : net.nodes[l.to].tile.center;
    const auto [dir, dist] = unit_dir(from, to);
    CHECK(l.dir.x == doctest::Approx(dir.x).epsilon(1e-12));
    CHECK(l.dir.y == doctest::Approx(dir.y).epsilon(1e-12));
    CHECK(l.dist == doctest::Approx(dist).epsilon(1e-12));

    // Cross-referenced from both endpoint nodes.
    if (l.from >= 0) {
      const auto& out = net.nodes[l.from].outgoing;
      CHECK(std::count(out.begin(), out.end(), static_cast<int>(i)) == 1);
    }
    if (l.to >= 0) {
      const auto& in = net.nodes[l.to].incoming;
      CHECK(std::count(in.begin(), in.end(), static_cast<int>(i)) == 1);
    }
  }
}

TEST_CASE("link set matches the Cramer visibility oracle") {
  std::mt19937_64 rng(101);
  for (int round = 0; round < 12; ++round) {
    const Scenario s = round == 0 ? default_scenario() : random_scenario(rng);
    const LayeredNet net = build_layered_net(s);

    std::set<std::pair<int, int>> have;
    for (const Link& l : net.links) have.insert({l.from, l.to});
    CHECK(have.size() == net.links.size());

    for (int v : net.layers[0])
      CHECK(have.count({kTxNode, v}) ==
            (oracle_visible(net.tx_pos, net.nodes[v].tile.center, s.walls) ? 1u : 0u));
    for (int v : net.layers[net.kappa() - 1])
      CHECK(have.count({v, kRxNode}) ==
            (oracle_visible(net.nodes[v].tile.center, net.rx_pos, s.walls) ? 1u : 0u));
    for (int k = 0; k + 1 < net.kappa(); ++k)
      for (int u : net.layers[k])
        for (int v : net.layers[k + 1])
          CHECK(have.count({u, v}) ==
                (oracle_visible(net.nodes[u].tile.center, net.nodes[v].tile.center,
                                s.walls)
                     ? 1u
                     : 0u));
  }
}

TEST_CASE("a tile losing its only outgoing sightline is dropped") {
  // A small slab across the (0, 4.5) -> Rx sightline only: that last-layer
  // tile keeps its feeds but cannot reach the receiver any more.
  Scenario s = default_scenario();
  WallSegment blocker;
  blocker.a = {3.4, 6.0};
  blocker.b = {4.1, 6.0};
  blocker.base_normal = {0.0, 1.0};
  blocker.coated = false;
  s.walls.push_back(blocker);

  const LayeredNet net = build_layered_net(s);
  REQUIRE(net.kappa() == 3);
  CHECK(net.layers[0].size() == 5);
  CHECK(net.layers[1].size() == 5);
  CHECK(net.layers[2].size() == 4);
  CHECK(net.nodes.size() == 14);
  CHECK(validate_net(net).empty());
  for (int v : net.layers[2])
    CHECK(net.nodes[v].tile.center.y != doctest::Approx(4.5));
}

TEST_CASE("a sealed-off receiver makes the build fail") {
  Scenario dead = default_scenario();
  const Vec2 lo{6.5, 6.5}, hi{8.5, 8.5};
  dead.walls.push_back({{lo.x, lo.y}, {lo.x, hi.y}, {1.0, 0.0}, false, 1});
  dead.walls.push_back({{lo.x, lo.y}, {hi.x, lo.y}, {0.0, 1.0}, false, 1});
  dead.walls.push_back({{hi.x, lo.y}, {hi.x, hi.y}, {-1.0, 0.0}, false, 1});
  dead.walls.push_back({{lo.x, hi.y}, {hi.x, hi.y}, {0.0, -1.0}, false, 1});
  CHECK_THROWS_WITH_AS(build_layered_net(dead), doctest::Contains("disconnected"),
                       std::runtime_error);
}

TEST_CASE("omega accessors round-trip and reject bad sizes") {
  std::mt19937_64 rng(5);
  const Scenario s = random_scenario(rng);
  LayeredNet net = build_layered_net(s);

  std::vector<double> want(net.nodes.size());
  for (size_t i = 0; i < want.size(); ++i) want[i] = 0.01 * static_cast<double>(i);
  net.set_omegas(want);
  CHECK(net.omegas() == want);
  CHECK_THROWS_AS(net.set_omegas(std::vector<double>(net.nodes.size() + 1, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("validate_net flags structural damage") {
  std::mt19937_64 rng(6);
  const Scenario s = random_scenario(rng);

  SUBCASE("clean build has no findings") {
    const LayeredNet net = build_layered_net(s);
    CHECK(validate_net(net).empty());
  }
  SUBCASE("omega outside the open interval") {
    LayeredNet net = build_layered_net(s);
    net.nodes[0].omega = kPi / 2.0;
    const auto found = validate_net(net);
    REQUIRE_FALSE(found.empty());
    CHECK(found.front().find("omega") != std::string::npos);
  }
  SUBCASE("corrupted link direction") {
    LayeredNet net = build_layered_net(s);
    net.links[0].dir = {2.0, 0.0};
    CHECK_FALSE(validate_net(net).empty());
  }
  SUBCASE("link skipping a layer") {
    LayeredNet net = build_layered_net(s);
    if (net.kappa() >= 2) {
      const int bad = net.output_links[0];
      net.links[bad].from = net.layers[0][0];
      CHECK_FALSE(validate_net(net).empty());
    }
  }
}
