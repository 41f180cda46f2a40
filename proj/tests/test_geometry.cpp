#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>
#include <random>

#include "pwe/geometry.hpp"

using namespace pwe;

namespace {

// Independent oracle: solve origin + t*dir = a + s*(b - a) by Cramer's rule
// on the 2x2 system, with the same forward guard as the library.
std::optional<RayHit> cramer_ray_segment(Vec2 origin, Vec2 dir, Vec2 a, Vec2 b) {
  const double m00 = dir.x, m01 = a.x - b.x;
  const double m10 = dir.y, m11 = a.y - b.y;
  const double det = m00 * m11 - m01 * m10;
  if (std::abs(det) < 1e-15) return std::nullopt;
  const double rhs_x = a.x - origin.x;
  const double rhs_y = a.y - origin.y;
  const double t = (rhs_x * m11 - m01 * rhs_y) / det;
  const double s = (m00 * rhs_y - rhs_x * m10) / det;
  if (t <= 1e-9 || s < 0.0 || s > 1.0) return std::nullopt;
  return RayHit{t, s};
}

Vec2 unit_at(double deg) {
  const double r = deg_to_rad(deg);
  return {std::cos(r), std::sin(r)};
}

}  // namespace

TEST_CASE("reflect mirrors about the normal") {
  // Head-on reversal.
  const Vec2 r1 = reflect({1.0, 0.0}, {-1.0, 0.0});
  CHECK(r1.x == doctest::Approx(-1.0));
  CHECK(r1.y == doctest::Approx(0.0).epsilon(1e-12));

  // 45-degree bounce off a floor keeps the tangential component.
  const double inv = 1.0 / std::sqrt(2.0);
  const Vec2 r2 = reflect({inv, -inv}, {0.0, 1.0});
  CHECK(r2.x == doctest::Approx(inv));
  CHECK(r2.y == doctest::Approx(inv));

  // Grazing along the surface is unchanged.
  const Vec2 r3 = reflect({0.0, 1.0}, {1.0, 0.0});
  CHECK(r3.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r3.y == doctest::Approx(1.0));

  CHECK_THROWS_AS(reflect({2.0, 0.0}, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(reflect({1.0, 0.0}, {0.0, 0.5}), std::invalid_argument);
}

TEST_CASE("reflect preserves length and flips the normal component") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int i = 0; i < 200; ++i) {
    const double a = ang(rng);
    const double b = ang(rng);
    const Vec2 d = {std::cos(a), std::sin(a)};
    const Vec2 n = {std::cos(b), std::sin(b)};
    const Vec2 r = reflect(d, n);
    CHECK(r.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.dot(n) == doctest::Approx(-d.dot(n)).epsilon(1e-12));
    const Vec2 tangent = n.perp();
    CHECK(r.dot(tangent) == doctest::Approx(d.dot(tangent)).epsilon(1e-12));
  }
}

TEST_CASE("normal_from_angle rotates within the open half-circle") {
  const Vec2 n0 = normal_from_angle({0.0, 1.0}, 0.0);
  CHECK(n0.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(n0.y == doctest::Approx(1.0));

  const Vec2 n1 = normal_from_angle({0.0, 1.0}, deg_to_rad(30.0));
  CHECK(n1.x == doctest::Approx(-0.5));
  CHECK(n1.y == doctest::Approx(std::sqrt(3.0) / 2.0));

  const Vec2 n2 = normal_from_angle({1.0, 0.0}, deg_to_rad(-45.0));
  CHECK(n2.x == doctest::Approx(std::cos(deg_to_rad(45.0))));
  CHECK(n2.y == doctest::Approx(-std::sin(deg_to_rad(45.0))));

  CHECK_THROWS_AS(normal_from_angle({0.0, 1.0}, kPi / 2.0), std::domain_error);
  CHECK_THROWS_AS(normal_from_angle({0.0, 1.0}, -kPi / 2.0), std::domain_error);
  CHECK_THROWS_AS(normal_from_angle({0.0, 2.0}, 0.0), std::invalid_argument);
}

TEST_CASE("unit_dir returns direction and distance") {
  const auto [d, len] = unit_dir({1.0, 2.0}, {4.0, 6.0});
  CHECK(len == doctest::Approx(5.0));
  CHECK(d.x == doctest::Approx(0.6));
  CHECK(d.y == doctest::Approx(0.8));
  CHECK_THROWS_AS(unit_dir({1.0, 1.0}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("segment_blocks crossing and touching rules") {
  const Vec2 p{0.0, 0.0}, q{10.0, 0.0};

  // Proper crossing blocks.
  CHECK(segment_blocks(p, q, {5.0, -1.0}, {5.0, 1.0}));
  // A wall ending exactly on the open segment blocks.
  CHECK(segment_blocks(p, q, {5.0, 0.0}, {5.0, 1.0}));
  // A wall through the endpoint p or q is a touch, not a block.
  CHECK_FALSE(segment_blocks(p, q, {0.0, -1.0}, {0.0, 1.0}));
  CHECK_FALSE(segment_blocks(p, q, {10.0, -1.0}, {10.0, 1.0}));
  // Disjoint and parallel walls never block.
  CHECK_FALSE(segment_blocks(p, q, {5.0, 1.0}, {6.0, 2.0}));
  CHECK_FALSE(segment_blocks(p, q, {0.0, 1.0}, {10.0, 1.0}));

  // Collinear overlap blocks; collinear touch at an endpoint does not.
  CHECK(segment_blocks(p, q, {4.0, 0.0}, {6.0, 0.0}));
  CHECK(segment_blocks(p, q, {-1.0, 0.0}, {11.0, 0.0}));
  CHECK_FALSE(segment_blocks(p, q, {-2.0, 0.0}, {0.0, 0.0}));
  CHECK_FALSE(segment_blocks(p, q, {10.0, 0.0}, {12.0, 0.0}));
}

TEST_CASE("los_visible on a three-wall floorplan") {
  const std::vector<WallSegment> walls = {
      {{10.0, 5.0}, {10.0, 10.0}, {-1.0, 0.0}, true, 5},
      {{2.5, 0.0}, {7.5, 0.0}, {0.0, 1.0}, true, 5},
      {{0.0, 0.0}, {0.0, 5.0}, {1.0, 0.0}, true, 5},
  };

  // Interior points see each other and any wall point they face.
  CHECK(los_visible({2.5, 7.5}, {7.5, 7.5}, walls));
  CHECK(los_visible({2.5, 7.5}, {10.0, 7.5}, walls));
  CHECK(los_visible({10.0, 7.5}, {5.0, 0.0}, walls));
  // The first wall blocks a sightline passing beyond it.
  CHECK_FALSE(los_visible({5.0, 7.5}, {15.0, 7.5}, walls));
  // Passing under the first wall's lower end stays clear.
  CHECK(los_visible({5.0, 4.0}, {15.0, 4.0}, walls));
}

TEST_CASE("wall_tiles partitions the segment in order") {
  const WallSegment wall{{10.0, 5.0}, {10.0, 10.0}, {-1.0, 0.0}, true, 5};
  const std::vector<Tile> tiles = wall_tiles(wall, 3);
  REQUIRE(tiles.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(tiles[i].center.x == doctest::Approx(10.0));
    CHECK(tiles[i].center.y == doctest::Approx(5.5 + i));
    CHECK(tiles[i].width == doctest::Approx(1.0));
    CHECK(tiles[i].wall_id == 3);
    CHECK(tiles[i].index_in_wall == i);
    CHECK(tiles[i].base_normal == Vec2{-1.0, 0.0});
  }
  CHECK_THROWS_AS(wall_tiles({{0, 0}, {1, 0}, {0, 1}, true, 0}, 0),
                  std::invalid_argument);
}

TEST_CASE("ray_segment_intersect matches the Cramer oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);

  int hits = 0;
  for (int i = 0; i < 2000; ++i) {
    const Vec2 origin{coord(rng), coord(rng)};
    const Vec2 dir = {std::cos(ang(rng)), std::sin(ang(rng))};
    const Vec2 a{coord(rng), coord(rng)};
    const Vec2 b{coord(rng), coord(rng)};

    const auto got = ray_segment_intersect(origin, dir, a, b);
    const auto want = cramer_ray_segment(origin, dir, a, b);
    REQUIRE(got.has_value() == want.has_value());
    if (got) {
      ++hits;
      CHECK(got->t == doctest::Approx(want->t).epsilon(1e-12));
      CHECK(got->s == doctest::Approx(want->s).epsilon(1e-12));
      // The reported hit truly lies on both primitives.
      const Vec2 on_ray = origin + dir * got->t;
      const Vec2 on_seg = a + (b - a) * got->s;
      CHECK((on_ray - on_seg).norm() < 1e-8);
    }
  }
  CHECK(hits > 200);  // the sample actually exercises the hit branch
}

TEST_CASE("ray_segment_intersect rejects backward and off-segment hits") {
  // Pointing away from the segment.
  CHECK_FALSE(ray_segment_intersect({0, 0}, unit_at(180.0), {1, -1}, {1, 1}));
  // Parallel to the segment.
  CHECK_FALSE(ray_segment_intersect({0, 0}, unit_at(90.0), {1, -1}, {1, 1}));
  // The infinite line is hit beyond the segment's end.
  CHECK_FALSE(ray_segment_intersect({0, 0}, unit_at(45.0), {5, -2}, {5, -1}));
  // Starting on the segment does not count as a forward hit.
  CHECK_FALSE(ray_segment_intersect({1, 0}, unit_at(0.0), {1, -1}, {1, 1}));

  const auto hit = ray_segment_intersect({0, 0}, unit_at(0.0), {2, -1}, {2, 3});
  REQUIRE(hit);
  CHECK(hit->t == doctest::Approx(2.0));
  CHECK(hit->s == doctest::Approx(0.25));
}
