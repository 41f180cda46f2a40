#include "pwe/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace pwe {

namespace {

constexpr double kUnitTol = 1e-9;
constexpr double kCollinearEps = 1e-12;

void require_unit(Vec2 v, const char* what) {
  if (std::abs(v.norm() - 1.0) > kUnitTol)
    throw std::invalid_argument(std::string(what) + " must be a unit vector");
}

int orient(Vec2 a, Vec2 b, Vec2 c) {
  const double v = (b - a).cross(c - a);
  if (v > kCollinearEps) return 1;
  if (v < -kCollinearEps) return -1;
  return 0;
}

}  // namespace

Vec2 Vec2::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
  return {x / n, y / n};
}

Vec2 reflect(Vec2 d, Vec2 n) {
  require_unit(d, "direction");
  require_unit(n, "normal");
  return d - 2.0 * d.dot(n) * n;
}

Vec2 normal_from_angle(Vec2 base_normal, double omega) {
  require_unit(base_normal, "base normal");
  if (!(omega > -kPi / 2.0 && omega < kPi / 2.0))
    throw std::domain_error("steering angle out of (-pi/2, pi/2)");
  return base_normal.rotated(omega);
}

std::pair<Vec2, double> unit_dir(Vec2 from, Vec2 to) {
  const Vec2 d = to - from;
  const double len = d.norm();
  if (len == 0.0) throw std::invalid_argument("unit_dir: identical points");
  return {{d.x / len, d.y / len}, len};
}

bool segment_blocks(Vec2 p, Vec2 q, Vec2 a, Vec2 b) {
  const int o1 = orient(p, q, a);
  const int o2 = orient(p, q, b);
  const int o3 = orient(a, b, p);
  const int o4 = orient(a, b, q);

  if (o3 == 0 && o4 == 0) {
    // Collinear: blocked when (a,b) overlaps the open interior of (p,q).
    const Vec2 r = q - p;
    const double len_sq = r.norm_sq();
    if (len_sq == 0.0) return false;
    double ta = (a - p).dot(r) / len_sq;
    double tb = (b - p).dot(r) / len_sq;
    if (ta > tb) std::swap(ta, tb);
    const double lo = std::max(ta, 0.0);
    const double hi = std::min(tb, 1.0);
    const double teps = 1e-12;
    if (hi - lo > teps) return true;
    if (hi < lo) return false;
    const double t = 0.5 * (lo + hi);
    return t > teps && t < 1.0 - teps;
  }

  // Crossing exactly at p or q is a touch, not a block.
  if (o3 == 0 || o4 == 0) return false;
  if (o3 == o4) return false;
  return o1 * o2 <= 0;
}

bool los_visible(Vec2 p, Vec2 q, std::span<const WallSegment> walls) {
  for (const WallSegment& w : walls)
    if (segment_blocks(p, q, w.a, w.b)) return false;
  return true;
}

std::vector<Tile> wall_tiles(const WallSegment& wall, int wall_id) {
  if (wall.tile_count < 1) throw std::invalid_argument("wall needs >= 1 tile");
  std::vector<Tile> tiles;
  tiles.reserve(wall.tile_count);
  const Vec2 dir = wall.dir();
  const double width = wall.tile_width();
  for (int i = 0; i < wall.tile_count; ++i) {
    Tile t;
    t.center = wall.a + dir * (width * (i + 0.5));
    t.width = width;
    t.wall_id = wall_id;
    t.index_in_wall = i;
    t.base_normal = wall.base_normal;
    tiles.push_back(t);
  }
  return tiles;
}

std::optional<RayHit> ray_segment_intersect(Vec2 origin, Vec2 dir, Vec2 a, Vec2 b) {
  constexpr double kRayEps = 1e-9;
  const Vec2 e = b - a;
  const double denom = dir.cross(e);
  if (std::abs(denom) < 1e-15) return std::nullopt;
  const Vec2 w = a - origin;
  const double t = w.cross(e) / denom;
  const double s = w.cross(dir) / denom;
  if (t <= kRayEps || s < 0.0 || s > 1.0) return std::nullopt;
  return RayHit{t, s};
}

}  // namespace pwe
