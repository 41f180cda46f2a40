#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace pwe {

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
  bool operator==(const Vec2&) const = default;

  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double norm_sq() const { return x * x + y * y; }
  Vec2 normalized() const;
  // counterclockwise quarter turn
  Vec2 perp() const { return {-y, x}; }
  Vec2 rotated(double rad) const {
    const double c = std::cos(rad), s = std::sin(rad);
    return {c * x - s * y, s * x + c * y};
  }
  double angle() const { return std::atan2(y, x); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

// A straight wall piece. Coated walls carry tiles; uncoated ones absorb.
// base_normal is unit, perpendicular to (b - a), and points into the room.
struct WallSegment {
  Vec2 a;
  Vec2 b;
  Vec2 base_normal;
  bool coated = false;
  int tile_count = 1;

  Vec2 dir() const { return (b - a).normalized(); }
  double length() const { return (b - a).norm(); }
  double tile_width() const { return length() / tile_count; }
};

// One metasurface unit of a coated wall. Tiles of a wall partition its
// segment; center sits halfway along each piece.
struct Tile {
  Vec2 center;
  double width = 0.0;
  int wall_id = -1;
  int index_in_wall = -1;
  Vec2 base_normal;
};

enum class UserRole { Transmitter, Receiver };

struct User {
  Vec2 position;
  double lobe_width_deg = 0.0;   // full angular width of the antenna lobe
  double boresight_deg = 0.0;    // lobe axis, counterclockwise from +x
  UserRole role = UserRole::Transmitter;
  double tx_power_dbm = 0.0;     // transmitters only
};

// Mirror reflection of propagation direction d about unit normal n.
// Both inputs must be unit vectors.
Vec2 reflect(Vec2 d, Vec2 n);

// Virtual (steered) normal: base_normal rotated counterclockwise by omega.
// omega must lie strictly inside (-pi/2, pi/2).
Vec2 normal_from_angle(Vec2 base_normal, double omega);

// Unit direction and distance from one point to another. Points must differ.
std::pair<Vec2, double> unit_dir(Vec2 from, Vec2 to);

// True when the open segment (p, q) crosses no wall. Touching a wall exactly
// at p or q does not block; passing through a wall endpoint does.
bool los_visible(Vec2 p, Vec2 q, std::span<const WallSegment> walls);

// Blocking test for a single closed segment (a, b) against open (p, q).
bool segment_blocks(Vec2 p, Vec2 q, Vec2 a, Vec2 b);

// The wall's tiles in order from a to b.
std::vector<Tile> wall_tiles(const WallSegment& wall, int wall_id);

// Forward intersection of ray origin + t*dir with segment [a, b]:
// t is the ray parameter, s the segment parameter in [0, 1].
struct RayHit {
  double t = 0.0;
  double s = 0.0;
};

// Nearest forward hit, or nothing when the ray is parallel to the segment,
// points away from it, or starts on it (t below a small guard).
std::optional<RayHit> ray_segment_intersect(Vec2 origin, Vec2 dir, Vec2 a, Vec2 b);

}  // namespace pwe
