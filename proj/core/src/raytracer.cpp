#include "pwe/raytracer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

namespace pwe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr size_t kMaxLiveRays = 64;  // per source ray; overflow is pruned
constexpr double kMinCosMatch = 0.9; // routed tiles absorb poorer matches

// Flat hit list: one entry per tile of a coated wall, one per uncoated wall.
struct Surface {
  Vec2 a;
  Vec2 b;
  Vec2 normal;
  bool coated = false;
  int wall_id = -1;
  int tile_index = -1;
  Vec2 tile_center;
};

std::vector<Surface> build_surfaces(const Scenario& scenario) {
  std::vector<Surface> out;
  for (size_t wi = 0; wi < scenario.walls.size(); ++wi) {
    const WallSegment& w = scenario.walls[wi];
    if (!w.coated) {
      out.push_back({w.a, w.b, w.base_normal, false, static_cast<int>(wi), -1, {}});
      continue;
    }
    const Vec2 dir = w.dir();
    const double width = w.tile_width();
    for (int ti = 0; ti < w.tile_count; ++ti) {
      Surface s;
      s.a = w.a + dir * (width * ti);
      s.b = w.a + dir * (width * (ti + 1));
      s.normal = w.base_normal;
      s.coated = true;
      s.wall_id = static_cast<int>(wi);
      s.tile_index = ti;
      s.tile_center = w.a + dir * (width * (ti + 0.5));
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

double watts_to_dbm(double watts) {
  if (watts <= 0.0) throw std::domain_error("dBm undefined for non-positive power");
  return 10.0 * std::log10(watts * 1000.0);
}

std::vector<Ray> emit_rays(const User& tx, int n, double p_total_w) {
  if (n < 1) throw std::domain_error("ray count must be >= 1");
  const double alpha = tx.lobe_width_deg;
  if (!(alpha > 0.0 && alpha <= 180.0))
    throw std::domain_error("lobe width must lie in (0, 180] degrees");
  if (p_total_w < 0.0) throw std::domain_error("emitted power must be >= 0");

  std::vector<double> offset(n), gain(n);
  double gain_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    offset[i] = -alpha / 2.0 + (i + 0.5) * alpha / n;
    gain[i] = std::cos(kPi * offset[i] / alpha);
    gain_sum += gain[i];
  }

  std::vector<Ray> rays;
  rays.reserve(n);
  for (int i = 0; i < n; ++i) {
    Ray r;
    const double ang = deg_to_rad(tx.boresight_deg + offset[i]);
    r.origin = tx.position;
    r.dir = {std::cos(ang), std::sin(ang)};
    r.power_w = p_total_w * gain[i] / gain_sum;
    r.source_id = i;
    rays.push_back(r);
  }
  return rays;
}

TraceResult trace(const Scenario& scenario, const EnvironmentConfig& config,
                  const std::vector<Ray>& rays) {
  const std::vector<Surface> surfaces = build_surfaces(scenario);
  const User& rx = scenario.rx();
  const double aperture_r = scenario.physics.rx_aperture_width_m / 2.0;
  const double rx_bore_rad = deg_to_rad(rx.boresight_deg);
  const Vec2 rx_bore = {std::cos(rx_bore_rad), std::sin(rx_bore_rad)};
  const double rx_gate_cos = std::cos(deg_to_rad(rx.lobe_width_deg) / 2.0);

  TraceResult result;
  for (const Ray& r : rays) result.ledger.emitted += r.power_w;

  for (const Ray& source : rays) {
    std::deque<Ray> live;
    if (source.power_w > 0.0) live.push_back(source);

    while (!live.empty()) {
      const Ray r = live.front();
      live.pop_front();
      if (r.power_w <= 0.0) continue;

      double best_t = kInf;
      int best_surface = -1;
      for (size_t si = 0; si < surfaces.size(); ++si) {
        const auto hit =
            ray_segment_intersect(r.origin, r.dir, surfaces[si].a, surfaces[si].b);
        if (hit && hit->t < best_t) {
          best_t = hit->t;
          best_surface = static_cast<int>(si);
        }
      }

      // Receiver pickup happens mid-flight, before any wall interaction.
      const Vec2 to_rx = rx.position - r.origin;
      const double t_rx = to_rx.dot(r.dir);
      bool intercepted = false;
      if (t_rx > 1e-9 && t_rx < best_t &&
          (to_rx - t_rx * r.dir).norm() <= aperture_r) {
        intercepted = true;
        if (scenario.physics.rx_angular_gate && (-r.dir).dot(rx_bore) < rx_gate_cos)
          intercepted = false;
      }
      if (intercepted) {
        result.segments.push_back(
            {r.source_id, r.origin, r.origin + r.dir * t_rx, r.power_w});
        const double path = r.path_len_m + t_rx;
        const double spread =
            r.collimated ? 1.0 : 1.0 / (std::max(path, 1.0) * std::max(path, 1.0));
        const double deposit = r.power_w * spread;
        result.ledger.received += deposit;
        result.ledger.spread_loss += r.power_w - deposit;
        result.intercepted_ray_power_w += r.power_w;
        ++result.reasons.received;
        continue;
      }

      if (best_surface < 0) {
        result.segments.push_back(
            {r.source_id, r.origin, r.origin + r.dir * 1e3, r.power_w});
        result.ledger.escaped += r.power_w;
        ++result.reasons.escaped;
        continue;
      }

      const Surface& s = surfaces[best_surface];
      const Vec2 at = r.origin + r.dir * best_t;
      result.segments.push_back({r.source_id, r.origin, at, r.power_w});
      const double path = r.path_len_m + best_t;

      if (!s.coated) {
        result.ledger.absorbed += r.power_w;
        ++result.reasons.absorbed;
        continue;
      }

      const auto it = config.tiles.find({s.wall_id, s.tile_index});
      if (it == config.tiles.end())
        throw std::logic_error("contract violation: no config entry for tile (" +
                               std::to_string(s.wall_id) + ", " +
                               std::to_string(s.tile_index) + ")");
      const TileConfig& tc = it->second;

      if (tc.fn == TileFunction::Absorb) {
        result.ledger.absorbed += r.power_w;
        ++result.reasons.absorbed;
        continue;
      }

      const Route* route = nullptr;
      if (tc.fn != TileFunction::Specular) {
        double best_dot = -kInf;
        for (const Route& cand : tc.routes) {
          const double d = cand.in_dir.dot(r.dir);
          if (d > best_dot) {
            best_dot = d;
            route = &cand;
          }
        }
        if (route == nullptr || best_dot < kMinCosMatch) {
          result.ledger.absorbed += r.power_w;
          ++result.reasons.absorbed;
          continue;
        }
      }

      if (r.bounces >= scenario.physics.max_bounces) {
        result.ledger.bounce_limit += r.power_w;
        ++result.reasons.bounce_limit;
        continue;
      }
      const double rem = r.power_w * (1.0 - scenario.physics.bounce_loss_fraction);
      result.ledger.bounce_dissipated += r.power_w - rem;

      if (tc.fn == TileFunction::Specular) {
        Ray next = r;
        next.origin = at;
        next.dir = reflect(r.dir, s.normal);
        next.power_w = rem;
        next.collimated = false;
        next.path_len_m = path;
        next.bounces = r.bounces + 1;
        live.push_back(next);
        continue;
      }

      // Routed split: children re-originate at the tile center, collimated.
      double child_sum = 0.0;
      double frac_sum = 0.0;
      for (const RouteOut& out : route->out) {
        if (out.fraction <= 0.0) continue;
        frac_sum += out.fraction;
        Ray child;
        child.origin = s.tile_center;
        child.dir = out.dir;
        child.power_w = rem * out.fraction;
        child.collimated = true;
        child.path_len_m = path;
        child.bounces = r.bounces + 1;
        child.source_id = r.source_id;
        child_sum += child.power_w;
        live.push_back(child);
      }
      if (frac_sum > 1.0 + 1e-9)
        throw std::runtime_error("route fractions exceed 1 on tile (" +
                                 std::to_string(s.wall_id) + ", " +
                                 std::to_string(s.tile_index) + ")");
      result.ledger.absorbed += rem - child_sum;

      while (live.size() > kMaxLiveRays) {
        const auto weakest = std::min_element(
            live.begin(), live.end(),
            [](const Ray& a, const Ray& b) { return a.power_w < b.power_w; });
        result.ledger.truncated += weakest->power_w;
        ++result.reasons.truncated;
        live.erase(weakest);
      }
    }
  }

  result.received_w = result.ledger.received;
  result.absorbed_fraction =
      result.ledger.emitted > 0.0 ? result.ledger.absorbed / result.ledger.emitted : 0.0;
  return result;
}

std::optional<double> received_power_dbm(const TraceResult& result) {
  if (result.received_w <= 0.0) return std::nullopt;
  return watts_to_dbm(result.received_w);
}

void write_segments_csv(const TraceResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "ray_id,x1,y1,x2,y2,power_w\n";
  char row[192];
  for (const RaySegment& seg : result.segments) {
    std::snprintf(row, sizeof(row), "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", seg.ray_id,
                  seg.from.x, seg.from.y, seg.to.x, seg.to.y, seg.power_w);
    out << row;
  }
}

}  // namespace pwe
