#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pwe/configurators.hpp"
#include "pwe/scenario.hpp"

namespace pwe {

struct Ray {
  Vec2 origin;
  Vec2 dir;  // unit
  double power_w = 0.0;
  bool collimated = false;
  double path_len_m = 0.0;
  int bounces = 0;
  int source_id = 0;
};

struct RaySegment {
  int ray_id = 0;
  Vec2 from;
  Vec2 to;
  double power_w = 0.0;  // power at segment start
};

// Where each joule of emitted power ended up. All buckets in watts;
// emitted equals the sum of the others up to rounding.
struct EnergyLedger {
  double emitted = 0.0;
  double received = 0.0;
  double spread_loss = 0.0;
  double absorbed = 0.0;
  double bounce_dissipated = 0.0;
  double bounce_limit = 0.0;
  double escaped = 0.0;
  double truncated = 0.0;
  double accounted() const {
    return received + spread_loss + absorbed + bounce_dissipated + bounce_limit +
           escaped + truncated;
  }
};

struct TerminationCounts {
  int received = 0;
  int absorbed = 0;
  int bounce_limit = 0;
  int escaped = 0;
  int truncated = 0;
};

struct TraceResult {
  std::vector<RaySegment> segments;
  double received_w = 0.0;
  double absorbed_fraction = 0.0;
  // Power that reached the receiver aperture before spreading losses.
  double intercepted_ray_power_w = 0.0;
  TerminationCounts reasons;
  EnergyLedger ledger;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

// Fans n rays across the transmitter lobe at half-step offsets from the
// edges, power weighted by cos(pi * offset / lobe) and normalized to
// p_total_w. All rays start non-collimated.
std::vector<Ray> emit_rays(const User& tx, int n, double p_total_w);

// Propagates rays through the configured environment until every ray is
// received, absorbed, dissipated, out of bounces, or escaped. Deterministic:
// source rays in order, FIFO splitting, no randomness.
TraceResult trace(const Scenario& scenario, const EnvironmentConfig& config,
                  const std::vector<Ray>& rays);

// Empty when no power was received ("no signal").
std::optional<double> received_power_dbm(const TraceResult& result);

void write_segments_csv(const TraceResult& result, const std::string& path);

}  // namespace pwe
