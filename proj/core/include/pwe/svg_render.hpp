#pragma once

#include <string>

#include "pwe/layered_net.hpp"
#include "pwe/learner.hpp"
#include "pwe/raytracer.hpp"

namespace pwe {

// Floorplan with tiles, users, receiver aperture, and traced ray segments;
// segment opacity follows power. Self-contained SVG text.
std::string render_trace_svg(const Scenario& scenario, const TraceResult& result,
                             const std::string& label);

// One snapshot of the net: powers plus the steering angles they were
// computed with (node order).
struct NetworkView {
  const NetState* state = nullptr;
  std::vector<double> omegas;
  std::string label;
};

// Two power-flow panels of the same net, nodes as circles with a tick showing
// the steering angle, link width following carried power.
std::string render_network_svg(const LayeredNet& net, const NetworkView& before,
                               const NetworkView& after);

void write_text_file(const std::string& text, const std::string& path);

}  // namespace pwe
