#include "pwe/svg_render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pwe {

namespace {

// snprintf-backed appends keep float formatting fixed across platforms.
struct SvgText {
  std::string body;

  void add(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    body += buf;
  }
};

struct WorldMap {
  double scale = 1.0;
  double min_x = 0.0, max_y = 0.0;
  double margin = 40.0;

  double x(double wx) const { return margin + (wx - min_x) * scale; }
  double y(double wy) const { return margin + (max_y - wy) * scale; }
};

}  // namespace

std::string render_trace_svg(const Scenario& scenario, const TraceResult& result,
                             const std::string& label) {
  double lo_x = 1e30, lo_y = 1e30, hi_x = -1e30, hi_y = -1e30;
  for (const WallSegment& w : scenario.walls) {
    lo_x = std::min({lo_x, w.a.x, w.b.x});
    lo_y = std::min({lo_y, w.a.y, w.b.y});
    hi_x = std::max({hi_x, w.a.x, w.b.x});
    hi_y = std::max({hi_y, w.a.y, w.b.y});
  }
  for (const User& u : scenario.users) {
    lo_x = std::min(lo_x, u.position.x);
    lo_y = std::min(lo_y, u.position.y);
    hi_x = std::max(hi_x, u.position.x);
    hi_y = std::max(hi_y, u.position.y);
  }
  const double extent = std::max({hi_x - lo_x, hi_y - lo_y, 1e-6});

  WorldMap m;
  m.scale = 560.0 / extent;
  m.min_x = lo_x;
  m.max_y = hi_y;
  const double width = (hi_x - lo_x) * m.scale + 2.0 * m.margin;
  const double height = (hi_y - lo_y) * m.scale + 2.0 * m.margin + 30.0;

  SvgText svg;
  svg.add("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
          "viewBox=\"0 0 %.0f %.0f\">\n",
          width, height, width, height);
  svg.add("<rect width=\"100%%\" height=\"100%%\" fill=\"#ffffff\"/>\n");
  svg.add("<text x=\"%.1f\" y=\"24\" font-family=\"monospace\" font-size=\"16\" "
          "fill=\"#222222\">%s</text>\n",
          m.margin, label.c_str());

  double p_max = 0.0;
  for (const RaySegment& seg : result.segments) p_max = std::max(p_max, seg.power_w);
  for (const RaySegment& seg : result.segments) {
    const double rel = p_max > 0.0 ? seg.power_w / p_max : 0.0;
    const double opacity = 0.10 + 0.88 * std::sqrt(rel);
    svg.add("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
            "stroke=\"#e67e22\" stroke-width=\"1.6\" stroke-opacity=\"%.3f\"/>\n",
            m.x(seg.from.x), m.y(seg.from.y), m.x(seg.to.x), m.y(seg.to.y), opacity);
  }

  for (const WallSegment& w : scenario.walls) {
    if (!w.coated) {
      svg.add("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
              "stroke=\"#9aa0a6\" stroke-width=\"4\"/>\n",
              m.x(w.a.x), m.y(w.a.y), m.x(w.b.x), m.y(w.b.y));
      continue;
    }
    const Vec2 dir = w.dir();
    const double tw = w.tile_width();
    for (int ti = 0; ti < w.tile_count; ++ti) {
      const Vec2 a = w.a + dir * (tw * ti);
      const Vec2 b = w.a + dir * (tw * (ti + 1));
      svg.add("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
              "stroke=\"%s\" stroke-width=\"5\"/>\n",
              m.x(a.x), m.y(a.y), m.x(b.x), m.y(b.y),
              ti % 2 == 0 ? "#2b6cb0" : "#3c82d6");
    }
  }

  for (const User& u : scenario.users) {
    const bool is_tx = u.role == UserRole::Transmitter;
    svg.add("<circle cx=\"%.2f\" cy=\"%.2f\" r=\"5\" fill=\"%s\"/>\n",
            m.x(u.position.x), m.y(u.position.y), is_tx ? "#c0392b" : "#1e8449");
    svg.add("<text x=\"%.2f\" y=\"%.2f\" font-family=\"monospace\" font-size=\"13\" "
            "fill=\"#222222\">%s</text>\n",
            m.x(u.position.x) + 8.0, m.y(u.position.y) - 8.0, is_tx ? "Tx" : "Rx");
    if (!is_tx)
      svg.add("<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" fill=\"none\" "
              "stroke=\"#1e8449\" stroke-dasharray=\"4 3\"/>\n",
              m.x(u.position.x), m.y(u.position.y),
              scenario.physics.rx_aperture_width_m / 2.0 * m.scale);
  }

  svg.add("</svg>\n");
  return svg.body;
}

namespace {

void render_network_panel(SvgText& svg, const LayeredNet& net, const NetworkView& view,
                          double off_x, double panel_w, double panel_h) {
  const NetState& state = *view.state;
  const int columns = net.kappa() + 2;
  const double col_step = panel_w / columns;
  const double cx0 = off_x + col_step / 2.0;

  const auto col_x = [&](int c) { return cx0 + c * col_step; };
  const auto row_y = [&](int idx, int count) {
    return 50.0 + (panel_h - 70.0) * (idx + 1.0) / (count + 1.0);
  };

  std::vector<Vec2> pos(net.nodes.size());
  for (int k = 0; k < net.kappa(); ++k) {
    const auto& layer = net.layers[k];
    for (size_t i = 0; i < layer.size(); ++i)
      pos[layer[i]] = {col_x(k + 1), row_y(static_cast<int>(i),
                                           static_cast<int>(layer.size()))};
  }
  const Vec2 tx_at = {col_x(0), row_y(0, 1)};
  const Vec2 rx_at = {col_x(columns - 1), row_y(0, 1)};

  double p_max = 0.0;
  for (double p : state.link_power) p_max = std::max(p_max, p);

  for (size_t li = 0; li < net.links.size(); ++li) {
    const Link& link = net.links[li];
    const Vec2 from = link.from == kTxNode ? tx_at : pos[link.from];
    const Vec2 to = link.to == kRxNode ? rx_at : pos[link.to];
    const double rel = p_max > 0.0 ? state.link_power[li] / p_max : 0.0;
    if (rel <= 0.0) {
      svg.add("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
              "stroke=\"#d0d4d9\" stroke-width=\"0.6\"/>\n",
              from.x, from.y, to.x, to.y);
    } else {
      svg.add("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
              "stroke=\"#2b6cb0\" stroke-width=\"%.2f\" stroke-opacity=\"0.85\"/>\n",
              from.x, from.y, to.x, to.y, 0.6 + 6.0 * std::sqrt(rel));
    }
  }

  for (size_t id = 0; id < net.nodes.size(); ++id) {
    const Vec2& p = pos[id];
    svg.add("<circle cx=\"%.1f\" cy=\"%.1f\" r=\"11\" fill=\"#f6f8fa\" "
            "stroke=\"#2b6cb0\" stroke-width=\"1.5\"/>\n",
            p.x, p.y);
    // tick marks the steered normal, upright at omega = 0
    const double omega = view.omegas[id];
    svg.add("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
            "stroke=\"#c0392b\" stroke-width=\"2\"/>\n",
            p.x, p.y, p.x + 11.0 * std::sin(omega), p.y - 11.0 * std::cos(omega));
  }

  svg.add("<circle cx=\"%.1f\" cy=\"%.1f\" r=\"8\" fill=\"#c0392b\"/>\n", tx_at.x,
          tx_at.y);
  svg.add("<circle cx=\"%.1f\" cy=\"%.1f\" r=\"8\" fill=\"#1e8449\"/>\n", rx_at.x,
          rx_at.y);
  svg.add("<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"12\" "
          "fill=\"#222222\">Tx</text>\n",
          tx_at.x - 9.0, tx_at.y - 13.0);
  svg.add("<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" font-size=\"12\" "
          "fill=\"#222222\">Rx</text>\n",
          rx_at.x - 9.0, rx_at.y - 13.0);
  svg.add("<text x=\"%.1f\" y=\"28\" font-family=\"monospace\" font-size=\"15\" "
          "fill=\"#222222\">%s</text>\n",
          off_x + 16.0, view.label.c_str());
}

}  // namespace

std::string render_network_svg(const LayeredNet& net, const NetworkView& before,
                               const NetworkView& after) {
  if (before.state == nullptr || after.state == nullptr ||
      before.omegas.size() != net.nodes.size() ||
      after.omegas.size() != net.nodes.size())
    throw std::invalid_argument("network view does not match the net");

  size_t widest = 1;
  for (const auto& layer : net.layers) widest = std::max(widest, layer.size());

  const double panel_w = (net.kappa() + 2) * 110.0;
  const double panel_h = 90.0 + 60.0 * static_cast<double>(widest);
  const double width = panel_w * 2.0 + 30.0;

  SvgText svg;
  svg.add("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
          "viewBox=\"0 0 %.0f %.0f\">\n",
          width, panel_h, width, panel_h);
  svg.add("<rect width=\"100%%\" height=\"100%%\" fill=\"#ffffff\"/>\n");
  render_network_panel(svg, net, before, 0.0, panel_w, panel_h);
  svg.add("<line x1=\"%.1f\" y1=\"10\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#d0d4d9\"/>\n",
          panel_w + 15.0, panel_w + 15.0, panel_h - 10.0);
  render_network_panel(svg, net, after, panel_w + 30.0, panel_w, panel_h);
  svg.add("</svg>\n");
  return svg.body;
}

void write_text_file(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace pwe
