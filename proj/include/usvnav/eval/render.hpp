#pragma once

#include <algorithm>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>

#include "usvnav/env/flow.hpp"
#include "usvnav/eval/episode.hpp"

namespace usvnav {

struct RenderOptions {
  double pixels_per_metre = 10.0;
  double margin = 20.0;           // px
  double shade_cell = 1.0;        // m
  double arrow_spacing = 5.0;     // m
  double shade_saturation = 4.0;  // flow speed (m/s) drawn darkest
};

/// Upper bound on how fast anything can move in `env`, used to reject a
/// trajectory that cannot belong to the snapshot.
inline double max_possible_speed(const EnvironmentState& env, const EnvConfig& cfg) {
  double s = cfg.v_max;
  for (const auto& v : env.vortices) s += v.edge_speed();
  return s;
}

/// Throws if consecutive positions are further apart than physically possible.
inline void check_trajectory_consistency(const EnvironmentState& env, const EnvConfig& cfg,
                                         std::span<const StepRecord> steps) {
  const double vmax = max_possible_speed(env, cfg);
  Vec2 prev = env.robot.position;
  double prev_t = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const double dt = steps[i].time - prev_t;
    if (dt <= 0.0) throw std::invalid_argument("trajectory time is not increasing at row " + std::to_string(i + 1));
    if (distance(prev, steps[i].position) > vmax * dt * (1.0 + 1e-9) + 1e-9) {
      throw std::invalid_argument("trajectory is inconsistent with the environment snapshot at row " + std::to_string(i + 1));
    }
    prev = steps[i].position;
    prev_t = steps[i].time;
  }
}

namespace detail {
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}
}  // namespace detail

/// SVG of the flow-speed field (darker = faster), current arrows, obstacles,
/// start/goal and the trajectory. Output is a pure function of the inputs.
inline std::string render_svg(const EnvironmentState& env, const EnvConfig& cfg, std::span<const StepRecord> steps,
                              const RenderOptions& opt = {}) {
  check_trajectory_consistency(env, cfg, steps);
  using detail::fmt;
  const double size = env.boundary.size();
  const double ppm = opt.pixels_per_metre;
  const double px = size * ppm + 2 * opt.margin;
  auto sx = [&](double x) { return opt.margin + (x - env.boundary.lo) * ppm; };
  auto sy = [&](double y) { return opt.margin + (env.boundary.hi - y) * ppm; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(px) + "\" height=\"" + fmt(px) + "\" viewBox=\"0 0 " +
         fmt(px) + " " + fmt(px) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + fmt(px) + "\" height=\"" + fmt(px) + "\" fill=\"white\"/>\n";

  svg += "<g id=\"flow\">\n";
  const int cells = std::max(1, static_cast<int>(size / opt.shade_cell));
  const double cell = size / cells;
  for (int i = 0; i < cells; ++i) {
    for (int j = 0; j < cells; ++j) {
      const Vec2 c{env.boundary.lo + (i + 0.5) * cell, env.boundary.lo + (j + 0.5) * cell};
      const double level = std::min(flow_at(env, c).norm() / opt.shade_saturation, 1.0);
      const int shade = static_cast<int>(std::lround(245.0 - 170.0 * level));
      char color[16];
      std::snprintf(color, sizeof(color), "#%02x%02x%02x", shade, shade, std::min(255, shade + 10));
      svg += "<rect x=\"" + fmt(sx(c.x - cell / 2)) + "\" y=\"" + fmt(sy(c.y + cell / 2)) + "\" width=\"" +
             fmt(cell * ppm) + "\" height=\"" + fmt(cell * ppm) + "\" fill=\"" + color + "\"/>\n";
    }
  }
  svg += "</g>\n<g id=\"arrows\" stroke=\"#1f3b73\" stroke-width=\"1\">\n";
  for (double x = env.boundary.lo + opt.arrow_spacing / 2; x < env.boundary.hi; x += opt.arrow_spacing) {
    for (double y = env.boundary.lo + opt.arrow_spacing / 2; y < env.boundary.hi; y += opt.arrow_spacing) {
      const Vec2 v = flow_at(env, {x, y});
      const double speed = v.norm();
      if (speed < 1e-6) continue;
      const double len = std::min(speed, opt.shade_saturation) / opt.shade_saturation * opt.arrow_spacing * 0.8;
      const Vec2 tip = Vec2{x, y} + v / speed * len;
      const Vec2 back = (Vec2{x, y} - tip) / std::max(len, 1e-9) * std::min(0.6, len * 0.4);
      const Vec2 w1 = tip + rotate(back, 0.5), w2 = tip + rotate(back, -0.5);
      svg += "<line x1=\"" + fmt(sx(x)) + "\" y1=\"" + fmt(sy(y)) + "\" x2=\"" + fmt(sx(tip.x)) + "\" y2=\"" +
             fmt(sy(tip.y)) + "\"/>";
      svg += "<polyline fill=\"none\" points=\"" + fmt(sx(w1.x)) + "," + fmt(sy(w1.y)) + " " + fmt(sx(tip.x)) + "," +
             fmt(sy(tip.y)) + " " + fmt(sx(w2.x)) + "," + fmt(sy(w2.y)) + "\"/>\n";
    }
  }
  svg += "</g>\n<g id=\"obstacles\" fill=\"#6b6b6b\" stroke=\"black\">\n";
  for (const auto& o : env.obstacles) {
    svg += "<circle cx=\"" + fmt(sx(o.center.x)) + "\" cy=\"" + fmt(sy(o.center.y)) + "\" r=\"" + fmt(o.radius * ppm) +
           "\"/>\n";
  }
  svg += "</g>\n";
  if (env.enforce_boundary) {
    svg += "<rect id=\"boundary\" x=\"" + fmt(sx(env.boundary.lo)) + "\" y=\"" + fmt(sy(env.boundary.hi)) +
           "\" width=\"" + fmt(size * ppm) + "\" height=\"" + fmt(size * ppm) +
           "\" fill=\"none\" stroke=\"red\" stroke-dasharray=\"8,3,2,3\"/>\n";
  }
  svg += "<circle id=\"goal\" cx=\"" + fmt(sx(env.goal.x)) + "\" cy=\"" + fmt(sy(env.goal.y)) + "\" r=\"" +
         fmt(cfg.goal_radius * ppm) + "\" fill=\"none\" stroke=\"#c00000\" stroke-width=\"2\"/>\n";
  svg += "<circle id=\"start\" cx=\"" + fmt(sx(env.start.x)) + "\" cy=\"" + fmt(sy(env.start.y)) +
         "\" r=\"4\" fill=\"#008000\"/>\n";

  if (!steps.empty()) {
    svg += "<polyline id=\"trajectory\" fill=\"none\" stroke=\"#ff8c00\" stroke-width=\"2\" points=\"" +
           fmt(sx(env.robot.position.x)) + "," + fmt(sy(env.robot.position.y));
    for (const auto& s : steps) svg += " " + fmt(sx(s.position.x)) + "," + fmt(sy(s.position.y));
    svg += "\"/>\n";
    for (const auto& s : steps) {
      if (env.boundary.contains(s.position)) continue;
      const double cx = sx(s.position.x), cy = sy(s.position.y);
      svg += "<g id=\"out-of-bounds\" stroke=\"red\" stroke-width=\"3\"><line x1=\"" + fmt(cx - 6) + "\" y1=\"" +
             fmt(cy - 6) + "\" x2=\"" + fmt(cx + 6) + "\" y2=\"" + fmt(cy + 6) + "\"/><line x1=\"" + fmt(cx - 6) +
             "\" y1=\"" + fmt(cy + 6) + "\" x2=\"" + fmt(cx + 6) + "\" y2=\"" + fmt(cy - 6) + "\"/></g>\n";
      break;
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace usvnav
