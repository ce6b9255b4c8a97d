#pragma once

#include <span>

#include "usvnav/env/types.hpp"

namespace usvnav {

/// Tangential Rankine velocity induced by `vortex` at `point`: rigid rotation
/// inside the core, 1/r decay outside, no radial component.
inline Vec2 rankine_velocity(const Vortex& vortex, Vec2 point) {
  const Vec2 rel = point - vortex.center;
  const double r2 = rel.squared_norm();
  if (r2 == 0.0) return {};
  const double r0 = vortex.core_radius;
  const double k = vortex.circulation / (2.0 * std::numbers::pi);
  // v_theta / r, so the tangential vector is (-y, x) * scale
  const double scale = r2 <= r0 * r0 ? k / (r0 * r0) : k / r2;
  return {-rel.y * scale, rel.x * scale};
}

inline Vec2 flow_at(std::span<const Vortex> vortices, Vec2 point) {
  Vec2 v;
  for (const auto& vortex : vortices) v += rankine_velocity(vortex, point);
  return v;
}

inline Vec2 flow_at(const EnvironmentState& env, Vec2 point) { return flow_at(env.vortices, point); }

}  // namespace usvnav
