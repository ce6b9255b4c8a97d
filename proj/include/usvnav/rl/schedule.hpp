#pragma once

#include <algorithm>

namespace usvnav::rl {

/// Exploration rate: linear from `start` to `end` over the first `fraction`
/// of training, then held at `end`.
inline double epsilon_at(long long step, long long total_steps, double start = 1.0, double end = 0.05,
                         double fraction = 0.1) {
  const double horizon = fraction * static_cast<double>(total_steps);
  if (horizon <= 0.0 || static_cast<double>(step) >= horizon) return end;
  return start + (end - start) * (static_cast<double>(step) / horizon);
}

/// Curriculum phase (1..3) in effect at `step`, advancing every `phase_length` steps.
inline int curriculum_phase(long long step, long long phase_length) {
  if (phase_length <= 0) return 1;
  return static_cast<int>(std::clamp<long long>(1 + step / phase_length, 1, 3));
}

}  // namespace usvnav::rl
