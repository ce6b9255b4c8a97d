#pragma once

#include "usvnav/config/run_config.hpp"
#include "usvnav/core/random.hpp"
#include "usvnav/core/vec2.hpp"
#include "usvnav/env/dynamics.hpp"
#include "usvnav/env/flow.hpp"
#include "usvnav/env/generator.hpp"
#include "usvnav/env/snapshot.hpp"
#include "usvnav/env/types.hpp"
#include "usvnav/eval/csv.hpp"
#include "usvnav/eval/episode.hpp"
#include "usvnav/eval/render.hpp"
#include "usvnav/eval/suite.hpp"
#include "usvnav/nn/adam.hpp"
#include "usvnav/nn/checkpoint.hpp"
#include "usvnav/nn/dense.hpp"
#include "usvnav/nn/model.hpp"
#include "usvnav/planners/apf.hpp"
#include "usvnav/planners/bug.hpp"
#include "usvnav/planners/learned.hpp"
#include "usvnav/planners/planner.hpp"
#include "usvnav/rl/losses.hpp"
#include "usvnav/rl/replay_buffer.hpp"
#include "usvnav/rl/risk.hpp"
#include "usvnav/rl/schedule.hpp"
#include "usvnav/rl/trainer.hpp"
#include "usvnav/rl/training_run.hpp"
#include "usvnav/sensing/observation.hpp"
#include "usvnav/planners/registry.hpp"
