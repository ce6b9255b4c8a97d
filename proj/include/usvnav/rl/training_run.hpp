#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "usvnav/eval/csv.hpp"
#include "usvnav/nn/checkpoint.hpp"
#include "usvnav/rl/trainer.hpp"

namespace usvnav::rl {

inline constexpr const char* kEvalLogHeader =
    "step,mean_reward,success_rate,phase1_reward,phase1_success,phase2_reward,phase2_success,phase3_reward,phase3_success";

inline std::string eval_log_row(const EvalPoint& p) {
  std::ostringstream s;
  s << p.step << ',' << format_number(p.mean_reward) << ',' << format_number(p.success_rate);
  for (int i = 0; i < 3; ++i) {
    s << ',' << format_number(p.phase_reward[static_cast<std::size_t>(i)]) << ','
      << format_number(p.phase_success[static_cast<std::size_t>(i)]);
  }
  return s.str();
}

struct TrainRunOptions {
  long long checkpoint_interval = 100'000;
  bool resume = false;
  std::ostream* progress = nullptr;
};

struct TrainRunResult {
  long long final_step = 0;
  std::vector<EvalPoint> log;
  nn::Model<float> model;
};

inline std::filesystem::path checkpoint_path(const std::filesystem::path& dir, long long step) {
  return dir / ("checkpoint_" + std::to_string(step) + ".txt");
}

/// Trains into `out_dir` (which must exist). Writes eval_log.csv, a
/// checkpoint series, latest.ckpt and train.log. With `resume`, weights and
/// step are restored from latest.ckpt and the log is continued.
inline TrainRunResult train_to_directory(nn::AgentKind kind, const TrainConfig& cfg, std::uint64_t seed,
                                         const std::filesystem::path& out_dir, const TrainRunOptions& opt = {}) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(out_dir)) throw std::runtime_error("output directory does not exist: " + out_dir.string());
  Trainer trainer(kind, cfg, seed);

  const fs::path log_path = out_dir / "eval_log.csv";
  const fs::path latest = out_dir / "latest.ckpt";
  std::vector<std::string> kept_rows;
  if (opt.resume && fs::exists(latest)) {
    const nn::Checkpoint ck = nn::load_checkpoint(latest);
    if (ck.kind != kind) throw std::invalid_argument("latest checkpoint belongs to a different agent kind");
    trainer.resume_from(ck.model, ck.step);
    std::ifstream old(log_path);
    std::string line;
    std::getline(old, line);
    while (std::getline(old, line)) {
      if (!line.empty() && std::stoll(line.substr(0, line.find(','))) <= ck.step) kept_rows.push_back(line);
    }
  }

  std::ofstream log(log_path, std::ios::trunc);
  std::ofstream text_log(out_dir / "train.log", opt.resume ? std::ios::app : std::ios::trunc);
  if (!log || !text_log) throw std::runtime_error("cannot write training logs in " + out_dir.string());
  log << kEvalLogHeader << '\n';
  for (const auto& row : kept_rows) log << row << '\n';
  log.flush();

  auto make_checkpoint = [&](long long step, const nn::Model<float>& model) {
    nn::Checkpoint ck{kind, seed, step, {}, model};
    ck.metadata["train_dt"] = format_number(cfg.dt);
    ck.metadata["phi_train"] = format_number(cfg.phi_train);
    return ck;
  };

  TrainRunResult result;
  Trainer::Hooks hooks;
  hooks.on_eval = [&](const EvalPoint& p) {
    result.log.push_back(p);
    log << eval_log_row(p) << '\n';
    log.flush();
    text_log << "eval step=" << p.step << " mean_reward=" << format_number(p.mean_reward)
             << " success_rate=" << format_number(p.success_rate) << '\n';
    text_log.flush();
    if (opt.progress) *opt.progress << "step " << p.step << "  reward " << p.mean_reward << "  success " << p.success_rate << std::endl;
    if (!log || !text_log) throw std::runtime_error("failed writing training logs");
  };
  hooks.on_checkpoint = [&](long long step, const nn::Model<float>& model) {
    const auto ck = make_checkpoint(step, model);
    if (step == 0 || (opt.checkpoint_interval > 0 && step % opt.checkpoint_interval == 0)) {
      nn::save_checkpoint(checkpoint_path(out_dir, step), ck);
    }
    nn::save_checkpoint(latest, ck);
  };
  hooks.on_progress = [&](long long step, int episodes, double loss) {
    if (step % 10'000 == 0) {
      text_log << "progress step=" << step << " episodes=" << episodes << " loss=" << format_number(loss) << '\n';
    }
  };

  text_log << "start agent=" << to_string(kind) << " seed=" << seed << " from_step=" << trainer.step()
           << " total_steps=" << cfg.total_steps << '\n';
  trainer.run(hooks);
  nn::save_checkpoint(latest, make_checkpoint(trainer.step(), trainer.model()));
  text_log << "done step=" << trainer.step() << " episodes=" << trainer.episodes() << '\n';

  result.final_step = trainer.step();
  result.model = trainer.model();
  return result;
}

}  // namespace usvnav::rl
