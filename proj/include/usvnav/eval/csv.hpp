#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "usvnav/eval/suite.hpp"

namespace usvnav {

/// Shortest round-trip decimal; "nan" for NaN. Locale independent.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_number(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw std::invalid_argument("bad number in CSV: '" + s + "'");
  return v;
}

inline constexpr const char* kEpisodeCsvHeader = "step,t,x,y,theta,speed,a,w,reward,phi";

/// One row per control step; the state columns are taken after the step.
inline void write_episode_csv(std::ostream& out, const EpisodeRecord& rec) {
  out << kEpisodeCsvHeader << '\n';
  int i = 0;
  for (const auto& s : rec.steps) {
    out << ++i << ',' << format_number(s.time) << ',' << format_number(s.position.x) << ','
        << format_number(s.position.y) << ',' << format_number(s.heading) << ',' << format_number(s.speed) << ','
        << format_number(s.action.accel) << ',' << format_number(s.action.turn_rate) << ','
        << format_number(s.reward) << ',' << format_number(s.phi) << '\n';
  }
}

inline std::vector<StepRecord> read_episode_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kEpisodeCsvHeader) throw std::invalid_argument("not an episode CSV");
  std::vector<StepRecord> steps;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 10) throw std::invalid_argument("episode CSV row has " + std::to_string(f.size()) + " fields");
    StepRecord s;
    s.time = parse_number(f[1]);
    s.position = {parse_number(f[2]), parse_number(f[3])};
    s.heading = parse_number(f[4]);
    s.speed = parse_number(f[5]);
    s.action = {parse_number(f[6]), parse_number(f[7])};
    s.reward = parse_number(f[8]);
    s.phi = parse_number(f[9]);
    steps.push_back(s);
  }
  return steps;
}

/// Per-episode table of a suite.
inline void write_suite_csv(std::ostream& out, const SuiteResult& res) {
  out << "episode,env_seed,outcome,steps,time,energy,total_reward\n";
  for (std::size_t i = 0; i < res.episodes.size(); ++i) {
    const auto& r = res.episodes[i];
    out << i << ',' << r.env_seed << ',' << to_string(r.outcome) << ',' << r.step_count() << ','
        << format_number(r.duration()) << ',' << format_number(energy(r)) << ',' << format_number(r.total_reward())
        << '\n';
  }
}

inline constexpr const char* kSummaryCsvHeader =
    "planner,test_case,episodes,success_rate,out_of_bounds_rate,collision_rate,timeout_rate,average_time,average_energy";

inline void write_summary_row(std::ostream& out, const std::string& planner, int test_case, const SuiteMetrics& m) {
  out << planner << ',' << test_case << ',' << m.episodes << ',' << format_number(m.success_rate) << ','
      << format_number(m.out_of_bounds_rate) << ',' << format_number(m.collision_rate) << ','
      << format_number(m.timeout_rate) << ',' << format_number(m.average_time) << ','
      << format_number(m.average_energy) << '\n';
}

/// Human-readable results table: rates, then mean time and energy over successes.
inline void print_results_table(std::ostream& out, const std::vector<std::pair<std::string, SuiteMetrics>>& rows) {
  out << std::left << std::setw(16) << "agent" << std::right << std::setw(10) << "success" << std::setw(14)
      << "out of bounds" << std::setw(14) << "avg time (s)" << std::setw(12) << "avg energy" << '\n';
  out << std::fixed;
  for (const auto& [name, m] : rows) {
    out << std::left << std::setw(16) << name << std::right << std::setprecision(2) << std::setw(10) << m.success_rate
        << std::setw(14) << m.out_of_bounds_rate << std::setw(14) << m.average_time << std::setw(12)
        << m.average_energy << '\n';
  }
  out << std::defaultfloat;
}

/// Per-action planner latency table (mean / max in milliseconds).
inline void print_runtime_table(std::ostream& out, const std::vector<std::pair<std::string, SuiteMetrics>>& rows) {
  out << std::left << std::setw(16) << "agent" << std::right << std::setw(12) << "mean (ms)" << std::setw(12)
      << "max (ms)" << '\n';
  out << std::fixed;
  for (const auto& [name, m] : rows) {
    out << std::left << std::setw(16) << name << std::right << std::setprecision(4) << std::setw(12) << m.mean_plan_ms
        << std::setw(12) << m.max_plan_ms << '\n';
  }
  out << std::defaultfloat;
}

}  // namespace usvnav
