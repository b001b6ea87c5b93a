#pragma once

// Imitation fidelity: R^2 of robot vs human trajectories, difference
// histograms, and blink imitation counts, all computed from a session log.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "headimit/error.hpp"
#include "headimit/session_log.hpp"

namespace headimit {

struct AngleSeries {
  std::vector<std::int64_t> t_ms;
  std::vector<double> human_deg;
  std::vector<double> robot_deg;

  std::size_t size() const noexcept { return t_ms.size(); }
  void push(std::int64_t t, double human, double robot) {
    t_ms.push_back(t);
    human_deg.push_back(human);
    robot_deg.push_back(robot);
  }
};

inline void validate(const AngleSeries& s) {
  if (s.human_deg.size() != s.t_ms.size() || s.robot_deg.size() != s.t_ms.size())
    throw DegenerateSeries("series columns differ in length");
  for (std::size_t i = 1; i < s.t_ms.size(); ++i)
    if (s.t_ms[i] <= s.t_ms[i - 1]) throw DegenerateSeries("series timestamps must increase");
}

// Coefficient of determination with the human trajectory as reference.
inline double r_squared(const AngleSeries& s) {
  validate(s);
  if (s.size() < 2) throw DegenerateSeries("r_squared needs at least two samples");
  double mean = 0.0;
  for (double h : s.human_deg) mean += h;
  mean /= static_cast<double>(s.size());
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    ss_tot += (s.human_deg[i] - mean) * (s.human_deg[i] - mean);
    ss_res += (s.human_deg[i] - s.robot_deg[i]) * (s.human_deg[i] - s.robot_deg[i]);
  }
  if (ss_tot == 0.0) throw DegenerateSeries("human series has zero variance");
  return 1.0 - ss_res / ss_tot;
}

struct Histogram {
  double bin_width = 1.0;
  std::vector<double> edges;  // edges.size() == counts.size() + 1; bins are [e_k, e_k+1)
  std::vector<std::size_t> counts;
};

struct DifferenceStats {
  double mean_deg = 0.0;
  double min_deg = 0.0;
  double max_deg = 0.0;
  Histogram histogram;
};

inline DifferenceStats difference_stats(const AngleSeries& s, double bin_width_deg = 1.0) {
  validate(s);
  if (s.size() == 0) throw DegenerateSeries("difference_stats needs a nonempty series");
  if (!(bin_width_deg > 0)) throw DegenerateSeries("bin width must be positive");
  std::vector<double> diff(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) diff[i] = s.robot_deg[i] - s.human_deg[i];

  DifferenceStats st;
  const auto [lo_it, hi_it] = std::minmax_element(diff.begin(), diff.end());
  st.min_deg = *lo_it;
  st.max_deg = *hi_it;
  double sum = 0.0;
  for (double d : diff) sum += d;
  st.mean_deg = sum / static_cast<double>(diff.size());

  Histogram& h = st.histogram;
  h.bin_width = bin_width_deg;
  const double lo = std::floor(st.min_deg);
  const auto nbins = static_cast<std::size_t>(std::floor((st.max_deg - lo) / bin_width_deg)) + 1;
  h.counts.assign(nbins, 0);
  for (std::size_t k = 0; k <= nbins; ++k) h.edges.push_back(lo + static_cast<double>(k) * bin_width_deg);
  for (double d : diff) {
    auto k = static_cast<std::size_t>(std::floor((d - lo) / bin_width_deg));
    h.counts[std::min(k, nbins - 1)]++;
  }
  return st;
}

struct JointReport {
  std::optional<double> r_squared;  // empty when the human series is degenerate
  DifferenceStats diff;
};

struct BlinkReport {
  int min_frames = 2;
  std::size_t attempts = 0;        // human closures with an eye closed >= min_frames
  std::size_t imitated = 0;        // attempts matched by a robot eyelid closure
  std::size_t noise_runs = 0;      // shorter closures
  std::size_t noise_imitated = 0;  // noise closures the robot followed
  std::size_t robot_blinks = 0;    // open->closed transitions of the robot eyelids
};

struct MetricsReport {
  std::size_t frames_analyzed = 0;
  JointReport yaw;
  JointReport pitch;
  BlinkReport blink;
  std::size_t emotions_emitted = 0;
  std::size_t utterances = 0;
  AngleSeries yaw_series;
  AngleSeries pitch_series;
};

// Each robot sample is paired with the latest human frame at or before its
// timestamp; robot samples preceding every human frame are dropped.
inline void build_series(const std::vector<SessionLogRecord>& log, AngleSeries& yaw,
                         AngleSeries& pitch) {
  std::size_t h = 0;
  std::optional<std::int64_t> last_t;
  for (const SessionLogRecord& r : log) {
    while (h + 1 < log.size() && log[h + 1].t_ms <= r.sensed_t_ms) ++h;
    if (log[h].t_ms > r.sensed_t_ms) continue;
    if (last_t && r.sensed_t_ms <= *last_t) continue;
    last_t = r.sensed_t_ms;
    yaw.push(r.sensed_t_ms, log[h].yaw_cmd, r.yaw_sensed);
    pitch.push(r.sensed_t_ms, log[h].pitch_cmd, r.pitch_sensed);
  }
}

inline BlinkReport count_blinks(const std::vector<SessionLogRecord>& log, int min_frames) {
  BlinkReport b;
  b.min_frames = min_frames;
  const std::size_t n = log.size();
  auto robot_closed = [&](std::size_t k) {
    return log[k].robot_left_closed || log[k].robot_right_closed;
  };
  std::vector<bool> onset(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    onset[k] = robot_closed(k) && (k == 0 || !robot_closed(k - 1));
    if (onset[k]) ++b.robot_blinks;
  }

  std::size_t k = 0;
  while (k < n) {
    auto human_closed = [&](std::size_t i) {
      return log[i].human_left_closed || log[i].human_right_closed;
    };
    if (!human_closed(k)) {
      ++k;
      continue;
    }
    const std::size_t start = k;
    int run_l = 0, run_r = 0, best = 0;
    while (k < n && human_closed(k)) {
      run_l = log[k].human_left_closed ? run_l + 1 : 0;
      run_r = log[k].human_right_closed ? run_r + 1 : 0;
      best = std::max({best, run_l, run_r});
      ++k;
    }
    const std::size_t end = std::min(k, n - 1);  // one frame of grace after the run
    bool followed = false;
    for (std::size_t i = start; i <= end; ++i) followed = followed || onset[i];
    if (best >= min_frames) {
      ++b.attempts;
      if (followed) ++b.imitated;
    } else {
      ++b.noise_runs;
      if (followed) ++b.noise_imitated;
    }
  }
  return b;
}

inline MetricsReport build_report(const std::vector<SessionLogRecord>& log, int min_blink_frames = 2,
                                  double bin_width_deg = 1.0) {
  if (log.empty()) throw LogParseError(0, "session log is empty");
  MetricsReport rep;
  build_series(log, rep.yaw_series, rep.pitch_series);
  rep.frames_analyzed = rep.yaw_series.size();
  if (rep.frames_analyzed == 0) throw LogParseError(0, "no robot sample aligns with a human frame");

  auto joint = [&](const AngleSeries& s) {
    JointReport j;
    try {
      j.r_squared = r_squared(s);
    } catch (const DegenerateSeries&) {
      j.r_squared.reset();
    }
    j.diff = difference_stats(s, bin_width_deg);
    return j;
  };
  rep.yaw = joint(rep.yaw_series);
  rep.pitch = joint(rep.pitch_series);
  rep.blink = count_blinks(log, min_blink_frames);
  for (const SessionLogRecord& r : log) {
    if (r.emotion) ++rep.emotions_emitted;
    if (r.utterance) ++rep.utterances;
  }
  return rep;
}

// ---- output -----------------------------------------------------------------

inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline nlohmann::ordered_json to_json(const JointReport& j) {
  nlohmann::ordered_json o;
  o["degenerate"] = !j.r_squared.has_value();
  o["r_squared"] = j.r_squared ? nlohmann::ordered_json(*j.r_squared) : nlohmann::ordered_json(nullptr);
  o["score"] = j.r_squared ? nlohmann::ordered_json(*j.r_squared * 100.0) : nlohmann::ordered_json(nullptr);
  o["mean_diff_deg"] = j.diff.mean_deg;
  o["min_diff_deg"] = j.diff.min_deg;
  o["max_diff_deg"] = j.diff.max_deg;
  o["histogram"] = {{"bin_width", j.diff.histogram.bin_width},
                    {"edges", j.diff.histogram.edges},
                    {"counts", j.diff.histogram.counts}};
  return o;
}

inline nlohmann::ordered_json to_json(const MetricsReport& r) {
  nlohmann::ordered_json o;
  o["frames_analyzed"] = r.frames_analyzed;
  o["yaw"] = to_json(r.yaw);
  o["pitch"] = to_json(r.pitch);
  o["blink"] = {{"min_frames", r.blink.min_frames},
                {"attempts", r.blink.attempts},
                {"imitated", r.blink.imitated},
                {"noise_runs", r.blink.noise_runs},
                {"noise_imitated", r.blink.noise_imitated},
                {"robot_blinks", r.blink.robot_blinks}};
  o["emotion"] = {{"emitted", r.emotions_emitted}, {"utterances", r.utterances}};
  return o;
}

inline void write_series_csv(const std::filesystem::path& path, const AngleSeries& s) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "t_ms,human_deg,robot_deg,diff_deg\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    out << s.t_ms[i] << ',' << format_number(s.human_deg[i]) << ','
        << format_number(s.robot_deg[i]) << ',' << format_number(s.robot_deg[i] - s.human_deg[i])
        << '\n';
}

}  // namespace headimit
