#pragma once

// The per-frame control step shared by replay and live ingest.
//
// For frame k the pipeline first lets the robot run for t_k - t_{k-1}
// (executing the commands issued at frame k-1), which completes the session
// record of frame k-1, then estimates the pose of frame k and issues the new
// head, eyelid and speech commands. A record therefore carries the commands
// of its frame and the robot state sensed one frame interval later.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "headimit/blink.hpp"
#include "headimit/config.hpp"
#include "headimit/emotion.hpp"
#include "headimit/error.hpp"
#include "headimit/geometry.hpp"
#include "headimit/joint_limits.hpp"
#include "headimit/robot_link.hpp"
#include "headimit/session_log.hpp"
#include "headimit/wire.hpp"

namespace headimit {

inline constexpr double kMinFrameDtMs = 1.0;
inline constexpr double kMaxFrameDtMs = 1000.0;

struct PipelineSettings {
  BaselineConfig baselines;
  YawSign yaw_sign = YawSign::kSubjectLeftPositive;
  BlinkParams blink;
  std::size_t emotion_window = kDefaultEmotionWindow;
  MarginMode margin = MarginMode::kAsWritten;
  double speed_fraction = 1.0;
  double fallback_dt_ms = 10.0;  // dt used to settle the final record when only one frame was seen
};

inline PitchLimitModel load_or_fit_limit_model(const PipelineConfig& cfg) {
  if (cfg.limits_model) {
    std::ifstream in(*cfg.limits_model);
    if (!in) throw ConfigError("cannot open limit model " + cfg.limits_model->string());
    try {
      return pitch_limit_model_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(cfg.limits_model->string() + ": " + e.what());
    }
  }
  return fit_pitch_limit_model(load_limit_table(cfg.limits_table), cfg.svr);
}

inline PipelineSettings settings_from_config(const PipelineConfig& cfg) {
  PipelineSettings s;
  s.baselines = cfg.baselines;
  s.yaw_sign = cfg.yaw_sign;
  s.blink = cfg.blink;
  s.emotion_window = cfg.emotion_window;
  s.margin = cfg.margin;
  s.speed_fraction = cfg.speed_fraction;
  s.fallback_dt_ms = cfg.actuator.tick_ms;
  return s;
}

class Pipeline {
 public:
  Pipeline(PipelineSettings settings, PitchLimitModel limits, ResponseMap responses, RobotLink& robot)
      : settings_(std::move(settings)),
        limits_(std::move(limits)),
        responses_(std::move(responses)),
        robot_(robot),
        emotions_(settings_.emotion_window) {}

  // Returns the completed record of the previous frame, if any.
  std::optional<SessionLogRecord> process(const LandmarkFrame& frame) {
    if (last_seq_ && frame.seq <= *last_seq_)
      throw NonMonotonicSeq("seq " + std::to_string(frame.seq) + " does not follow " +
                            std::to_string(*last_seq_));
    if (last_t_ && frame.t_ms < *last_t_)
      throw NonMonotonicSeq("t_ms " + std::to_string(frame.t_ms) + " goes backwards");

    // Estimate before touching the robot so a bad frame leaves state intact.
    const double yaw = estimate_yaw(frame, settings_.baselines, settings_.yaw_sign);
    const double pitch_raw = estimate_pitch_raw(frame, settings_.baselines);
    const double pitch = clamp_pitch(pitch_raw, pitch_bounds(limits_, yaw, settings_.margin));
    const EyeStatus left = eye_status(eye_ratio(frame.face.left), settings_.blink.threshold_left);
    const EyeStatus right = eye_status(eye_ratio(frame.face.right), settings_.blink.threshold_right);

    std::optional<SessionLogRecord> done;
    if (pending_) {
      last_dt_ = std::clamp(static_cast<double>(frame.t_ms - *last_t_), kMinFrameDtMs, kMaxFrameDtMs);
      done = complete(robot_.advance(*last_dt_));
    } else {
      robot_.start(frame.t_ms);
    }
    last_seq_ = frame.seq;
    last_t_ = frame.t_ms;

    SessionLogRecord rec;
    rec.t_ms = frame.t_ms;
    rec.seq = frame.seq;
    rec.yaw_cmd = yaw;
    rec.pitch_raw = pitch_raw;
    rec.pitch_cmd = pitch;
    rec.human_left_closed = left == EyeStatus::Closed;
    rec.human_right_closed = right == EyeStatus::Closed;

    robot_.send(HeadCommand{yaw, pitch, settings_.speed_fraction});
    if (auto lids = update_blink_state(blink_, left, right, frame.seq, settings_.blink.min_frames))
      robot_.send(*lids);
    if (auto emitted = emotions_.update(frame.emotion)) {
      rec.emotion = *emitted;
      rec.utterance = responses_.select(*emitted);
      robot_.send(SayCommand{*rec.utterance});
    }
    pending_ = std::move(rec);
    return done;
  }

  // Settles the last frame's record.
  std::optional<SessionLogRecord> finish() {
    if (!pending_) return std::nullopt;
    return complete(robot_.advance(last_dt_.value_or(settings_.fallback_dt_ms)));
  }

  const BlinkState& blink_state() const noexcept { return blink_; }
  const EmotionWindow& emotion_window() const noexcept { return emotions_; }

 private:
  SessionLogRecord complete(const RobotFeedback& fb) {
    SessionLogRecord rec = std::move(*pending_);
    pending_.reset();
    rec.sensed_t_ms = fb.t_ms;
    rec.yaw_sensed = fb.sensed_yaw_deg;
    rec.pitch_sensed = fb.sensed_pitch_deg;
    rec.robot_left_closed = fb.eye_left_closed;
    rec.robot_right_closed = fb.eye_right_closed;
    rec.speaking = fb.speaking;
    return rec;
  }

  PipelineSettings settings_;
  PitchLimitModel limits_;
  ResponseMap responses_;
  RobotLink& robot_;
  BlinkState blink_;
  EmotionWindow emotions_;
  std::optional<SessionLogRecord> pending_;
  std::optional<std::int64_t> last_seq_;
  std::optional<std::int64_t> last_t_;
  std::optional<double> last_dt_;
};

struct ReplayStats {
  std::size_t frames = 0;
  std::size_t records = 0;
};

// Feeds newline-delimited frame records through the pipeline and writes one
// session record per frame. Blank lines are skipped. Errors carry the 1-based
// input line.
inline ReplayStats run_replay(std::istream& input, Pipeline& pipeline, std::ostream& log) {
  ReplayStats stats;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(input, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::optional<SessionLogRecord> rec;
    try {
      rec = pipeline.process(parse_frame_record(line));
    } catch (const SchemaError& e) {
      throw LineError(lineno, e.what());
    } catch (const NonMonotonicSeq& e) {
      throw LineError(lineno, e.what());
    } catch (const DegenerateLandmarks& e) {
      throw LineError(lineno, e.what());
    }
    ++stats.frames;
    if (rec) {
      write_record(log, *rec);
      ++stats.records;
    }
  }
  if (auto rec = pipeline.finish()) {
    write_record(log, *rec);
    ++stats.records;
  }
  return stats;
}

}  // namespace headimit
