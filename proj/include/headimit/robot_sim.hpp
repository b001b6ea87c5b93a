#pragma once

// Simulated robot head: first-order lag with a rate cap per joint, eyelids
// that switch instantly, and a speech flag that stays up for a time
// proportional to the utterance length.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "headimit/commands.hpp"
#include "headimit/error.hpp"
#include "headimit/geometry.hpp"
#include "headimit/joint_limits.hpp"

namespace headimit {

inline constexpr double kSpeechMsPerChar = 50.0;

struct ActuatorParams {
  double max_speed_yaw_deg_s = 120.0;
  double max_speed_pitch_deg_s = 120.0;
  double time_constant_s = 0.060;
  double sensor_noise_sigma_deg = 0.0;
  double tick_ms = 10.0;
  std::uint64_t noise_seed = 0;
};

struct RobotFeedback {
  std::int64_t t_ms = 0;
  double sensed_yaw_deg = 0.0;
  double sensed_pitch_deg = 0.0;
  bool eye_left_closed = false;
  bool eye_right_closed = false;
  bool speaking = false;
  friend bool operator==(const RobotFeedback&, const RobotFeedback&) = default;
};

inline std::size_t utf8_length(std::string_view s) noexcept {
  std::size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

class SimRobot {
 public:
  SimRobot(LimitTable hardware, ActuatorParams params)
      : hardware_(std::move(hardware)), params_(params), rng_(params.noise_seed) {
    validate(hardware_);
    if (!(params_.tick_ms > 0) || params_.max_speed_yaw_deg_s < 0 ||
        params_.max_speed_pitch_deg_s < 0 || params_.time_constant_s < 0 ||
        params_.sensor_noise_sigma_deg < 0)
      throw ConfigError("actuator parameters must be non-negative with tick_ms > 0");
    refresh_feedback();
  }

  const ActuatorParams& params() const noexcept { return params_; }
  const LimitTable& hardware() const noexcept { return hardware_; }
  const std::vector<std::string>& speech_log() const noexcept { return speech_log_; }
  double clock_ms() const noexcept { return clock_ms_; }
  HeadPose target() const noexcept { return target_; }
  HeadPose actual() const noexcept { return actual_; }

  void set_clock(double t_ms) noexcept {
    clock_ms_ = t_ms;
    refresh_feedback();
  }

  // Head targets are clamped to the hardware envelope before they are stored.
  void apply(const RobotCommand& cmd) {
    std::visit([this](const auto& c) { apply_one(c); }, cmd);
    refresh_feedback();
  }

  const RobotFeedback& step(double dt_ms) {
    if (!(dt_ms > 0)) throw Rejected("step: dt_ms must be positive");
    const double dt_s = dt_ms / 1000.0;
    const double lag = params_.time_constant_s > 0
                           ? 1.0 - std::exp(-dt_s / params_.time_constant_s)
                           : 1.0;
    auto move = [&](double current, double target, double max_speed) {
      const double cap = max_speed * speed_fraction_ * dt_s;
      const double delta = std::clamp((target - current) * lag, -cap, cap);
      return current + delta;
    };
    actual_.yaw_deg = clamp_yaw(move(actual_.yaw_deg, target_.yaw_deg, params_.max_speed_yaw_deg_s));
    const PitchBounds env = table_bounds(hardware_, actual_.yaw_deg);
    actual_.pitch_deg = std::clamp(
        move(actual_.pitch_deg, target_.pitch_deg, params_.max_speed_pitch_deg_s), env.min_deg,
        env.max_deg);
    clock_ms_ += dt_ms;
    refresh_feedback();
    return feedback_;
  }

  const RobotFeedback& read_feedback() const noexcept { return feedback_; }

 private:
  void apply_one(const HeadCommand& c) {
    if (!std::isfinite(c.yaw_deg) || !std::isfinite(c.pitch_deg))
      throw Rejected("head command has non-finite angles");
    if (!(c.speed_fraction > 0.0 && c.speed_fraction <= 1.0))
      throw Rejected("speed_fraction must be in (0, 1]");
    target_.yaw_deg = clamp_yaw(c.yaw_deg);
    const PitchBounds env = table_bounds(hardware_, target_.yaw_deg);
    target_.pitch_deg = std::clamp(c.pitch_deg, env.min_deg, env.max_deg);
    speed_fraction_ = c.speed_fraction;
  }

  void apply_one(const EyelidCommand& c) { eyelids_ = c; }

  void apply_one(const SayCommand& c) {
    speech_log_.push_back(c.text);
    speaking_until_ms_ = clock_ms_ + kSpeechMsPerChar * static_cast<double>(utf8_length(c.text));
  }

  void refresh_feedback() {
    double yaw = actual_.yaw_deg;
    double pitch = actual_.pitch_deg;
    if (params_.sensor_noise_sigma_deg > 0) {
      std::normal_distribution<double> noise(0.0, params_.sensor_noise_sigma_deg);
      yaw = clamp_yaw(yaw + noise(rng_));
      const PitchBounds env = table_bounds(hardware_, yaw);
      pitch = std::clamp(pitch + noise(rng_), env.min_deg, env.max_deg);
    }
    feedback_.t_ms = static_cast<std::int64_t>(std::llround(clock_ms_));
    feedback_.sensed_yaw_deg = yaw;
    feedback_.sensed_pitch_deg = pitch;
    feedback_.eye_left_closed = eyelids_.left_closed;
    feedback_.eye_right_closed = eyelids_.right_closed;
    feedback_.speaking = clock_ms_ < speaking_until_ms_;
  }

  LimitTable hardware_;
  ActuatorParams params_;
  std::mt19937_64 rng_;
  double clock_ms_ = 0.0;
  HeadPose target_{};
  HeadPose actual_{};
  double speed_fraction_ = 1.0;
  EyelidCommand eyelids_{};
  double speaking_until_ms_ = 0.0;
  std::vector<std::string> speech_log_;
  RobotFeedback feedback_{};
};

// ---- wire encoding ----------------------------------------------------------

inline nlohmann::json to_json(const RobotCommand& cmd) {
  struct Visitor {
    nlohmann::json operator()(const HeadCommand& c) const {
      return {{"type", "head"},
              {"yaw_deg", c.yaw_deg},
              {"pitch_deg", c.pitch_deg},
              {"speed_fraction", c.speed_fraction}};
    }
    nlohmann::json operator()(const EyelidCommand& c) const {
      return {{"type", "blink"}, {"left", c.left_closed}, {"right", c.right_closed}};
    }
    nlohmann::json operator()(const SayCommand& c) const {
      return {{"type", "say"}, {"text", c.text}};
    }
  };
  return std::visit(Visitor{}, cmd);
}

inline RobotCommand robot_command_from_json(const nlohmann::json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "head")
      return HeadCommand{j.at("yaw_deg").get<double>(), j.at("pitch_deg").get<double>(),
                         j.value("speed_fraction", 1.0)};
    if (type == "blink") return EyelidCommand{j.at("left").get<bool>(), j.at("right").get<bool>()};
    if (type == "say") return SayCommand{j.at("text").get<std::string>()};
    throw Rejected("unknown command type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Rejected(std::string("malformed command: ") + e.what());
  }
}

inline nlohmann::json to_json(const RobotFeedback& f) {
  return {{"t_ms", f.t_ms},
          {"sensed_yaw_deg", f.sensed_yaw_deg},
          {"sensed_pitch_deg", f.sensed_pitch_deg},
          {"eye_left_closed", f.eye_left_closed},
          {"eye_right_closed", f.eye_right_closed},
          {"speaking", f.speaking}};
}

inline RobotFeedback robot_feedback_from_json(const nlohmann::json& j) {
  try {
    return {j.at("t_ms").get<std::int64_t>(),      j.at("sensed_yaw_deg").get<double>(),
            j.at("sensed_pitch_deg").get<double>(), j.at("eye_left_closed").get<bool>(),
            j.at("eye_right_closed").get<bool>(),   j.at("speaking").get<bool>()};
  } catch (const nlohmann::json::exception& e) {
    throw Rejected(std::string("malformed feedback: ") + e.what());
  }
}

}  // namespace headimit
