#pragma once

// Pipeline configuration file. Relative paths are resolved against the
// directory holding the config file. Every key is optional; see
// data/config.json for the shipped defaults.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "headimit/blink.hpp"
#include "headimit/emotion.hpp"
#include "headimit/error.hpp"
#include "headimit/geometry.hpp"
#include "headimit/joint_limits.hpp"
#include "headimit/robot_sim.hpp"

namespace headimit {

struct PipelineConfig {
  BaselineConfig baselines;
  YawSign yaw_sign = YawSign::kSubjectLeftPositive;
  BlinkParams blink;
  std::size_t emotion_window = kDefaultEmotionWindow;
  std::filesystem::path limits_table = "limits.json";
  std::optional<std::filesystem::path> limits_model;  // prefitted model; fitted from the table otherwise
  svr::Hyperparams svr;
  MarginMode margin = MarginMode::kAsWritten;
  std::filesystem::path responses = "responses.json";
  ActuatorParams actuator;
  double speed_fraction = 1.0;
  std::string listen = "127.0.0.1:8080";
  std::string robot = "sim";  // "sim" or "http:<host>:<port>"
};

namespace detail {

inline Vec3 vec3_from_array(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(what) + " must be [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline BaselineConfig baselines_from_json(const nlohmann::json& j) {
  BaselineConfig b{vec3_from_array(j.at("yaw"), "baselines.yaw"),
                   vec3_from_array(j.at("pitch"), "baselines.pitch")};
  for (const Vec3* v : {&b.yaw_baseline, &b.pitch_baseline})
    if (std::abs(norm(*v) - 1.0) > 1e-9) throw ConfigError("baseline vectors must be unit length");
  return b;
}

}  // namespace detail

inline nlohmann::json to_json(const BaselineConfig& b) {
  auto arr = [](const Vec3& v) { return nlohmann::json::array({v.x, v.y, v.z}); };
  return {{"yaw", arr(b.yaw_baseline)}, {"pitch", arr(b.pitch_baseline)}};
}

inline BaselineConfig load_baselines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open baselines " + path.string());
  try {
    return detail::baselines_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

inline PipelineConfig pipeline_config_from_json(const nlohmann::json& j,
                                                const std::filesystem::path& base_dir) {
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  PipelineConfig c;
  c.limits_table = resolve("limits.json");
  c.responses = resolve("responses.json");
  try {
    if (j.contains("baselines")) {
      const auto& b = j["baselines"];
      c.baselines = b.is_string() ? load_baselines(resolve(b.get<std::string>()))
                                  : detail::baselines_from_json(b);
    }
    if (j.contains("geometry")) c.yaw_sign = j["geometry"].value("mirror", false)
                                                 ? YawSign::kSubjectRightPositive
                                                 : YawSign::kSubjectLeftPositive;
    if (j.contains("blink")) {
      const auto& b = j["blink"];
      c.blink.threshold_left = b.value("threshold_left", c.blink.threshold_left);
      c.blink.threshold_right = b.value("threshold_right", c.blink.threshold_right);
      c.blink.min_frames = b.value("min_frames", c.blink.min_frames);
    }
    if (j.contains("emotion")) c.emotion_window = j["emotion"].value("window_size", c.emotion_window);
    if (j.contains("limits")) {
      const auto& l = j["limits"];
      if (l.contains("table")) c.limits_table = resolve(l["table"].get<std::string>());
      if (l.contains("model")) c.limits_model = resolve(l["model"].get<std::string>());
      c.svr.c = l.value("c", c.svr.c);
      c.svr.epsilon = l.value("epsilon", c.svr.epsilon);
      c.svr.gamma = l.value("gamma", c.svr.gamma);
      if (l.value("safe_margin", false)) c.margin = MarginMode::kTowardZero;
    }
    if (j.contains("responses")) c.responses = resolve(j["responses"].get<std::string>());
    if (j.contains("actuator")) {
      const auto& a = j["actuator"];
      c.actuator.max_speed_yaw_deg_s = a.value("max_speed_yaw_deg_s", c.actuator.max_speed_yaw_deg_s);
      c.actuator.max_speed_pitch_deg_s =
          a.value("max_speed_pitch_deg_s", c.actuator.max_speed_pitch_deg_s);
      c.actuator.time_constant_s = a.value("time_constant_s", c.actuator.time_constant_s);
      c.actuator.sensor_noise_sigma_deg =
          a.value("sensor_noise_sigma_deg", c.actuator.sensor_noise_sigma_deg);
      c.actuator.tick_ms = a.value("tick_ms", c.actuator.tick_ms);
      c.actuator.noise_seed = a.value("noise_seed", c.actuator.noise_seed);
    }
    c.speed_fraction = j.value("speed_fraction", c.speed_fraction);
    c.listen = j.value("listen", c.listen);
    c.robot = j.value("robot", c.robot);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (c.emotion_window < 1) throw ConfigError("emotion.window_size must be >= 1");
  if (c.blink.min_frames < 1) throw ConfigError("blink.min_frames must be >= 1");
  if (!(c.blink.threshold_left > 0) || !(c.blink.threshold_right > 0))
    throw ConfigError("blink thresholds must be positive");
  if (!(c.speed_fraction > 0 && c.speed_fraction <= 1))
    throw ConfigError("speed_fraction must be in (0, 1]");
  for (const auto& p : {c.limits_table, c.responses})
    if (!std::filesystem::exists(p)) throw ConfigError("missing file " + p.string());
  if (c.limits_model && !std::filesystem::exists(*c.limits_model))
    throw ConfigError("missing file " + c.limits_model->string());
  return c;
}

inline PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return pipeline_config_from_json(j, path.parent_path());
}

}  // namespace headimit
