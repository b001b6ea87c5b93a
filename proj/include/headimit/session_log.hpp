#pragma once

// One JSON object per processed frame, newline-delimited.

#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "headimit/emotion_label.hpp"
#include "headimit/error.hpp"

namespace headimit {

struct SessionLogRecord {
  std::int64_t t_ms = 0;
  std::int64_t seq = 0;
  double yaw_cmd = 0.0;
  double pitch_raw = 0.0;  // estimator output before the limit clamp
  double pitch_cmd = 0.0;
  std::int64_t sensed_t_ms = 0;
  double yaw_sensed = 0.0;
  double pitch_sensed = 0.0;
  bool human_left_closed = false;
  bool human_right_closed = false;
  bool robot_left_closed = false;
  bool robot_right_closed = false;
  bool speaking = false;
  std::optional<EmotionLabel> emotion;  // emitted this frame
  std::optional<std::string> utterance;
};

inline nlohmann::ordered_json to_json(const SessionLogRecord& r) {
  nlohmann::ordered_json j;
  j["t_ms"] = r.t_ms;
  j["seq"] = r.seq;
  j["yaw_cmd"] = r.yaw_cmd;
  j["pitch_raw"] = r.pitch_raw;
  j["pitch_cmd"] = r.pitch_cmd;
  j["sensed_t_ms"] = r.sensed_t_ms;
  j["yaw_sensed"] = r.yaw_sensed;
  j["pitch_sensed"] = r.pitch_sensed;
  j["human_left_closed"] = r.human_left_closed;
  j["human_right_closed"] = r.human_right_closed;
  j["robot_left_closed"] = r.robot_left_closed;
  j["robot_right_closed"] = r.robot_right_closed;
  j["speaking"] = r.speaking;
  j["emotion"] = r.emotion ? nlohmann::ordered_json(std::string(to_string(*r.emotion))) : nlohmann::ordered_json(nullptr);
  j["utterance"] = r.utterance ? nlohmann::ordered_json(*r.utterance) : nlohmann::ordered_json(nullptr);
  return j;
}

inline SessionLogRecord session_record_from_json(const nlohmann::json& j) {
  SessionLogRecord r;
  r.t_ms = j.at("t_ms").get<std::int64_t>();
  r.seq = j.at("seq").get<std::int64_t>();
  r.yaw_cmd = j.at("yaw_cmd").get<double>();
  r.pitch_raw = j.at("pitch_raw").get<double>();
  r.pitch_cmd = j.at("pitch_cmd").get<double>();
  r.sensed_t_ms = j.at("sensed_t_ms").get<std::int64_t>();
  r.yaw_sensed = j.at("yaw_sensed").get<double>();
  r.pitch_sensed = j.at("pitch_sensed").get<double>();
  r.human_left_closed = j.at("human_left_closed").get<bool>();
  r.human_right_closed = j.at("human_right_closed").get<bool>();
  r.robot_left_closed = j.at("robot_left_closed").get<bool>();
  r.robot_right_closed = j.at("robot_right_closed").get<bool>();
  r.speaking = j.at("speaking").get<bool>();
  if (const auto& e = j.at("emotion"); !e.is_null()) r.emotion = parse_emotion(e.get<std::string>());
  if (const auto& u = j.at("utterance"); !u.is_null()) r.utterance = u.get<std::string>();
  return r;
}

inline void write_record(std::ostream& out, const SessionLogRecord& r) {
  out << to_json(r).dump() << '\n';
}

// Throws LogParseError naming the 1-based line. An empty log is an error.
inline std::vector<SessionLogRecord> read_session_log(std::istream& in) {
  std::vector<SessionLogRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      records.push_back(session_record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw LogParseError(lineno, e.what());
    } catch (const Error& e) {
      throw LogParseError(lineno, e.what());
    }
  }
  if (records.empty()) throw LogParseError(lineno, "session log is empty");
  return records;
}

inline std::vector<SessionLogRecord> read_session_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open session log " + path);
  return read_session_log(in);
}

}  // namespace headimit
