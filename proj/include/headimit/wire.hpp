#pragma once

// Landmark frame wire format. One JSON object per HTTP POST body, or per line
// in a replay file:
//
//   {"t_ms": 0, "seq": 0,
//    "pose": {"left_eye": {"x":..,"y":..,"z":..}, "right_eye": {..}, "nose": {..}},
//    "face": {"left":  {"it": {..}, "ib": {..}, "ot": {..}, "ob": {..}},
//             "right": {"it": {..}, "ib": {..}, "ot": {..}, "ob": {..}}},
//    "emotion": "happy"}          // optional, may be null
//
// Unknown fields are ignored.

#include <cmath>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "headimit/emotion_label.hpp"
#include "headimit/error.hpp"
#include "headimit/landmarks.hpp"

namespace headimit {

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key,
                                     const std::string& path) {
  const std::string field = path.empty() ? key : path + "." + key;
  if (!obj.is_object()) throw SchemaError(path.empty() ? "<root>" : path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) throw SchemaError(field, "missing required field");
  return *it;
}

inline Vec3 parse_vec3(const nlohmann::json& obj, const char* key, const std::string& path) {
  const std::string field = path + "." + key;
  const auto& v = require(obj, key, path);
  Vec3 out;
  double* dst[3] = {&out.x, &out.y, &out.z};
  const char* names[3] = {"x", "y", "z"};
  for (int i = 0; i < 3; ++i) {
    const auto& c = require(v, names[i], field);
    if (!c.is_number()) throw SchemaError(field + "." + names[i], "expected a number");
    *dst[i] = c.get<double>();
    if (!std::isfinite(*dst[i])) throw SchemaError(field + "." + names[i], "not finite");
  }
  return out;
}

inline std::int64_t parse_int(const nlohmann::json& obj, const char* key) {
  const auto& v = require(obj, key, "");
  if (!v.is_number_integer()) throw SchemaError(key, "expected an integer");
  return v.get<std::int64_t>();
}

inline EyeLandmarks parse_eye(const nlohmann::json& face, const char* key) {
  const std::string path = std::string("face.") + key;
  const auto& e = require(face, key, "face");
  return {parse_vec3(e, "it", path), parse_vec3(e, "ib", path), parse_vec3(e, "ot", path),
          parse_vec3(e, "ob", path)};
}

inline nlohmann::json vec3_json(const Vec3& v) { return {{"x", v.x}, {"y", v.y}, {"z", v.z}}; }

inline nlohmann::json eye_json(const EyeLandmarks& e) {
  return {{"it", vec3_json(e.it)}, {"ib", vec3_json(e.ib)}, {"ot", vec3_json(e.ot)},
          {"ob", vec3_json(e.ob)}};
}

}  // namespace detail

inline LandmarkFrame frame_from_json(const nlohmann::json& j) {
  LandmarkFrame f;
  if (!j.is_object()) throw SchemaError("<root>", "expected a JSON object");
  f.t_ms = detail::parse_int(j, "t_ms");
  f.seq = detail::parse_int(j, "seq");
  const auto& pose = detail::require(j, "pose", "");
  f.pose.left_eye = detail::parse_vec3(pose, "left_eye", "pose");
  f.pose.right_eye = detail::parse_vec3(pose, "right_eye", "pose");
  f.pose.nose = detail::parse_vec3(pose, "nose", "pose");
  const auto& face = detail::require(j, "face", "");
  f.face.left = detail::parse_eye(face, "left");
  f.face.right = detail::parse_eye(face, "right");
  if (auto it = j.find("emotion"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaError("emotion", "expected a string");
    auto e = try_parse_emotion(it->get<std::string>());
    if (!e) throw SchemaError("emotion", "unknown label '" + it->get<std::string>() + "'");
    f.emotion = *e;
  }
  return f;
}

inline LandmarkFrame parse_frame_record(std::string_view bytes) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("<root>", std::string("malformed JSON: ") + e.what());
  }
  return frame_from_json(j);
}

inline nlohmann::json to_json(const LandmarkFrame& f) {
  nlohmann::json j = {
      {"t_ms", f.t_ms},
      {"seq", f.seq},
      {"pose",
       {{"left_eye", detail::vec3_json(f.pose.left_eye)},
        {"right_eye", detail::vec3_json(f.pose.right_eye)},
        {"nose", detail::vec3_json(f.pose.nose)}}},
      {"face", {{"left", detail::eye_json(f.face.left)}, {"right", detail::eye_json(f.face.right)}}}};
  if (f.emotion) j["emotion"] = std::string(to_string(*f.emotion));
  return j;
}

inline std::string serialize_frame(const LandmarkFrame& f) { return to_json(f).dump(); }

}  // namespace headimit
