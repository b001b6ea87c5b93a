#pragma once

// Majority-vote smoothing of per-frame emotion labels and the
// emotion-to-utterance response table.

#include <array>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "headimit/emotion_label.hpp"
#include "headimit/error.hpp"

namespace headimit {

inline constexpr std::size_t kDefaultEmotionWindow = 10;

class EmotionWindow {
 public:
  explicit EmotionWindow(std::size_t window_size = kDefaultEmotionWindow)
      : window_size_(window_size == 0 ? 1 : window_size) {}

  std::size_t window_size() const noexcept { return window_size_; }
  std::size_t size() const noexcept { return labels_.size(); }
  bool full() const noexcept { return labels_.size() == window_size_; }
  EmotionLabel last_emitted() const noexcept { return last_emitted_; }
  const std::deque<EmotionLabel>& labels() const noexcept { return labels_; }

  // Sliding window; emits the unique modal label when it differs from the
  // last emission. Ties and partial windows emit nothing.
  std::optional<EmotionLabel> update(std::optional<EmotionLabel> label) {
    if (!label) return std::nullopt;
    labels_.push_back(*label);
    if (labels_.size() > window_size_) labels_.pop_front();
    if (!full()) return std::nullopt;

    std::array<std::size_t, kEmotionCount> counts{};
    for (EmotionLabel l : labels_) ++counts[static_cast<std::size_t>(l)];
    std::size_t best = 0;
    bool tie = false;
    for (std::size_t i = 1; i < kEmotionCount; ++i) {
      if (counts[i] > counts[best]) {
        best = i;
        tie = false;
      } else if (counts[i] == counts[best]) {
        tie = true;
      }
    }
    if (tie) return std::nullopt;
    const auto mode = static_cast<EmotionLabel>(best);
    if (mode == last_emitted_) return std::nullopt;
    last_emitted_ = mode;
    return mode;
  }

 private:
  std::size_t window_size_;
  std::deque<EmotionLabel> labels_;
  EmotionLabel last_emitted_ = EmotionLabel::neutral;
};

class ResponseMap {
 public:
  ResponseMap() = default;

  explicit ResponseMap(std::array<std::vector<std::string>, kEmotionCount> utterances)
      : utterances_(std::move(utterances)) {
    for (EmotionLabel e : kAllEmotions)
      if (utterances_[static_cast<std::size_t>(e)].empty())
        throw ConfigError("responses: no utterance for '" + std::string(to_string(e)) + "'");
  }

  // Round-robin over the emotion's utterances.
  const std::string& select(EmotionLabel e) {
    const auto i = static_cast<std::size_t>(e);
    const auto& list = utterances_[i];
    const std::string& out = list[counters_[i] % list.size()];
    counters_[i] = (counters_[i] + 1) % list.size();
    return out;
  }

  const std::string& select(std::string_view wire_label) { return select(parse_emotion(wire_label)); }

  const std::vector<std::string>& utterances(EmotionLabel e) const {
    return utterances_[static_cast<std::size_t>(e)];
  }

 private:
  std::array<std::vector<std::string>, kEmotionCount> utterances_;
  std::array<std::size_t, kEmotionCount> counters_{};
};

inline const std::string& select_response(ResponseMap& map, EmotionLabel e) { return map.select(e); }

inline ResponseMap response_map_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("responses: expected a JSON object");
  std::array<std::vector<std::string>, kEmotionCount> u;
  for (const auto& [key, value] : j.items()) {
    const EmotionLabel e = parse_emotion(key);
    if (!value.is_array()) throw ConfigError("responses: '" + key + "' must be an array");
    for (const auto& s : value) {
      if (!s.is_string()) throw ConfigError("responses: '" + key + "' entries must be strings");
      u[static_cast<std::size_t>(e)].push_back(s.get<std::string>());
    }
  }
  return ResponseMap(std::move(u));
}

inline ResponseMap load_response_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open response map " + path.string());
  try {
    return response_map_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace headimit
