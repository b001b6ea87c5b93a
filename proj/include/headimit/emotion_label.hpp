#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "headimit/error.hpp"

namespace headimit {

enum class EmotionLabel : std::uint8_t { anger, fear, neutral, sad, disgust, happy, surprise };

inline constexpr std::size_t kEmotionCount = 7;

inline constexpr std::array<EmotionLabel, kEmotionCount> kAllEmotions = {
    EmotionLabel::anger, EmotionLabel::fear,  EmotionLabel::neutral, EmotionLabel::sad,
    EmotionLabel::disgust, EmotionLabel::happy, EmotionLabel::surprise};

inline constexpr std::string_view to_string(EmotionLabel e) noexcept {
  constexpr std::array<std::string_view, kEmotionCount> names = {
      "anger", "fear", "neutral", "sad", "disgust", "happy", "surprise"};
  return names[static_cast<std::size_t>(e)];
}

inline constexpr std::optional<EmotionLabel> try_parse_emotion(std::string_view s) noexcept {
  for (EmotionLabel e : kAllEmotions)
    if (to_string(e) == s) return e;
  return std::nullopt;
}

inline EmotionLabel parse_emotion(std::string_view s) {
  if (auto e = try_parse_emotion(s)) return *e;
  throw UnknownEmotion("unknown emotion label '" + std::string(s) + "'");
}

}  // namespace headimit
