#pragma once

#include <cstdint>
#include <optional>

#include "headimit/emotion_label.hpp"
#include "headimit/vec3.hpp"

namespace headimit {

// Normalized image space: x in [0,1] rightward, y in [0,1] downward, z is the
// capture source's depth passed through unchanged.
struct PoseLandmarks {
  Vec3 left_eye;
  Vec3 right_eye;
  Vec3 nose;
};

// Vertical eyelid points of one eye: inner-top, inner-bottom, outer-top,
// outer-bottom.
struct EyeLandmarks {
  Vec3 it;
  Vec3 ib;
  Vec3 ot;
  Vec3 ob;
};

struct FaceLandmarks {
  EyeLandmarks left;
  EyeLandmarks right;
};

struct LandmarkFrame {
  std::int64_t t_ms = 0;
  std::int64_t seq = 0;
  PoseLandmarks pose;
  FaceLandmarks face;
  std::optional<EmotionLabel> emotion;
};

}  // namespace headimit
