#pragma once

// Synthetic replay traces standing in for recorded subjects.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "headimit/emotion_label.hpp"
#include "headimit/error.hpp"
#include "headimit/geometry.hpp"
#include "headimit/landmarks.hpp"
#include "headimit/wire.hpp"

namespace headimit::synth {

enum class Kind { sinusoid, blinks, emotions };

inline Kind parse_kind(std::string_view s) {
  if (s == "sinusoid") return Kind::sinusoid;
  if (s == "blinks") return Kind::blinks;
  if (s == "emotions") return Kind::emotions;
  throw ConfigError("unknown trace kind '" + std::string(s) + "'");
}

struct Options {
  Kind kind = Kind::sinusoid;
  std::size_t frames = 250;  // blinks/emotions extend this if their script needs more
  double fps = 25.0;
  std::uint64_t seed = 1;
  // sinusoid
  double yaw_amplitude_deg = 60.0;
  double pitch_amplitude_deg = 15.0;
  double yaw_period_s = 10.0;
  double pitch_period_s = 10.0 / std::numbers::phi;
  // blinks
  std::size_t blink_events = 50;
  std::size_t noise_blinks = 10;
};

inline constexpr Vec3 kHeadPivot{0.5, 0.45, 0.1};

// Axis-aligned neutral face; matches the default baselines (1,0,0)/(0,1,0).
inline LandmarkFrame neutral_frame() {
  LandmarkFrame f;
  f.pose = {{0.6, 0.4, 0.0}, {0.4, 0.4, 0.0}, {0.5, 0.5, 0.0}};
  auto eye = [](double cx) {
    return EyeLandmarks{{cx - 0.015, 0.39, 0.0}, {cx - 0.015, 0.41, 0.0},
                        {cx + 0.015, 0.39, 0.0}, {cx + 0.015, 0.41, 0.0}};
  };
  f.face = {eye(0.6), eye(0.4)};
  return f;
}

// Inner section nearly shut, outer partly: ratio 2.25, above the 1.8 default.
inline void close_eye(EyeLandmarks& e) {
  const double inner_mid = 0.5 * (e.it.y + e.ib.y);
  const double outer_mid = 0.5 * (e.ot.y + e.ob.y);
  e.it.y = inner_mid - 0.004;
  e.ib.y = inner_mid + 0.004;
  e.ot.y = outer_mid - 0.009;
  e.ob.y = outer_mid + 0.009;
}

// Head orientation R_up(yaw) * R_x(pitch), the composition the Euler
// decomposition in geometry.hpp inverts.
inline Rotation head_rotation(double yaw_deg, double pitch_deg) {
  return rodrigues({0.0, -1.0, 0.0}, deg_to_rad(yaw_deg)) *
         rodrigues({1.0, 0.0, 0.0}, deg_to_rad(pitch_deg));
}

inline Vec3 rotate_about(const Rotation& r, const Vec3& p, const Vec3& pivot) {
  return pivot + r.apply(p - pivot);
}

inline LandmarkFrame rotate_frame(const LandmarkFrame& f, const Rotation& r,
                                  const Vec3& pivot = kHeadPivot) {
  LandmarkFrame out = f;
  auto rot = [&](Vec3& p) { p = rotate_about(r, p, pivot); };
  rot(out.pose.left_eye);
  rot(out.pose.right_eye);
  rot(out.pose.nose);
  for (EyeLandmarks* e : {&out.face.left, &out.face.right}) {
    rot(e->it);
    rot(e->ib);
    rot(e->ot);
    rot(e->ob);
  }
  return out;
}

inline std::int64_t frame_time_ms(std::size_t k, double fps) {
  return static_cast<std::int64_t>(std::llround(static_cast<double>(k) * 1000.0 / fps));
}

inline std::vector<LandmarkFrame> sinusoid(const Options& o) {
  std::vector<LandmarkFrame> out;
  const LandmarkFrame neutral = neutral_frame();
  for (std::size_t k = 0; k < o.frames; ++k) {
    const double t = static_cast<double>(k) / o.fps;
    const double yaw = o.yaw_amplitude_deg * std::sin(2 * std::numbers::pi * t / o.yaw_period_s);
    const double pitch =
        o.pitch_amplitude_deg * std::sin(2 * std::numbers::pi * t / o.pitch_period_s);
    LandmarkFrame f = rotate_frame(neutral, head_rotation(yaw, pitch));
    f.seq = static_cast<std::int64_t>(k);
    f.t_ms = frame_time_ms(k, o.fps);
    out.push_back(f);
  }
  return out;
}

// Blink events last 2-5 frames; noise closures last one frame. Every fifth
// event is a left wink and every seventh a right wink. Closures are separated
// by 3-6 open frames.
inline std::vector<LandmarkFrame> blinks(const Options& o) {
  enum class Closure { both, left, right };
  struct Segment {
    std::size_t gap;
    std::size_t length;
    Closure which;
  };
  std::mt19937_64 rng(o.seed);
  auto uniform = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };

  std::vector<Segment> segs;
  for (std::size_t i = 0; i < o.blink_events; ++i) {
    Closure c = Closure::both;
    if (i % 5 == 4)
      c = Closure::left;
    else if (i % 7 == 6)
      c = Closure::right;
    segs.push_back({0, uniform(2, 5), c});
  }
  for (std::size_t i = 0; i < o.noise_blinks; ++i) segs.push_back({0, 1, Closure::both});
  std::shuffle(segs.begin(), segs.end(), rng);
  for (Segment& s : segs) s.gap = uniform(3, 6);

  std::vector<std::pair<bool, bool>> closed;  // per frame (left, right)
  for (const Segment& s : segs) {
    closed.insert(closed.end(), s.gap, {false, false});
    for (std::size_t k = 0; k < s.length; ++k)
      closed.emplace_back(s.which != Closure::right, s.which != Closure::left);
  }
  closed.insert(closed.end(), 3, {false, false});
  if (closed.size() < o.frames) closed.resize(o.frames, {false, false});

  std::vector<LandmarkFrame> out;
  const LandmarkFrame neutral = neutral_frame();
  for (std::size_t k = 0; k < closed.size(); ++k) {
    LandmarkFrame f = neutral;
    if (closed[k].first) close_eye(f.face.left);
    if (closed[k].second) close_eye(f.face.right);
    f.seq = static_cast<std::int64_t>(k);
    f.t_ms = frame_time_ms(k, o.fps);
    out.push_back(f);
  }
  return out;
}

// Thirty-frame blocks per label with 20% distractor labels and 10% frames
// carrying no label.
inline std::vector<LandmarkFrame> emotions(const Options& o) {
  constexpr std::size_t kBlock = 30;
  const std::vector<EmotionLabel> script = {EmotionLabel::neutral, EmotionLabel::happy,
                                            EmotionLabel::sad,     EmotionLabel::anger,
                                            EmotionLabel::surprise, EmotionLabel::fear,
                                            EmotionLabel::disgust};
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> any(0, kEmotionCount - 1);

  const std::size_t n = std::max(o.frames, script.size() * kBlock);
  std::vector<LandmarkFrame> out;
  const LandmarkFrame neutral = neutral_frame();
  for (std::size_t k = 0; k < n; ++k) {
    LandmarkFrame f = neutral;
    const EmotionLabel intended = script[std::min(k / kBlock, script.size() - 1)];
    const double r = u(rng);
    const std::size_t distractor = any(rng);
    if (r < 0.1)
      f.emotion.reset();
    else if (r < 0.3)
      f.emotion = kAllEmotions[distractor];
    else
      f.emotion = intended;
    f.seq = static_cast<std::int64_t>(k);
    f.t_ms = frame_time_ms(k, o.fps);
    out.push_back(f);
  }
  return out;
}

inline std::vector<LandmarkFrame> synthesize(const Options& o) {
  if (o.frames == 0) throw ConfigError("frames must be positive");
  if (!(o.fps > 0)) throw ConfigError("fps must be positive");
  switch (o.kind) {
    case Kind::sinusoid:
      return sinusoid(o);
    case Kind::blinks:
      return blinks(o);
    case Kind::emotions:
      return emotions(o);
  }
  return {};
}

inline void write_trace(std::ostream& out, const std::vector<LandmarkFrame>& frames) {
  for (const LandmarkFrame& f : frames) out << serialize_frame(f) << '\n';
}

}  // namespace headimit::synth
