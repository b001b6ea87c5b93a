#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "headimit/commands.hpp"
#include "headimit/error.hpp"
#include "headimit/geometry.hpp"
#include "headimit/landmarks.hpp"

namespace headimit {

enum class EyeStatus : std::uint8_t { Open, Closed };
enum class Eye : std::uint8_t { Left = 0, Right = 1 };

struct EyeMeasure {
  double d_inner = 0.0;
  double d_outer = 0.0;
  double ratio = 0.0;  // +inf when the inner section has collapsed
};

inline EyeMeasure eye_ratio(const EyeLandmarks& eye) noexcept {
  EyeMeasure m;
  m.d_inner = norm(eye.it - eye.ib);
  m.d_outer = norm(eye.ot - eye.ob);
  m.ratio = m.d_inner < kLengthEpsilon ? std::numeric_limits<double>::infinity()
                                       : m.d_outer / m.d_inner;
  return m;
}

inline EyeStatus eye_status(const EyeMeasure& m, double threshold) noexcept {
  return m.ratio > threshold ? EyeStatus::Closed : EyeStatus::Open;
}

struct BlinkParams {
  double threshold_left = 1.8;
  double threshold_right = 1.8;
  int min_frames = 2;
};

struct BlinkEvent {
  Eye eye = Eye::Left;
  std::int64_t start_seq = 0;
  int duration_frames = 0;  // grows while the run continues
};

struct EyeTrack {
  EyeStatus status = EyeStatus::Open;
  int closed_run = 0;
  std::int64_t run_start_seq = 0;
  bool commanded_closed = false;  // robot eyelid currently held closed
};

struct BlinkState {
  std::array<EyeTrack, 2> eyes{};
  std::vector<BlinkEvent> events;
  std::optional<std::int64_t> last_seq;

  const EyeTrack& eye(Eye e) const { return eyes[static_cast<std::size_t>(e)]; }
};

// Per-eye debounce; returns the new eyelid command when it changes. A closed
// run becomes a robot blink when it reaches `min_frames`, and the eyelid
// reopens on the first Open frame after that. Shorter runs produce nothing.
inline std::optional<EyelidCommand> update_blink_state(BlinkState& state, EyeStatus left,
                                                      EyeStatus right, std::int64_t seq,
                                                      int min_frames = 2) {
  if (state.last_seq && seq <= *state.last_seq)
    throw NonMonotonicSeq("blink: seq " + std::to_string(seq) + " does not follow " +
                          std::to_string(*state.last_seq));
  state.last_seq = seq;

  bool changed = false;
  const std::array<EyeStatus, 2> observed{left, right};
  for (std::size_t i = 0; i < 2; ++i) {
    EyeTrack& t = state.eyes[i];
    t.status = observed[i];
    if (observed[i] == EyeStatus::Closed) {
      if (t.closed_run == 0) t.run_start_seq = seq;
      ++t.closed_run;
      if (t.closed_run == min_frames) {
        state.events.push_back({static_cast<Eye>(i), t.run_start_seq, t.closed_run});
        t.commanded_closed = true;
        changed = true;
      } else if (t.closed_run > min_frames) {
        for (auto it = state.events.rbegin(); it != state.events.rend(); ++it)
          if (it->eye == static_cast<Eye>(i)) {
            it->duration_frames = t.closed_run;
            break;
          }
      }
    } else {
      t.closed_run = 0;
      if (t.commanded_closed) {
        t.commanded_closed = false;
        changed = true;
      }
    }
  }
  if (!changed) return std::nullopt;
  return EyelidCommand{state.eyes[0].commanded_closed, state.eyes[1].commanded_closed};
}

}  // namespace headimit
