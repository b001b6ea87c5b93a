#pragma once

// Independent reference computations used as test oracles. Nothing here
// calls into the library's math.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace oracle {

using V3 = std::array<double, 3>;
using M3 = std::array<std::array<double, 3>, 3>;

inline constexpr double kPi = 3.14159265358979323846;

inline double rad(double deg) { return deg * kPi / 180.0; }
inline double deg(double r) { return r * 180.0 / kPi; }

inline V3 sub(const V3& a, const V3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline double length(const V3& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }
inline V3 unit(const V3& a) {
  const double n = length(a);
  return {a[0] / n, a[1] / n, a[2] / n};
}

// Turn about the image up axis (-y): the subject's leftward turn moves the
// nose toward +x.
inline M3 turn_up(double yaw_deg) {
  const double c = std::cos(rad(yaw_deg)), s = std::sin(rad(yaw_deg));
  return {{{c, 0, -s}, {0, 1, 0}, {s, 0, c}}};
}

inline M3 tilt_x(double pitch_deg) {
  const double c = std::cos(rad(pitch_deg)), s = std::sin(rad(pitch_deg));
  return {{{1, 0, 0}, {0, c, -s}, {0, s, c}}};
}

inline M3 mul(const M3& a, const M3& b) {
  M3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

inline V3 apply(const M3& m, const V3& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
          m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

// Log map of a rotation matrix (angle strictly inside (0, pi)).
inline V3 matrix_to_rotvec(const M3& m) {
  const double c = (m[0][0] + m[1][1] + m[2][2] - 1.0) / 2.0;
  const double angle = std::acos(std::fmax(-1.0, std::fmin(1.0, c)));
  if (angle < 1e-12) return {0, 0, 0};
  const double k = angle / (2.0 * std::sin(angle));
  return {k * (m[2][1] - m[1][2]), k * (m[0][2] - m[2][0]), k * (m[1][0] - m[0][1])};
}

// Mode of a label window; nullopt on a tie for the maximum count.
inline std::optional<int> unique_mode(const std::vector<int>& labels, int n_classes) {
  std::vector<int> counts(static_cast<std::size_t>(n_classes), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  int best = -1, best_count = -1, n_best = 0;
  for (int c = 0; c < n_classes; ++c) {
    if (counts[c] > best_count) {
      best = c;
      best_count = counts[c];
      n_best = 1;
    } else if (counts[c] == best_count) {
      ++n_best;
    }
  }
  if (n_best > 1) return std::nullopt;
  return best;
}

// Number of maximal runs of `true` with length >= min_len.
inline std::size_t long_runs(const std::vector<bool>& closed, int min_len) {
  std::size_t runs = 0;
  int len = 0;
  for (std::size_t i = 0; i <= closed.size(); ++i) {
    if (i < closed.size() && closed[i]) {
      ++len;
    } else {
      if (len >= min_len) ++runs;
      len = 0;
    }
  }
  return runs;
}

}  // namespace oracle
