#pragma once

// Head yaw and pitch from pose landmarks.
//
// Each angle is measured by the rotation that carries a neutral-pose baseline
// vector onto the current landmark vector: the eye vector (left - right) for
// yaw and the eye-midpoint-to-nose vector for pitch. The rotation is built as
// an axis-angle vector, expanded with Rodrigues' formula and decomposed into
// intrinsic Tait-Bryan angles.
//
// Head frame conventions (image coordinates are x right, y down, z depth):
//   yaw   right-handed about the up axis (-y); positive = subject turns
//         toward their left in an unmirrored image
//   pitch right-handed about +x; positive = nose moves down
//   roll  about +z

#include <algorithm>
#include <cmath>
#include <numbers>

#include "headimit/error.hpp"
#include "headimit/landmarks.hpp"
#include "headimit/vec3.hpp"

namespace headimit {

inline constexpr double kLengthEpsilon = 1e-6;
inline constexpr double kAngleEpsilon = 1e-7;  // radians
inline constexpr double kUnitTolerance = 1e-6;
inline constexpr double kYawLimitDeg = 119.5;
inline constexpr double kGimbalBandDeg = 0.1;

constexpr double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

struct BaselineConfig {
  Vec3 yaw_baseline{1.0, 0.0, 0.0};
  Vec3 pitch_baseline{0.0, 1.0, 0.0};
};

struct RotationResult {
  double angle = 0.0;  // radians, [0, pi]
  Vec3 axis{0.0, 0.0, 1.0};
  Vec3 rotvec{};
};

struct EulerAngles {
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
  double roll_deg = 0.0;
};

struct HeadPose {
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
};

// Mirrored capture sources flip the sign of yaw.
enum class YawSign { kSubjectLeftPositive, kSubjectRightPositive };

namespace detail {

inline Vec3 checked_direction(const Vec3& v, const char* what) {
  if (!is_finite(v)) throw DegenerateLandmarks(std::string(what) + " is not finite");
  const double n = norm(v);
  if (n < kLengthEpsilon) throw DegenerateLandmarks(std::string(what) + " has near-zero length");
  return v / n;
}

inline void require_unit(const Vec3& v, const char* name) {
  const double n = norm(v);
  if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitTolerance)
    throw NotUnit(std::string(name) + " is not a unit vector (norm " + std::to_string(n) + ")");
}

}  // namespace detail

inline Vec3 eye_vector(const PoseLandmarks& pose) { return pose.left_eye - pose.right_eye; }

inline Vec3 eye_midpoint(const PoseLandmarks& pose) {
  return (pose.left_eye + pose.right_eye) * 0.5;
}

inline Vec3 eye_to_nose_vector(const PoseLandmarks& pose) { return pose.nose - eye_midpoint(pose); }

inline BaselineConfig calibrate_baseline(const LandmarkFrame& frame) {
  return {detail::checked_direction(eye_vector(frame.pose), "eye vector"),
          detail::checked_direction(eye_to_nose_vector(frame.pose), "eye-to-nose vector")};
}

inline RotationResult rotation_from_vectors(const Vec3& from, const Vec3& to) {
  detail::require_unit(from, "from");
  detail::require_unit(to, "to");

  const double angle = std::acos(std::clamp(dot(from, to), -1.0, 1.0));
  if (angle < kAngleEpsilon) return {};

  const Vec3 c = cross(from, to);
  const double cn = norm(c);
  Vec3 axis;
  if (cn < kLengthEpsilon && angle > std::numbers::pi / 2) {
    // Antiparallel: any perpendicular axis works; pick a deterministic one.
    Vec3 perp = cross(from, Vec3{0.0, 0.0, 1.0});
    if (norm(perp) < kLengthEpsilon) perp = cross(from, Vec3{0.0, 1.0, 0.0});
    axis = normalized(perp);
  } else {
    axis = c / cn;
  }
  return {angle, axis, axis * angle};
}

// R = I + sin(theta) K + (1 - cos(theta)) K^2 with K the cross-product matrix
// of the axis.
inline Rotation rodrigues(const Vec3& axis, double angle) noexcept {
  const double s = std::sin(angle);
  const double c1 = 1.0 - std::cos(angle);
  const double kx = axis.x, ky = axis.y, kz = axis.z;
  const double k[3][3] = {{0, -kz, ky}, {kz, 0, -kx}, {-ky, kx, 0}};
  Rotation r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double k2 = 0.0;
      for (int n = 0; n < 3; ++n) k2 += k[i][n] * k[n][j];
      r.m[i][j] = (i == j ? 1.0 : 0.0) + s * k[i][j] + c1 * k2;
    }
  return r;
}

// Decomposes R = R_up(yaw) * R_x(pitch) * R_z(roll) where R_up(a) = R_y(-a).
inline EulerAngles matrix_to_euler(const Rotation& rot) noexcept {
  const auto& m = rot.m;
  const double pitch = std::asin(std::clamp(-m[1][2], -1.0, 1.0));
  double about_y = 0.0;
  double roll = 0.0;
  if (std::abs(rad_to_deg(pitch)) > 90.0 - kGimbalBandDeg) {
    about_y = std::atan2(-m[2][0], m[0][0]);
  } else {
    about_y = std::atan2(m[0][2], m[2][2]);
    roll = std::atan2(m[1][0], m[1][1]);
  }
  EulerAngles e{rad_to_deg(-about_y), rad_to_deg(pitch), rad_to_deg(roll)};
  // Normalize -0.0 so serialized output is stable.
  if (e.yaw_deg == 0.0) e.yaw_deg = 0.0;
  if (e.roll_deg == 0.0) e.roll_deg = 0.0;
  if (e.pitch_deg == 0.0) e.pitch_deg = 0.0;
  return e;
}

inline EulerAngles rotvec_to_euler(const RotationResult& r) noexcept {
  if (r.angle < kAngleEpsilon) return {};
  return matrix_to_euler(rodrigues(r.axis, r.angle));
}

inline double clamp_yaw(double yaw_deg) noexcept {
  return std::clamp(yaw_deg, -kYawLimitDeg, kYawLimitDeg);
}

inline double estimate_yaw(const LandmarkFrame& frame, const BaselineConfig& baseline,
                           YawSign sign = YawSign::kSubjectLeftPositive) {
  const Vec3 v = detail::checked_direction(eye_vector(frame.pose), "eye vector");
  double yaw = rotvec_to_euler(rotation_from_vectors(baseline.yaw_baseline, v)).yaw_deg;
  if (sign == YawSign::kSubjectRightPositive) yaw = -yaw;
  return clamp_yaw(yaw);
}

// Unclamped; the joint-limit model bounds it.
inline double estimate_pitch_raw(const LandmarkFrame& frame, const BaselineConfig& baseline) {
  const Vec3 v = detail::checked_direction(eye_to_nose_vector(frame.pose), "eye-to-nose vector");
  return rotvec_to_euler(rotation_from_vectors(baseline.pitch_baseline, v)).pitch_deg;
}

}  // namespace headimit
