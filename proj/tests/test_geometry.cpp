#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "headimit/geometry.hpp"
#include "headimit/synth.hpp"
#include "oracles.hpp"

using namespace headimit;

namespace {

Vec3 to_vec(const oracle::V3& v) { return {v[0], v[1], v[2]}; }
oracle::V3 to_arr(const Vec3& v) { return {v.x, v.y, v.z}; }

LandmarkFrame face(Vec3 left, Vec3 right, Vec3 nose) {
  LandmarkFrame f;
  f.pose = {left, right, nose};
  return f;
}

// Neutral faces: eyes level (same y), nose centred in x below the eyes; z free.
LandmarkFrame random_neutral(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double cx = 0.5 + 0.1 * u(rng), cy = 0.4 + 0.1 * u(rng), cz = 0.05 * u(rng);
  const double half = 0.05 + 0.04 * (u(rng) + 1.0);
  const double eye_dz = 0.02 * u(rng);
  const double nose_dy = 0.05 + 0.05 * (u(rng) + 1.0);
  const double nose_dz = -0.03 + 0.02 * u(rng);
  return face({cx + half, cy, cz + eye_dz}, {cx - half, cy, cz - eye_dz},
              {cx, cy + nose_dy, cz + nose_dz});
}

LandmarkFrame rotated(const LandmarkFrame& f, const oracle::M3& m, const Vec3& pivot) {
  auto rot = [&](const Vec3& p) { return pivot + to_vec(oracle::apply(m, to_arr(p - pivot))); };
  return face(rot(f.pose.left_eye), rot(f.pose.right_eye), rot(f.pose.nose));
}

}  // namespace

TEST(CalibrateBaseline, AxisAlignedNeutralFace) {
  const auto b = calibrate_baseline(face({0.6, 0.4, 0}, {0.4, 0.4, 0}, {0.5, 0.5, 0}));
  EXPECT_NEAR(b.yaw_baseline.x, 1.0, 1e-12);
  EXPECT_NEAR(b.yaw_baseline.y, 0.0, 1e-12);
  EXPECT_NEAR(b.pitch_baseline.y, 1.0, 1e-12);
  EXPECT_NEAR(b.pitch_baseline.x, 0.0, 1e-12);
}

TEST(CalibrateBaseline, CoincidentEyesAreDegenerate) {
  EXPECT_THROW(calibrate_baseline(face({0.5, 0.4, 0}, {0.5, 0.4, 0}, {0.5, 0.5, 0})),
               DegenerateLandmarks);
}

TEST(CalibrateBaseline, MatchesHandNormalizationWithDepth) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const LandmarkFrame f = random_neutral(rng);
    const auto b = calibrate_baseline(f);
    const oracle::V3 l = to_arr(f.pose.left_eye), r = to_arr(f.pose.right_eye),
                     n = to_arr(f.pose.nose);
    const oracle::V3 mid{(l[0] + r[0]) / 2, (l[1] + r[1]) / 2, (l[2] + r[2]) / 2};
    const auto ey = oracle::unit(oracle::sub(l, r));
    const auto ep = oracle::unit(oracle::sub(n, mid));
    EXPECT_NEAR(b.yaw_baseline.x, ey[0], 1e-12);
    EXPECT_NEAR(b.yaw_baseline.y, ey[1], 1e-12);
    EXPECT_NEAR(b.yaw_baseline.z, ey[2], 1e-12);
    EXPECT_NEAR(b.pitch_baseline.x, ep[0], 1e-12);
    EXPECT_NEAR(b.pitch_baseline.y, ep[1], 1e-12);
    EXPECT_NEAR(b.pitch_baseline.z, ep[2], 1e-12);
    EXPECT_NEAR(norm(b.yaw_baseline), 1.0, 1e-9);
    EXPECT_NEAR(norm(b.pitch_baseline), 1.0, 1e-9);
  }
}

TEST(RotationFromVectors, Identity) {
  const auto r = rotation_from_vectors({1, 0, 0}, {1, 0, 0});
  EXPECT_EQ(r.angle, 0.0);
  EXPECT_EQ(r.rotvec, (Vec3{0, 0, 0}));
  EXPECT_EQ(r.axis, (Vec3{0, 0, 1}));
}

TEST(RotationFromVectors, OrthogonalPairFollowsRightHandRule) {
  const auto r = rotation_from_vectors({1, 0, 0}, {0, 1, 0});
  EXPECT_NEAR(r.angle, std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(r.axis.z, 1.0, 1e-12);
  EXPECT_NEAR(norm(r.rotvec), r.angle, 1e-9);
}

TEST(RotationFromVectors, ThirtyDegreeTurnRoundTripsToYaw) {
  const Vec3 to = to_vec(oracle::apply(oracle::turn_up(30.0), {1, 0, 0}));
  const auto r = rotation_from_vectors({1, 0, 0}, to);
  EXPECT_NEAR(r.angle, deg_to_rad(30.0), 1e-12);
  EXPECT_NEAR(std::abs(r.axis.y), 1.0, 1e-12);
  const auto e = rotvec_to_euler(r);
  EXPECT_NEAR(e.yaw_deg, 30.0, 1e-9);
  EXPECT_NEAR(e.pitch_deg, 0.0, 1e-9);
}

TEST(RotationFromVectors, AntiparallelUsesDeterministicPerpendicular) {
  const auto r = rotation_from_vectors({1, 0, 0}, {-1, 0, 0});
  EXPECT_NEAR(r.angle, std::numbers::pi, 1e-12);
  EXPECT_NEAR(dot(r.axis, Vec3{1, 0, 0}), 0.0, 1e-12);
  EXPECT_NEAR(norm(r.axis), 1.0, 1e-12);
  const auto again = rotation_from_vectors({1, 0, 0}, {-1, 0, 0});
  EXPECT_EQ(r.axis, again.axis);
  // (0,0,1) is parallel to `from`; falls back to the cross with (0,1,0).
  const auto z = rotation_from_vectors({0, 0, 1}, {0, 0, -1});
  EXPECT_NEAR(norm(z.axis), 1.0, 1e-12);
  EXPECT_NEAR(z.axis.z, 0.0, 1e-12);
}

TEST(RotationFromVectors, RejectsNonUnitInput) {
  EXPECT_THROW(rotation_from_vectors({2, 0, 0}, {1, 0, 0}), NotUnit);
  EXPECT_THROW(rotation_from_vectors({1, 0, 0}, {0, 0.5, 0}), NotUnit);
}

TEST(RotationFromVectors, AngleIsSymmetricAndZeroOnSelf) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int i = 0; i < 500; ++i) {
    const Vec3 u = normalized({g(rng), g(rng), g(rng)});
    const Vec3 v = normalized({g(rng), g(rng), g(rng)});
    EXPECT_EQ(rotation_from_vectors(u, u).angle, 0.0);
    EXPECT_NEAR(rotation_from_vectors(u, v).angle, rotation_from_vectors(v, u).angle, 1e-15);
    const auto r = rotation_from_vectors(u, v);
    EXPECT_NEAR(norm(r.rotvec), r.angle, 1e-9);
    // The rotation actually carries u onto v.
    const Vec3 w = rodrigues(r.axis, r.angle).apply(u);
    EXPECT_NEAR(norm(w - v), 0.0, 1e-9);
  }
}

TEST(RotvecToEuler, ZeroIsIdentity) {
  const auto e = rotvec_to_euler({});
  EXPECT_EQ(e.yaw_deg, 0.0);
  EXPECT_EQ(e.pitch_deg, 0.0);
  EXPECT_EQ(e.roll_deg, 0.0);
}

TEST(RotvecToEuler, FortyDegreesAboutVertical) {
  const auto rv = oracle::matrix_to_rotvec(oracle::turn_up(40.0));
  const Vec3 v = to_vec(rv);
  const auto e = rotvec_to_euler({norm(v), normalized(v), v});
  EXPECT_NEAR(e.yaw_deg, 40.0, 1e-9);
  EXPECT_NEAR(e.pitch_deg, 0.0, 1e-9);
  EXPECT_NEAR(e.roll_deg, 0.0, 1e-9);
}

TEST(RotvecToEuler, ComposedYawThenPitch) {
  const auto m = oracle::mul(oracle::turn_up(20.0), oracle::tilt_x(10.0));
  const Vec3 v = to_vec(oracle::matrix_to_rotvec(m));
  const auto e = rotvec_to_euler({norm(v), normalized(v), v});
  EXPECT_NEAR(e.yaw_deg, 20.0, 1e-6);
  EXPECT_NEAR(e.pitch_deg, 10.0, 1e-6);
  EXPECT_NEAR(e.roll_deg, 0.0, 1e-6);
}

TEST(RotvecToEuler, RoundTripsOutsideGimbalRegion) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> yaw(-170.0, 170.0), pitch(-80.0, 80.0);
  for (int i = 0; i < 2000; ++i) {
    const double y = yaw(rng), p = pitch(rng);
    const auto m = oracle::mul(oracle::turn_up(y), oracle::tilt_x(p));
    const Vec3 v = to_vec(oracle::matrix_to_rotvec(m));
    if (norm(v) < 1e-9 || norm(v) > std::numbers::pi - 1e-6) continue;
    const auto e = rotvec_to_euler({norm(v), normalized(v), v});
    EXPECT_NEAR(e.yaw_deg, y, 1e-6);
    EXPECT_NEAR(e.pitch_deg, p, 1e-6);
  }
}

TEST(RotvecToEuler, GimbalBandZeroesRoll) {
  const auto m = oracle::tilt_x(89.95);
  const Vec3 v = to_vec(oracle::matrix_to_rotvec(m));
  const auto e = rotvec_to_euler({norm(v), normalized(v), v});
  EXPECT_EQ(e.roll_deg, 0.0);
  EXPECT_NEAR(e.pitch_deg, 89.95, 1e-6);
}

TEST(EstimateYaw, NeutralIsZero) {
  const auto f = synth::neutral_frame();
  EXPECT_NEAR(estimate_yaw(f, calibrate_baseline(f)), 0.0, 1e-9);
}

TEST(EstimateYaw, ThirtyFiveDegreeTurn) {
  const auto f = synth::neutral_frame();
  const auto b = calibrate_baseline(f);
  const auto turned = rotated(f, oracle::turn_up(35.0), {0.5, 0.45, 0.1});
  EXPECT_NEAR(estimate_yaw(turned, b), 35.0, 0.1);
  EXPECT_NEAR(estimate_yaw(turned, b, YawSign::kSubjectRightPositive), -35.0, 0.1);
}

TEST(EstimateYaw, ClampsBeyondHardwareRange) {
  const auto f = synth::neutral_frame();
  const auto b = calibrate_baseline(f);
  EXPECT_DOUBLE_EQ(estimate_yaw(rotated(f, oracle::turn_up(130.0), {}), b), 119.5);
  EXPECT_DOUBLE_EQ(estimate_yaw(rotated(f, oracle::turn_up(-130.0), {}), b), -119.5);
}

TEST(EstimateYaw, DegenerateEyes) {
  const auto b = BaselineConfig{};
  EXPECT_THROW(estimate_yaw(face({0.5, 0.4, 0}, {0.5, 0.4, 0}, {0.5, 0.5, 0}), b),
               DegenerateLandmarks);
}

TEST(EstimatePitch, NeutralAndFifteenDegrees) {
  const auto f = synth::neutral_frame();
  const auto b = calibrate_baseline(f);
  EXPECT_NEAR(estimate_pitch_raw(f, b), 0.0, 1e-9);
  EXPECT_NEAR(estimate_pitch_raw(rotated(f, oracle::tilt_x(15.0), {0.5, 0.45, 0.1}), b), 15.0, 0.1);
}

TEST(EstimatePitch, NoseOnEyeMidpointIsDegenerate) {
  EXPECT_THROW(estimate_pitch_raw(face({0.6, 0.4, 0}, {0.4, 0.4, 0}, {0.5, 0.4, 0}), {}),
               DegenerateLandmarks);
}

TEST(GeometryProperties, RecoversSingleAxisRotations) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> yaw(-119.0, 119.0), pitch(-35.0, 25.0);
  std::uniform_real_distribution<double> piv(-0.2, 0.2);
  for (int i = 0; i < 500; ++i) {
    const LandmarkFrame f = random_neutral(rng);
    const auto b = calibrate_baseline(f);
    const Vec3 pivot{0.5 + piv(rng), 0.45 + piv(rng), piv(rng)};
    const double y = yaw(rng), p = pitch(rng);
    EXPECT_NEAR(estimate_yaw(rotated(f, oracle::turn_up(y), pivot), b), y, 0.1);
    EXPECT_NEAR(estimate_pitch_raw(rotated(f, oracle::tilt_x(p), pivot), b), p, 0.1);
  }
}

TEST(GeometryProperties, YawAlwaysWithinHardwareRange) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 2000; ++i) {
    const auto f = face({u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)});
    const Vec3 dir = normalized({u(rng), u(rng), u(rng)});
    const double y = estimate_yaw(f, {dir, {0, 1, 0}});
    EXPECT_LE(std::abs(y), kYawLimitDeg);
  }
}

TEST(GeometryProperties, UniformScalingLeavesAnglesUnchanged) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> yaw(-60.0, 60.0), scale(0.1, 10.0);
  for (int i = 0; i < 200; ++i) {
    const LandmarkFrame f = random_neutral(rng);
    const auto b = calibrate_baseline(f);
    const auto g = rotated(f, oracle::mul(oracle::turn_up(yaw(rng)), oracle::tilt_x(10.0)), {});
    const double s = scale(rng);
    const auto h = face(g.pose.left_eye * s, g.pose.right_eye * s, g.pose.nose * s);
    EXPECT_NEAR(estimate_yaw(g, b), estimate_yaw(h, b), 1e-9);
    EXPECT_NEAR(estimate_pitch_raw(g, b), estimate_pitch_raw(h, b), 1e-9);
  }
}
