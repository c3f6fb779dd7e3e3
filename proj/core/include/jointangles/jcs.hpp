// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "jointangles/skeleton.hpp"

namespace jointangles {

enum class Axis { x, y, z };

/// Relative degeneracy threshold for frame construction.
inline constexpr double kDegenerateEpsilon = 1e-8;

/// Local joint coordinate system: x forward, y up (along the static bone),
/// z lateral. Left-side frames are mirrored (handedness -1) so z points away
/// from the midline on both sides.
struct Frame3 {
  Vec3 x = Vec3::UnitX();
  Vec3 y = Vec3::UnitY();
  Vec3 z = Vec3::UnitZ();
  Vec3 origin = Vec3::Zero();
  int handedness = 1;

  const Vec3& axis(Axis a) const noexcept { return a == Axis::x ? x : (a == Axis::y ? y : z); }

  /// Proper rotation [x, y, handedness*z]. For a mirrored frame this is the
  /// right-handed frame sharing its forward and up axes.
  Mat3 rotation() const;
  /// Coordinates of a world-space direction in rotation()'s basis.
  Vec3 to_local(const Vec3& direction) const { return rotation().transpose() * direction; }
  /// Coordinates against the stored (possibly mirrored) axes, lateral positive.
  Vec3 to_anatomical(const Vec3& direction) const {
    return {direction.dot(x), direction.dot(y), direction.dot(z)};
  }

  /// Frame with the same handedness built from a proper rotation.
  static Frame3 from_rotation(const Mat3& rotation, int handedness, const Vec3& origin);
};

/// axis[primary_label] = normalize(primary); axis[cross_label] =
/// handedness * normalize(primary x secondary); the remaining axis completes
/// the triad (cross product of the first two, ordered so that det = handedness).
/// Throws DegenerateFrameError when either input is shorter than epsilon or
/// |primary x secondary| <= epsilon |primary| |secondary|.
Frame3 build_frame(Axis primary_label, const Vec3& primary, const Vec3& secondary,
                   Axis cross_label, int handedness = 1, const Vec3& origin = Vec3::Zero());

enum class JcsRole : std::uint8_t {
  hip_left,
  hip_right,
  shoulder_left,
  shoulder_right,
  upper_proximal,
  lower_proximal,
  elbow_left,
  elbow_right,
  knee_left,
  knee_right,
  wrist_left,
  wrist_right,
  ankle_left,
  ankle_right,
  neck,
  count_,
};

inline constexpr std::size_t kJcsRoleCount = static_cast<std::size_t>(JcsRole::count_);

std::string_view jcs_role_name(JcsRole role) noexcept;

class JcsSet {
 public:
  const std::optional<Frame3>& operator[](JcsRole role) const noexcept {
    return frames_[static_cast<std::size_t>(role)];
  }
  std::optional<Frame3>& operator[](JcsRole role) noexcept {
    return frames_[static_cast<std::size_t>(role)];
  }
  bool available(JcsRole role) const noexcept { return (*this)[role].has_value(); }

 private:
  std::array<std::optional<Frame3>, kJcsRoleCount> frames_{};
};

JcsRole hip_jcs(Side side) noexcept;
JcsRole shoulder_jcs(Side side) noexcept;
JcsRole elbow_jcs(Side side) noexcept;
JcsRole knee_jcs(Side side) noexcept;
JcsRole wrist_jcs(Side side) noexcept;
JcsRole ankle_jcs(Side side) noexcept;

/// Spine sections used by the hip, shoulder and neck frames. Without a
/// mid-spine keypoint both are the single pelvis -> spine_top segment.
struct SpineSections {
  Vec3 bottom;  // pelvis -> next keypoint up the spine
  Vec3 top;     // next keypoint down the spine -> spine_top
};
std::optional<SpineSections> spine_sections(const CanonicalPose& pose);

/// Whether the format maps every keypoint the frame needs.
bool jcs_supported(const KeypointSetDescriptor& descriptor, JcsRole role) noexcept;

/// Builds every joint coordinate system the pose supports. Joints whose
/// keypoints are missing or whose geometry is degenerate are left out.
///
///  hip      z: opposite hip -> hip          x: z x (spine bottom, pointing down)
///  shoulder z: opposite shoulder -> shoulder x: z x (spine top, pointing down)
///  elbow    y: elbow -> shoulder            z: y x (wrist -> elbow)
///  knee     y: knee -> hip                  z: y x (knee -> ankle)
///  wrist    y: wrist -> elbow               x: y x (wrist -> thumb)
///  ankle    y: ankle -> knee                z: y x (toes -> foot base)
///  neck     y: spine top section            x: y x (left ear -> right ear)
///
/// The foot base falls back to the ankle when the format has no heel. The
/// proximal frames are the right hip and right shoulder frames moved to the
/// pelvis and the shoulder centre.
JcsSet compute_jcs(const CanonicalPose& pose);

}  // namespace jointangles
