// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "jointangles/jcs.hpp"
#include "jointangles/skeleton.hpp"

namespace jointangles {

/// Joints that carry angle channels, in layout order.
enum class Joint : std::uint8_t {
  spine,
  neck,
  shoulder_right,
  shoulder_left,
  elbow_right,
  elbow_left,
  wrist_right,
  wrist_left,
  hip_right,
  hip_left,
  knee_right,
  knee_left,
  ankle_right,
  ankle_left,
  count_,
};

/// abduction doubles as lateral flexion for the spine, neck and wrists.
enum class Channel : std::uint8_t { flexion, abduction, axial, count_ };

inline constexpr std::size_t kJointCount = static_cast<std::size_t>(Joint::count_);
inline constexpr std::size_t kChannelCount = static_cast<std::size_t>(Channel::count_);

/// "right_shoulder", "spine", ... and "flexion" / "abduction" / "axial".
std::string_view joint_name(Joint joint) noexcept;
std::string_view channel_name(Channel channel) noexcept;
std::optional<Joint> joint_from_name(std::string_view name) noexcept;
std::optional<Channel> channel_from_name(std::string_view name) noexcept;

struct ChannelId {
  Joint joint;
  Channel channel;
  friend bool operator==(const ChannelId&, const ChannelId&) = default;
};
using ChannelLayout = std::vector<ChannelId>;

/// Channels a format can ever produce, in (joint, channel) order. Depends on
/// the role map only, so vectors from one format always line up.
ChannelLayout channel_layout(const KeypointSetDescriptor& descriptor);

/// Hinge joints report the interior angle (straight = pi). The anatomical
/// form (straight = 0) is pi minus that value.
bool is_hinge(Joint joint) noexcept;
/// Channels whose value lives on the circle (-pi, pi].
bool is_circular(ChannelId id) noexcept;
/// Closed value range of a channel; circular channels report [-pi, pi].
std::pair<double, double> channel_range(ChannelId id) noexcept;

inline constexpr double kZenithTolerance = 1e-7;
inline constexpr double kUnitTolerance = 1e-6;

struct SphericalAngles {
  double flexion = 0.0;
  double abduction = 0.0;  // lateral flexion for spherical_x
};

/// Zenith +z. `bone` is a unit vector in right-handed local coordinates.
/// flexion in (-pi, pi] from -y toward +x; abduction in [-pi/2, pi/2],
/// positive toward handedness * z. At the zenith flexion is 0.
SphericalAngles spherical_z(const Vec3& bone, int handedness);
/// Inverse of spherical_z: (cos a sin f, -cos a cos f, h sin a).
Vec3 spherical_z_direction(double flexion, double abduction, int handedness);

/// Zenith +x. flexion in [-pi/2, pi/2] toward +x; lateral in (-pi, pi] from
/// +y toward handedness * z. At the zenith lateral is 0.
SphericalAngles spherical_x(const Vec3& bone, int handedness);
/// Inverse of spherical_x: (sin f, cos f cos l, h cos f sin l).
Vec3 spherical_x_direction(double flexion, double lateral, int handedness);

/// Interior angle in [0, pi] between the moving bone and the proximal y axis.
/// nullopt for a zero-length bone.
std::optional<double> hinge_flexion(const Vec3& moving_bone, const Vec3& proximal_y);
std::optional<double> hinge_flexion(const Vec3& moving_bone, const Frame3& frame);

/// Interior angle between two vectors via atan2; nullopt if either is zero.
std::optional<double> interior_angle(const Vec3& u, const Vec3& v);

/// Local rotation carrying the rest bone (-y) onto the spherical_z direction:
/// Rz(flexion) * Rx(-handedness * abduction).
Mat3 alignment_rotation(double flexion, double abduction, int handedness);

/// Angle of the rotation about y contained in R (exact when R is a pure
/// y rotation).
double twist_y(const Mat3& rotation);

/// Signed twist about the bone axis between the proximal frame, aligned with
/// alignment_rotation(flexion, abduction), and the distal frame. Throws
/// InternalConsistencyError if the aligned y misses distal.y by more than 1e-3.
double axial_rotation(const Frame3& proximal, double flexion, double abduction, const Frame3& distal);

struct AnkleAngles {
  std::optional<double> flexion;
  std::optional<double> abduction;
};
/// flexion: interior angle between ankle -> knee and the foot vector.
/// abduction: angle of the toe line (big toe -> small toe) from frame.z,
/// positive toward -x.
AnkleAngles ankle_angles(const Vec3& lower_leg, const Vec3& foot, const Frame3& frame,
                         const std::optional<Vec3>& toe_line);

struct SpineAngles {
  std::optional<double> flexion;
  std::optional<double> lateral;
  std::optional<double> axial;
};
/// Decomposes lower^T upper = Ry(axial) Rz(-flexion) Rx(lateral). Without a
/// mid-spine keypoint flexion is not reported.
SpineAngles spine_angles(const Frame3& lower, const Frame3& upper, bool mid_spine_present);
/// Ry(axial) Rz(-flexion) Rx(lateral).
Mat3 spine_rotation(double flexion, double lateral, double axial);

struct RootPose {
  Vec3 position = Vec3::Zero();
  Mat3 orientation = Mat3::Identity();
};

/// Channel values of one frame. Unavailable channels hold no value.
class JointAngles {
 public:
  std::optional<double> get(Joint joint, Channel channel) const noexcept {
    return values_[slot(joint, channel)];
  }
  std::optional<double> get(ChannelId id) const noexcept { return get(id.joint, id.channel); }
  void set(Joint joint, Channel channel, std::optional<double> value) noexcept {
    values_[slot(joint, channel)] = value;
  }
  void set(ChannelId id, std::optional<double> value) noexcept { set(id.joint, id.channel, value); }

  std::optional<RootPose> root;

 private:
  static std::size_t slot(Joint joint, Channel channel) noexcept {
    return static_cast<std::size_t>(joint) * kChannelCount + static_cast<std::size_t>(channel);
  }
  std::array<std::optional<double>, kJointCount * kChannelCount> values_{};
};

/// Every channel the pose and its frames support, plus the root pose.
JointAngles pose_to_angles(const CanonicalPose& pose, const JcsSet& jcs);
JointAngles pose_to_angles(const CanonicalPose& pose);

/// Per-frame angles with the format's layout and the sequence's bone lengths.
struct AngleSequence {
  DescriptorPtr descriptor;
  double fps = 30.0;
  ChannelLayout layout;
  std::vector<JointAngles> frames;
  BoneLengths bone_lengths;

  std::vector<std::optional<double>> row(std::size_t frame) const;
};

/// Converts every frame (in parallel when threads > 1). Channels outside the
/// format's layout are dropped.
AngleSequence sequence_to_angles(const MotionSequence& seq, std::size_t threads = 1);

std::vector<std::optional<double>> vectorize(const JointAngles& angles, const ChannelLayout& layout);

/// Two bones of the descriptor tree, each oriented away from `joint`.
struct BonePair {
  std::size_t joint;
  std::size_t first;   // other endpoint of the first bone
  std::size_t second;  // other endpoint of the second bone
};

/// Every pair of descriptor bones meeting at a joint.
std::vector<BonePair> default_bone_pairs(const KeypointSetDescriptor& descriptor);

/// arccos of the clamped normalised dot product; nullopt for a zero vector.
std::optional<double> dot_product_angle(const Vec3& u, const Vec3& v);

/// dot_product_angle per pair; pairs with an invalid keypoint are nullopt.
std::vector<std::optional<double>> dot_product_baseline(const Pose& pose,
                                                        const std::vector<BonePair>& pairs);

}  // namespace jointangles
