// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace jointangles {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class Side { left, right };

/// +1 for right-side (and midline) joints, -1 for left-side joints. Left
/// frames are the mirror image of right frames.
constexpr int handedness(Side side) noexcept { return side == Side::right ? 1 : -1; }

/// Canonical joint roles. Keypoint formats map a subset of these onto their
/// own joint indices; angle code only ever talks in roles.
enum class Role : std::uint8_t {
  pelvis,
  spine_mid,
  spine_top,  // shoulder centre, base of the neck
  neck_base,  // optional cervical keypoint between spine_top and head
  head,
  ear_left,
  ear_right,
  shoulder_left,
  shoulder_right,
  elbow_left,
  elbow_right,
  wrist_left,
  wrist_right,
  hand_left,
  hand_right,
  thumb_left,
  thumb_right,
  hip_left,
  hip_right,
  knee_left,
  knee_right,
  ankle_left,
  ankle_right,
  foot_base_left,
  foot_base_right,
  toes_left,
  toes_right,
  small_toe_left,
  small_toe_right,
  count_,
};

inline constexpr std::size_t kRoleCount = static_cast<std::size_t>(Role::count_);

std::string_view role_name(Role role) noexcept;
std::optional<Role> role_from_name(std::string_view name) noexcept;
std::span<const Role> all_roles() noexcept;

/// Roles of one limb side, so left/right code paths share an implementation.
struct ArmRoles {
  Role shoulder, opposite_shoulder, elbow, wrist, hand, thumb;
};
struct LegRoles {
  Role hip, opposite_hip, knee, ankle, foot_base, toes, small_toe;
};
ArmRoles arm_roles(Side side) noexcept;
LegRoles leg_roles(Side side) noexcept;

constexpr std::size_t index(Role role) noexcept { return static_cast<std::size_t>(role); }

struct Bone {
  std::size_t parent;
  std::size_t child;
  friend bool operator==(const Bone&, const Bone&) = default;
};

/// Where a canonical role comes from in a keypoint format: one joint, or the
/// midpoint of two joints (e.g. the COCO pelvis).
struct RoleSource {
  std::size_t first;
  std::optional<std::size_t> second;

  bool is_midpoint() const noexcept { return second.has_value(); }
};

/// Names, bone tree and canonical role map of a keypoint format.
class KeypointSetDescriptor {
 public:
  /// Validates the invariants (tree of J-1 bones rooted at the pelvis source,
  /// injective direct role map, pelvis mapped) and throws StructuralError.
  static std::shared_ptr<const KeypointSetDescriptor> create(
      std::string id, std::vector<std::string> joint_names, std::vector<Bone> bones,
      std::vector<std::pair<Role, RoleSource>> roles);

  const std::string& id() const noexcept { return id_; }
  const std::vector<std::string>& joint_names() const noexcept { return joint_names_; }
  std::size_t joint_count() const noexcept { return joint_names_.size(); }
  const std::vector<Bone>& bones() const noexcept { return bones_; }
  std::size_t root() const noexcept { return root_; }

  const std::optional<RoleSource>& source(Role role) const noexcept {
    return sources_[index(role)];
  }
  bool has_role(Role role) const noexcept { return sources_[index(role)].has_value(); }

  std::optional<std::size_t> joint_index(std::string_view name) const noexcept;
  /// Parent joint of `joint`, nullopt for the root.
  std::optional<std::size_t> parent(std::size_t joint) const noexcept { return parents_[joint]; }
  /// Joints that are the direct source of some role; derived (midpoint) roles
  /// don't count.
  bool is_role_joint(std::size_t joint) const noexcept;
  /// Display name of a role endpoint: the joint name for direct sources, the
  /// role name for midpoints.
  std::string endpoint_name(Role role) const;
  std::string bone_key(const Bone& bone) const;

 private:
  KeypointSetDescriptor() = default;

  std::string id_;
  std::vector<std::string> joint_names_;
  std::vector<Bone> bones_;
  std::vector<std::optional<std::size_t>> parents_;
  std::array<std::optional<RoleSource>, kRoleCount> sources_{};
  std::size_t root_ = 0;
};

using DescriptorPtr = std::shared_ptr<const KeypointSetDescriptor>;

/// Built-in formats: "kinect25", "openpose25", "coco17". Frozen after first
/// use. Throws UnsupportedFormatError for unknown ids ("custom" descriptors
/// travel with their file instead).
DescriptorPtr find_descriptor(std::string_view id);
std::vector<std::string> registered_formats();

/// BFS check used by descriptor validation and by `validate`.
bool is_tree(std::size_t joint_count, std::span<const Bone> bones);

/// One frame of keypoints. Invalid entries keep a NaN position.
class Pose {
 public:
  Pose() = default;
  explicit Pose(std::size_t joint_count);
  /// Non-finite positions are marked invalid regardless of `validity`.
  Pose(std::vector<Vec3> positions, std::vector<bool> validity);

  std::size_t joint_count() const noexcept { return positions_.size(); }
  const Vec3& position(std::size_t joint) const { return positions_[joint]; }
  bool valid(std::size_t joint) const { return validity_[joint]; }
  std::optional<Vec3> get(std::size_t joint) const;
  void set(std::size_t joint, const Vec3& position);
  void invalidate(std::size_t joint);
  const std::vector<Vec3>& positions() const noexcept { return positions_; }
  const std::vector<bool>& validity() const noexcept { return validity_; }
  std::size_t valid_count() const noexcept;

  friend bool operator==(const Pose&, const Pose&);

 private:
  std::vector<Vec3> positions_;
  std::vector<bool> validity_;
};

/// Frames of one recording. All frames carry descriptor->joint_count() joints.
struct MotionSequence {
  DescriptorPtr descriptor;
  double fps = 30.0;
  std::vector<Pose> frames;

  /// Throws StructuralError on joint-count mismatch, ArgumentError on fps <= 0.
  void check() const;
};

/// Per-segment lengths in input units, keyed "<parent>-<child>".
class BoneLengths {
 public:
  void set(std::string key, double length);
  void set_missing(std::string key);

  /// nullopt when the key is unknown or flagged missing.
  std::optional<double> get(std::string_view key) const;
  bool missing(std::string_view key) const;
  /// All keys in insertion-independent (sorted) order, missing ones included.
  std::vector<std::string> keys() const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  struct Entry {
    double length = 0.0;
    bool missing = true;
  };
  std::map<std::string, Entry, std::less<>> entries_;
};

/// Global rigid motion plus optional uniform scale: p -> scale * R p + t.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  double scale = 1.0;

  /// Throws InvalidTransformError unless R^T R = I and det R = +1 within 1e-12
  /// and scale is positive and finite.
  void check() const;
  Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }
};

/// Role -> position view of a pose. Midpoint roles are filled only when both
/// sources are valid.
using CanonicalPose = std::array<std::optional<Vec3>, kRoleCount>;

CanonicalPose to_canonical(const Pose& pose, const KeypointSetDescriptor& descriptor);

/// One edge of the canonical kinematic tree as realised by a descriptor:
/// parent role, child role, and the length key (which coincides with the
/// descriptor bone key whenever the format has that bone directly).
struct Segment {
  Role parent;
  Role child;
  std::string key;
};

/// Canonical segments available in `descriptor`, parents before children.
/// Parent fallbacks: spine_top hangs off spine_mid or the pelvis, head off
/// neck_base or spine_top, toes off foot_base or the ankle.
std::vector<Segment> canonical_segments(const KeypointSetDescriptor& descriptor);

}  // namespace jointangles
