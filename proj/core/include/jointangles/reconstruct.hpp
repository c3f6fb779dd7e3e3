// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "jointangles/angles.hpp"
#include "jointangles/skeleton.hpp"

namespace jointangles {

/// How a role's keypoint comes back out of the angle vector.
enum class Placement {
  exact,           // fully determined by channels and lengths
  representative,  // only partly determined; placed on a canonical axis
  unavailable,     // not determined by any channel
};

std::string_view placement_name(Placement placement) noexcept;

/// One edge of the forward-kinematics tree.
struct FkLink {
  Role role;
  Role parent;
  std::string length_key;
  std::vector<ChannelId> channels;  // channels the placement reads
  Placement placement = Placement::unavailable;
};

/// Forward-kinematics tree of a format: canonical segments in parent-first
/// order, each bound to the channels that place its child.
class FkChain {
 public:
  static FkChain build(DescriptorPtr descriptor);

  const DescriptorPtr& descriptor() const noexcept { return descriptor_; }
  const ChannelLayout& layout() const noexcept { return layout_; }
  const std::vector<FkLink>& links() const noexcept { return links_; }
  const FkLink* link(Role role) const noexcept;

  Placement role_placement(Role role) const noexcept { return placement_[index(role)]; }
  /// Placement of a descriptor joint; joints that are no role's direct
  /// source are unavailable.
  Placement joint_placement(std::size_t joint) const noexcept { return joint_placement_[joint]; }
  std::vector<std::size_t> joints_with(Placement placement) const;

 private:
  DescriptorPtr descriptor_;
  ChannelLayout layout_;
  std::vector<FkLink> links_;
  std::array<Placement, kRoleCount> placement_{};
  std::vector<Placement> joint_placement_;
};

struct Reconstruction {
  Pose pose;                  // descriptor joints; unplaced joints invalid
  CanonicalPose canonical{};  // role view of the same keypoints
  std::vector<Role> blocked;  // placeable roles left out for lack of data
  std::vector<std::string> missing;  // channels and lengths that blocked them
};

/// Forward kinematics from the root pose. Roles whose channels or lengths are
/// absent are reported in `blocked` and left invalid. Throws DomainError for
/// values outside their channel's range.
Reconstruction reconstruct(const JointAngles& angles, const BoneLengths& lengths,
                           const FkChain& chain);

/// Strict form: throws ReconstructionGapError naming the blocked roles and
/// the missing channels or lengths.
Pose angles_to_pose(const JointAngles& angles, const BoneLengths& lengths, const FkChain& chain);

/// Rebuilds every frame. Strict unless allow_gaps.
MotionSequence sequence_from_angles(const AngleSequence& angles, bool allow_gaps,
                                    std::size_t threads = 1);

struct RoundtripReport {
  std::string format;
  std::size_t frames = 0;
  double skeleton_height = 0.0;
  std::vector<double> frame_max_error;  // over exact joints valid in both poses
  double max_error = 0.0;
  double mean_error = 0.0;
  double representative_max_error = 0.0;
  std::vector<std::string> representative;        // joint names
  std::vector<std::string> unreconstructable;     // joint names
  std::vector<std::string> orientation_unavailable;  // JCS roles the format can't build

  /// max_error / skeleton_height (0 for a zero-size skeleton).
  double relative_max_error() const noexcept;
};

/// Converts to angles, reconstructs leniently and compares with the input.
RoundtripReport sequence_roundtrip_report(const MotionSequence& seq, std::size_t threads = 1);

}  // namespace jointangles
