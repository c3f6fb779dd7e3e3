// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

// Shared test helpers: axis-aligned fixtures, a random valid-pose generator
// that places keypoints geometrically, and a per-channel oracle that
// evaluates every angle straight from keypoint positions.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "jointangles/angles.hpp"
#include "jointangles/skeleton.hpp"

namespace jointangles::testing {

inline constexpr double kPi = 3.14159265358979323846;

using RolePositions = CanonicalPose;

/// Fills every joint of `descriptor` that directly sources a role; joints
/// that source no role sit at a small offset from their parent. Joints
/// without a position are invalid.
Pose pose_from_roles(const RolePositions& roles, const KeypointSetDescriptor& descriptor);

/// Subject facing +x, up +y, right side +z, arms straight out to the sides,
/// legs straight down, feet flat and forward, thumbs up.
RolePositions t_pose_roles();
Pose t_pose(const KeypointSetDescriptor& descriptor);
MotionSequence t_pose_sequence(const std::string& format, std::size_t frames, double fps = 30.0);

/// Arms hanging, forearms forward with the elbow at 90 degrees, legs straight
/// down. Every pure-movement sweep starts here.
RolePositions rest_roles();

Mat3 random_rotation(std::mt19937_64& rng);
Vec3 random_unit(std::mt19937_64& rng);
RigidTransform random_transform(std::mt19937_64& rng, bool with_scale);
double uniform(std::mt19937_64& rng, double lo, double hi);

/// Segment lengths of one subject; index 0 is the right side, 1 the left.
struct BodyLengths {
  double spine_lower, spine_upper, neck, head;
  std::array<double, 2> ear, shoulder, upper_arm, forearm, thumb, hand;
  std::array<double, 2> hip, thigh, shin, foot;
};
BodyLengths random_body(std::mt19937_64& rng);

struct GeneratorOptions {
  /// Thumbs perpendicular to the forearm, the geometry that reconstruction
  /// can place exactly.
  bool canonical_thumbs = false;
  /// Smallest angle kept between any bone and a zenith or straight-limb
  /// configuration.
  double margin = 0.2;
  /// Apply a random rotation, translation and scale at the end.
  bool random_placement = true;
};

/// A random valid pose for a format with the full kinect25 role set. Bones are
/// placed directly: both hips on one line through the pelvis, the lower spine
/// perpendicular to it, the upper spine perpendicular to the shoulder line
/// through its midpoint, and the neck continuing the upper spine.
struct GeneratedPose {
  RolePositions roles;
  Pose pose;
  // The torso twist used to build the pose, for the spine oracle self-check.
  double spine_flexion = 0.0;
  double spine_lateral = 0.0;
  double spine_axial = 0.0;
};
GeneratedPose random_kinect_pose(std::mt19937_64& rng, const GeneratorOptions& options = {});
GeneratedPose random_kinect_pose(std::mt19937_64& rng, const BodyLengths& body, const GeneratorOptions& options);

/// Random sequence of valid poses of one subject (independent frames).
MotionSequence random_kinect_sequence(std::mt19937_64& rng, std::size_t frames,
                                      const GeneratorOptions& options = {});

/// Expected channel values computed from positions with plain vector algebra.
using ChannelMap = std::map<std::pair<Joint, Channel>, double>;
ChannelMap oracle_channels(const RolePositions& roles);

/// |a - b|, taking the shorter way around for circular channels.
double channel_distance(ChannelId id, double a, double b);

/// Largest channel deviation between two angle sets over `layout`; infinity
/// when availability differs.
double max_channel_deviation(const JointAngles& a, const JointAngles& b, const ChannelLayout& layout);

/// The pose reflected through the sagittal plane (through the pelvis,
/// normal to the hip line) with left and right keypoints exchanged.
Pose mirror_pose(const Pose& pose, const KeypointSetDescriptor& descriptor);
Joint mirror_joint(Joint joint);

std::string temp_path(const std::string& name);

}  // namespace jointangles::testing
