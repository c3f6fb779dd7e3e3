// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "jointangles/skeleton.hpp"

namespace jointangles {

/// Median over frames of each descriptor bone and each canonical segment,
/// using only frames where both endpoints are valid. Segments that are never
/// co-valid are flagged missing (length 0).
BoneLengths bone_lengths(const MotionSequence& seq);

/// Lengths of a single pose (the one-frame case of bone_lengths).
BoneLengths bone_lengths(const Pose& pose, const DescriptorPtr& descriptor);

/// Linear resampling to `target_len` frames on the frame-index axis. Output
/// frame t samples source time t*(N-1)/(T-1); endpoints and exact hits are
/// copied bitwise. Interpolating between a valid and an invalid sample gives
/// an invalid joint. fps is carried through unchanged.
MotionSequence resample(const MotionSequence& seq, std::size_t target_len = 200);

/// Applies p -> scale * R p + t to every valid keypoint.
MotionSequence rotate_sequence(const MotionSequence& seq, const RigidTransform& transform);
Pose transform_pose(const Pose& pose, const RigidTransform& transform);

/// Axis uniform on the sphere, angle uniform in [-max_radians, max_radians],
/// zero translation, unit scale. Deterministic for a given seed on every
/// platform (mt19937_64 with explicit bit-to-double mapping).
RigidTransform sample_rotation(double max_radians, std::uint64_t seed);

/// Rotation-invariant size measure: the largest distance between two valid
/// keypoints of any frame. Used to scale reconstruction tolerances.
double skeleton_height(const MotionSequence& seq);
double skeleton_height(const Pose& pose);

}  // namespace jointangles
