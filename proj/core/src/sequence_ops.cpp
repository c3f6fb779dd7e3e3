// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

#include "jointangles/sequence_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>
#include <fmt/format.h>

#include "jointangles/error.hpp"

namespace jointangles {

namespace {

struct LengthProbe {
  std::string key;
  RoleSource parent;
  RoleSource child;
};

std::optional<Vec3> resolve(const Pose& pose, const RoleSource& source) {
  const auto first = pose.get(source.first);
  if (!first || !source.second) return first;
  const auto second = pose.get(*source.second);
  if (!second) return std::nullopt;
  return 0.5 * (*first + *second);
}

std::vector<LengthProbe> length_probes(const KeypointSetDescriptor& descriptor) {
  std::vector<LengthProbe> probes;
  for (const Bone& bone : descriptor.bones()) {
    probes.push_back({descriptor.bone_key(bone), {bone.parent, {}}, {bone.child, {}}});
  }
  for (const Segment& segment : canonical_segments(descriptor)) {
    const bool known = std::any_of(probes.begin(), probes.end(),
                                   [&](const LengthProbe& p) { return p.key == segment.key; });
    if (!known) {
      probes.push_back(
          {segment.key, *descriptor.source(segment.parent), *descriptor.source(segment.child)});
    }
  }
  return probes;
}

double median(std::vector<double>& values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double unit_interval(std::mt19937_64& engine) {
  // 53 random mantissa bits -> [0, 1).
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace

BoneLengths bone_lengths(const MotionSequence& seq) {
  seq.check();
  const auto probes = length_probes(*seq.descriptor);
  BoneLengths lengths;
  std::vector<double> samples;
  for (const LengthProbe& probe : probes) {
    samples.clear();
    for (const Pose& pose : seq.frames) {
      const auto a = resolve(pose, probe.parent);
      const auto b = resolve(pose, probe.child);
      if (a && b) samples.push_back((*b - *a).norm());
    }
    if (samples.empty()) {
      lengths.set_missing(probe.key);
    } else {
      lengths.set(probe.key, median(samples));
    }
  }
  return lengths;
}

BoneLengths bone_lengths(const Pose& pose, const DescriptorPtr& descriptor) {
  MotionSequence single{descriptor, 30.0, {pose}};
  return bone_lengths(single);
}

MotionSequence resample(const MotionSequence& seq, std::size_t target_len) {
  seq.check();
  if (seq.frames.empty()) throw EmptyInputError("cannot resample an empty sequence");
  if (target_len == 0) throw ArgumentError("target length must be at least 1");

  const std::size_t source_len = seq.frames.size();
  MotionSequence out{seq.descriptor, seq.fps, {}};
  out.frames.reserve(target_len);
  const std::size_t joints = seq.descriptor->joint_count();
  for (std::size_t t = 0; t < target_len; ++t) {
    if (target_len == 1 || source_len == 1) {
      out.frames.push_back(seq.frames.front());
      continue;
    }
    const double time = static_cast<double>(t) * static_cast<double>(source_len - 1) /
                        static_cast<double>(target_len - 1);
    const auto lower = std::min(static_cast<std::size_t>(std::floor(time)), source_len - 1);
    const double weight = time - static_cast<double>(lower);
    if (weight == 0.0 || lower == source_len - 1) {
      out.frames.push_back(seq.frames[lower]);
      continue;
    }
    const Pose& a = seq.frames[lower];
    const Pose& b = seq.frames[lower + 1];
    Pose frame(joints);
    for (std::size_t j = 0; j < joints; ++j) {
      if (a.valid(j) && b.valid(j)) {
        frame.set(j, a.position(j) + weight * (b.position(j) - a.position(j)));
      }
    }
    out.frames.push_back(std::move(frame));
  }
  return out;
}

Pose transform_pose(const Pose& pose, const RigidTransform& transform) {
  Pose out(pose.joint_count());
  for (std::size_t j = 0; j < pose.joint_count(); ++j) {
    if (pose.valid(j)) out.set(j, transform.apply(pose.position(j)));
  }
  return out;
}

MotionSequence rotate_sequence(const MotionSequence& seq, const RigidTransform& transform) {
  transform.check();
  seq.check();
  MotionSequence out{seq.descriptor, seq.fps, {}};
  out.frames.reserve(seq.frames.size());
  for (const Pose& pose : seq.frames) out.frames.push_back(transform_pose(pose, transform));
  return out;
}

RigidTransform sample_rotation(double max_radians, std::uint64_t seed) {
  if (!(max_radians >= 0.0) || !std::isfinite(max_radians)) {
    throw ArgumentError(fmt::format("max_radians must be a non-negative number, got {}", max_radians));
  }
  std::mt19937_64 engine(seed);
  // Uniform direction on the sphere via Archimedes' projection.
  const double height = 2.0 * unit_interval(engine) - 1.0;
  const double azimuth = 2.0 * std::numbers::pi * unit_interval(engine);
  const double radius = std::sqrt(std::max(0.0, 1.0 - height * height));
  const Vec3 axis(radius * std::cos(azimuth), radius * std::sin(azimuth), height);
  const double angle = (2.0 * unit_interval(engine) - 1.0) * max_radians;

  RigidTransform transform;
  if (angle != 0.0) transform.rotation = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
  return transform;
}

double skeleton_height(const Pose& pose) {
  double extent = 0.0;
  for (std::size_t a = 0; a < pose.joint_count(); ++a) {
    if (!pose.valid(a)) continue;
    for (std::size_t b = a + 1; b < pose.joint_count(); ++b) {
      if (pose.valid(b)) extent = std::max(extent, (pose.position(a) - pose.position(b)).norm());
    }
  }
  return extent;
}

double skeleton_height(const MotionSequence& seq) {
  double extent = 0.0;
  for (const Pose& pose : seq.frames) extent = std::max(extent, skeleton_height(pose));
  return extent;
}

}  // namespace jointangles
