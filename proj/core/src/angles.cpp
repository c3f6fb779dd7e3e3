// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

#include "jointangles/angles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>
#include <fmt/format.h>

#include "jointangles/error.hpp"
#include "jointangles/parallel.hpp"
#include "jointangles/sequence_ops.hpp"

namespace jointangles {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAlignmentTolerance = 1e-3;

constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "spine",       "neck",       "right_shoulder", "left_shoulder", "right_elbow",
    "left_elbow",  "right_wrist", "left_wrist",    "right_hip",     "left_hip",
    "right_knee",  "left_knee",  "right_ankle",    "left_ankle",
};

constexpr std::array<std::string_view, kChannelCount> kChannelNames = {"flexion", "abduction",
                                                                       "axial"};

double wrap_pi(double angle) {
  // atan2 returns -pi for (-0, negative); the channel ranges are half-open.
  return angle <= -kPi ? angle + 2.0 * kPi : angle;
}

void require_unit(const Vec3& bone, std::string_view what) {
  const double norm = bone.norm();
  if (!(std::abs(norm - 1.0) <= kUnitTolerance)) {
    throw ArgumentError(fmt::format("{}: expected a unit vector, got norm {}", what, norm));
  }
}

Mat3 rot_x(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitX()).toRotationMatrix(); }
Mat3 rot_y(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitY()).toRotationMatrix(); }
Mat3 rot_z(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix(); }

std::optional<Vec3> unit(const Vec3& v) {
  const double norm = v.norm();
  if (!(norm > kDegenerateEpsilon)) return std::nullopt;
  return Vec3(v / norm);
}

Joint side_joint(Joint right, Side side) {
  return side == Side::right ? right : static_cast<Joint>(static_cast<int>(right) + 1);
}

template <typename... Roles>
bool has_all(const KeypointSetDescriptor& d, Roles... roles) {
  return (d.has_role(roles) && ...);
}

const std::optional<Vec3>& at(const CanonicalPose& pose, Role role) { return pose[index(role)]; }

struct LimbResult {
  std::optional<SphericalAngles> proximal;  // spherical_z at the hip or shoulder
  std::optional<double> proximal_axial;
  std::optional<double> hinge;
  std::optional<double> hinge_axial;
};

// Shared shoulder/elbow and hip/knee logic. `sign` is +1 for the elbow
// (forearm bends toward +x) and -1 for the knee (lower leg bends toward -x).
LimbResult limb_angles(const std::optional<Frame3>& proximal, const std::optional<Vec3>& root,
                       const std::optional<Vec3>& middle, const std::optional<Vec3>& end,
                       const std::optional<Frame3>& middle_frame,
                       const std::optional<Frame3>& end_frame, int sign) {
  LimbResult out;
  if (!root || !middle) return out;
  const auto upper = unit(*middle - *root);
  if (!upper) return out;

  std::optional<Frame3> hinge_frame = middle_frame;
  bool virtual_frame = false;
  if (proximal) {
    out.proximal = spherical_z(proximal->to_local(*upper), proximal->handedness);
    if (!hinge_frame && end && unit(*end - *middle)) {
      // Straight limb: the hinge frame is undefined, so the aligned proximal
      // frame stands in for it and the proximal twist is reported as zero.
      const Mat3 aligned = proximal->rotation() *
                           alignment_rotation(out.proximal->flexion, out.proximal->abduction,
                                              proximal->handedness);
      hinge_frame = Frame3::from_rotation(aligned, proximal->handedness, *middle);
      virtual_frame = true;
    }
    if (hinge_frame) {
      out.proximal_axial =
          virtual_frame ? 0.0
                        : axial_rotation(*proximal, out.proximal->flexion, out.proximal->abduction,
                                         *hinge_frame);
    }
  }
  if (end) {
    out.hinge = hinge_flexion(*end - *middle, Vec3(-*upper));
    if (out.hinge && hinge_frame && end_frame) {
      const double bend = sign > 0 ? kPi - *out.hinge : *out.hinge - kPi;
      out.hinge_axial = axial_rotation(*hinge_frame, bend, 0.0, *end_frame);
    }
  }
  return out;
}

}  // namespace

std::string_view joint_name(Joint joint) noexcept { return kJointNames[static_cast<std::size_t>(joint)]; }

std::string_view channel_name(Channel channel) noexcept {
  return kChannelNames[static_cast<std::size_t>(channel)];
}

std::optional<Joint> joint_from_name(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kJointCount; ++i) {
    if (kJointNames[i] == name) return static_cast<Joint>(i);
  }
  return std::nullopt;
}

std::optional<Channel> channel_from_name(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kChannelCount; ++i) {
    if (kChannelNames[i] == name) return static_cast<Channel>(i);
  }
  return std::nullopt;
}

bool is_hinge(Joint joint) noexcept {
  return joint == Joint::elbow_left || joint == Joint::elbow_right || joint == Joint::knee_left ||
         joint == Joint::knee_right;
}

bool is_circular(ChannelId id) noexcept {
  switch (id.joint) {
    case Joint::spine:
    case Joint::neck:
    case Joint::wrist_left:
    case Joint::wrist_right:
      return id.channel != Channel::flexion;
    case Joint::shoulder_left:
    case Joint::shoulder_right:
    case Joint::hip_left:
    case Joint::hip_right:
      return id.channel != Channel::abduction;
    case Joint::elbow_left:
    case Joint::elbow_right:
    case Joint::knee_left:
    case Joint::knee_right:
      return id.channel == Channel::axial;
    case Joint::ankle_left:
    case Joint::ankle_right:
      return id.channel == Channel::abduction;
    case Joint::count_:
      break;
  }
  return false;
}

std::pair<double, double> channel_range(ChannelId id) noexcept {
  if (is_circular(id)) return {-kPi, kPi};
  if (is_hinge(id.joint) || id.joint == Joint::ankle_left || id.joint == Joint::ankle_right) {
    return {0.0, kPi};
  }
  return {-kPi / 2.0, kPi / 2.0};
}

ChannelLayout channel_layout(const KeypointSetDescriptor& d) {
  ChannelLayout layout;
  auto add = [&](Joint joint, Channel channel) { layout.push_back({joint, channel}); };

  const bool trunk = has_all(d, Role::pelvis, Role::spine_top, Role::hip_left, Role::hip_right,
                             Role::shoulder_left, Role::shoulder_right);
  if (trunk) {
    if (d.has_role(Role::spine_mid)) add(Joint::spine, Channel::flexion);
    add(Joint::spine, Channel::abduction);
    add(Joint::spine, Channel::axial);
    if (d.has_role(Role::head)) {
      add(Joint::neck, Channel::flexion);
      add(Joint::neck, Channel::abduction);
      if (has_all(d, Role::ear_left, Role::ear_right)) add(Joint::neck, Channel::axial);
    }
  }
  const bool spine = has_all(d, Role::pelvis, Role::spine_top);
  for (Side side : {Side::right, Side::left}) {
    const ArmRoles arm = arm_roles(side);
    if (spine && has_all(d, arm.shoulder, arm.opposite_shoulder, arm.elbow)) {
      const Joint joint = side_joint(Joint::shoulder_right, side);
      add(joint, Channel::flexion);
      add(joint, Channel::abduction);
      if (d.has_role(arm.wrist)) add(joint, Channel::axial);
    }
  }
  for (Side side : {Side::right, Side::left}) {
    const ArmRoles arm = arm_roles(side);
    if (has_all(d, arm.shoulder, arm.elbow, arm.wrist)) {
      const Joint joint = side_joint(Joint::elbow_right, side);
      add(joint, Channel::flexion);
      if (spine && has_all(d, arm.opposite_shoulder, arm.thumb)) add(joint, Channel::axial);
    }
  }
  for (Side side : {Side::right, Side::left}) {
    const ArmRoles arm = arm_roles(side);
    if (has_all(d, arm.elbow, arm.wrist, arm.thumb, arm.hand)) {
      const Joint joint = side_joint(Joint::wrist_right, side);
      add(joint, Channel::flexion);
      add(joint, Channel::abduction);
    }
  }
  for (Side side : {Side::right, Side::left}) {
    const LegRoles leg = leg_roles(side);
    if (spine && has_all(d, leg.hip, leg.opposite_hip, leg.knee)) {
      const Joint joint = side_joint(Joint::hip_right, side);
      add(joint, Channel::flexion);
      add(joint, Channel::abduction);
      if (d.has_role(leg.ankle)) add(joint, Channel::axial);
    }
  }
  for (Side side : {Side::right, Side::left}) {
    const LegRoles leg = leg_roles(side);
    if (has_all(d, leg.hip, leg.knee, leg.ankle)) {
      const Joint joint = side_joint(Joint::knee_right, side);
      add(joint, Channel::flexion);
      if (spine && has_all(d, leg.opposite_hip, leg.toes)) add(joint, Channel::axial);
    }
  }
  for (Side side : {Side::right, Side::left}) {
    const LegRoles leg = leg_roles(side);
    if (has_all(d, leg.knee, leg.ankle, leg.toes)) {
      const Joint joint = side_joint(Joint::ankle_right, side);
      add(joint, Channel::flexion);
      if (d.has_role(leg.small_toe)) add(joint, Channel::abduction);
    }
  }
  return layout;
}

SphericalAngles spherical_z(const Vec3& bone, int handedness) {
  require_unit(bone, "spherical_z");
  const double lateral = static_cast<double>(handedness) * bone.z();
  const double projection = std::hypot(bone.x(), bone.y());
  if (projection < kZenithTolerance) return {0.0, std::copysign(kPi / 2.0, lateral)};
  return {wrap_pi(std::atan2(bone.x(), -bone.y())), std::atan2(lateral, projection)};
}

Vec3 spherical_z_direction(double flexion, double abduction, int handedness) {
  const double c = std::cos(abduction);
  return {c * std::sin(flexion), -c * std::cos(flexion),
          static_cast<double>(handedness) * std::sin(abduction)};
}

SphericalAngles spherical_x(const Vec3& bone, int handedness) {
  require_unit(bone, "spherical_x");
  const double lateral = static_cast<double>(handedness) * bone.z();
  const double projection = std::hypot(bone.y(), lateral);
  if (projection < kZenithTolerance) return {std::copysign(kPi / 2.0, bone.x()), 0.0};
  return {std::atan2(bone.x(), projection), wrap_pi(std::atan2(lateral, bone.y()))};
}

Vec3 spherical_x_direction(double flexion, double lateral, int handedness) {
  const double c = std::cos(flexion);
  return {std::sin(flexion), c * std::cos(lateral),
          static_cast<double>(handedness) * c * std::sin(lateral)};
}

std::optional<double> interior_angle(const Vec3& u, const Vec3& v) {
  if (!(u.norm() > kDegenerateEpsilon) || !(v.norm() > kDegenerateEpsilon)) return std::nullopt;
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

std::optional<double> hinge_flexion(const Vec3& moving_bone, const Vec3& proximal_y) {
  return interior_angle(moving_bone, proximal_y);
}

std::optional<double> hinge_flexion(const Vec3& moving_bone, const Frame3& frame) {
  return interior_angle(moving_bone, frame.y);
}

Mat3 alignment_rotation(double flexion, double abduction, int handedness) {
  return rot_z(flexion) * rot_x(-static_cast<double>(handedness) * abduction);
}

double twist_y(const Mat3& r) { return wrap_pi(std::atan2(r(0, 2) - r(2, 0), r(0, 0) + r(2, 2))); }

double axial_rotation(const Frame3& proximal, double flexion, double abduction, const Frame3& distal) {
  const Mat3 aligned = proximal.rotation() * alignment_rotation(flexion, abduction, proximal.handedness);
  const Mat3 target = distal.rotation();
  const double miss = (aligned.col(1) - target.col(1)).norm();
  if (!(miss <= kAlignmentTolerance)) {
    throw InternalConsistencyError(
        fmt::format("aligned proximal y misses the distal y by {} (limit {})", miss,
                    kAlignmentTolerance));
  }
  return wrap_pi(static_cast<double>(proximal.handedness) * twist_y(aligned.transpose() * target));
}

AnkleAngles ankle_angles(const Vec3& lower_leg, const Vec3& foot, const Frame3& frame,
                         const std::optional<Vec3>& toe_line) {
  AnkleAngles out;
  out.flexion = interior_angle(lower_leg, foot);
  if (toe_line) {
    const double along_x = toe_line->dot(frame.x);
    const double along_z = toe_line->dot(frame.z);
    if (std::hypot(along_x, along_z) > kDegenerateEpsilon * toe_line->norm()) {
      out.abduction = wrap_pi(std::atan2(-along_x, along_z));
    }
  }
  return out;
}

SpineAngles spine_angles(const Frame3& lower, const Frame3& upper, bool mid_spine_present) {
  const Mat3 q = lower.rotation().transpose() * upper.rotation();
  const double horizontal = std::hypot(q(0, 0), q(2, 0));
  const double theta = std::atan2(q(1, 0), horizontal);
  SpineAngles out;
  if (mid_spine_present) out.flexion = -theta;
  double axial = 0.0;
  if (horizontal >= kZenithTolerance) {
    axial = std::atan2(-q(2, 0), q(0, 0));
    out.axial = wrap_pi(axial);
  }
  const Mat3 residual = (rot_y(axial) * rot_z(theta)).transpose() * q;
  out.lateral = wrap_pi(std::atan2(residual(2, 1), residual(1, 1)));
  return out;
}

Mat3 spine_rotation(double flexion, double lateral, double axial) {
  return rot_y(axial) * rot_z(-flexion) * rot_x(lateral);
}

JointAngles pose_to_angles(const CanonicalPose& pose) { return pose_to_angles(pose, compute_jcs(pose)); }

JointAngles pose_to_angles(const CanonicalPose& pose, const JcsSet& jcs) {
  JointAngles out;
  const auto& lower = jcs[JcsRole::lower_proximal];
  const auto& upper = jcs[JcsRole::upper_proximal];
  const bool mid_spine = at(pose, Role::spine_mid).has_value();

  if (lower) out.root = RootPose{lower->origin, lower->rotation()};

  std::optional<Mat3> neck_reference;
  if (lower && upper) {
    const SpineAngles spine = spine_angles(*lower, *upper, mid_spine);
    out.set(Joint::spine, Channel::flexion, spine.flexion);
    out.set(Joint::spine, Channel::abduction, spine.lateral);
    out.set(Joint::spine, Channel::axial, spine.axial);
    if (mid_spine) {
      neck_reference = upper->rotation();
    } else if (spine.axial) {
      // Single-segment torso: the neck is measured against the shoulder
      // yaw only, since the shoulder line's tilt is already in the spine.
      neck_reference = lower->rotation() * rot_y(*spine.axial);
    }
  }

  const auto& head = at(pose, Role::head);
  const auto& neck_origin =
      at(pose, Role::neck_base) ? at(pose, Role::neck_base) : at(pose, Role::spine_top);
  if (neck_reference && head && neck_origin) {
    if (const auto dir = unit(*head - *neck_origin)) {
      if (const auto& neck = jcs[JcsRole::neck]) {
        const SphericalAngles s = spherical_x(neck->to_local(*dir), 1);
        out.set(Joint::neck, Channel::flexion, s.flexion);
        out.set(Joint::neck, Channel::abduction, s.abduction);
        out.set(Joint::neck, Channel::axial, twist_y(neck_reference->transpose() * neck->rotation()));
      } else if (!at(pose, Role::ear_left) || !at(pose, Role::ear_right)) {
        const SphericalAngles s = spherical_x(neck_reference->transpose() * *dir, 1);
        out.set(Joint::neck, Channel::flexion, s.flexion);
        out.set(Joint::neck, Channel::abduction, s.abduction);
      }
    }
  }

  for (Side side : {Side::right, Side::left}) {
    const ArmRoles arm = arm_roles(side);
    const LimbResult a = limb_angles(jcs[shoulder_jcs(side)], at(pose, arm.shoulder),
                                     at(pose, arm.elbow), at(pose, arm.wrist), jcs[elbow_jcs(side)],
                                     jcs[wrist_jcs(side)], +1);
    const Joint shoulder = side_joint(Joint::shoulder_right, side);
    const Joint elbow = side_joint(Joint::elbow_right, side);
    if (a.proximal) {
      out.set(shoulder, Channel::flexion, a.proximal->flexion);
      out.set(shoulder, Channel::abduction, a.proximal->abduction);
    }
    out.set(shoulder, Channel::axial, a.proximal_axial);
    out.set(elbow, Channel::flexion, a.hinge);
    out.set(elbow, Channel::axial, a.hinge_axial);

    const auto& wrist_frame = jcs[wrist_jcs(side)];
    const auto& hand = at(pose, arm.hand);
    if (wrist_frame && hand) {
      if (const auto dir = unit(*hand - *at(pose, arm.wrist))) {
        Vec3 local = wrist_frame->to_local(*dir);
        local.y() = -local.y();  // the hand hangs along -y at rest
        const SphericalAngles s = spherical_x(local, wrist_frame->handedness);
        const Joint wrist = side_joint(Joint::wrist_right, side);
        out.set(wrist, Channel::flexion, s.flexion);
        out.set(wrist, Channel::abduction, s.abduction);
      }
    }
  }

  for (Side side : {Side::right, Side::left}) {
    const LegRoles leg = leg_roles(side);
    const LimbResult l = limb_angles(jcs[hip_jcs(side)], at(pose, leg.hip), at(pose, leg.knee),
                                     at(pose, leg.ankle), jcs[knee_jcs(side)], jcs[ankle_jcs(side)],
                                     -1);
    const Joint hip = side_joint(Joint::hip_right, side);
    const Joint knee = side_joint(Joint::knee_right, side);
    if (l.proximal) {
      out.set(hip, Channel::flexion, l.proximal->flexion);
      out.set(hip, Channel::abduction, l.proximal->abduction);
    }
    out.set(hip, Channel::axial, l.proximal_axial);
    out.set(knee, Channel::flexion, l.hinge);
    out.set(knee, Channel::axial, l.hinge_axial);

    const auto& knee_pos = at(pose, leg.knee);
    const auto& ankle_pos = at(pose, leg.ankle);
    const auto& toes = at(pose, leg.toes);
    if (knee_pos && ankle_pos && toes) {
      const Vec3 foot_base = at(pose, leg.foot_base).value_or(*ankle_pos);
      const Joint ankle = side_joint(Joint::ankle_right, side);
      const Vec3 lower_leg = *knee_pos - *ankle_pos;
      const Vec3 foot = *toes - foot_base;
      if (const auto& frame = jcs[ankle_jcs(side)]) {
        std::optional<Vec3> toe_line;
        if (const auto& small = at(pose, leg.small_toe)) toe_line = *small - *toes;
        const AnkleAngles aa = ankle_angles(lower_leg, foot, *frame, toe_line);
        out.set(ankle, Channel::flexion, aa.flexion);
        out.set(ankle, Channel::abduction, aa.abduction);
      } else {
        out.set(ankle, Channel::flexion, interior_angle(lower_leg, foot));
      }
    }
  }
  return out;
}

std::vector<std::optional<double>> vectorize(const JointAngles& angles, const ChannelLayout& layout) {
  std::vector<std::optional<double>> row;
  row.reserve(layout.size());
  for (const ChannelId& id : layout) row.push_back(angles.get(id));
  return row;
}

std::vector<std::optional<double>> AngleSequence::row(std::size_t frame) const {
  return vectorize(frames.at(frame), layout);
}

AngleSequence sequence_to_angles(const MotionSequence& seq, std::size_t threads) {
  seq.check();
  AngleSequence out;
  out.descriptor = seq.descriptor;
  out.fps = seq.fps;
  out.layout = channel_layout(*seq.descriptor);
  out.bone_lengths = bone_lengths(seq);
  out.frames.resize(seq.frames.size());

  std::array<bool, kJointCount * kChannelCount> in_layout{};
  for (const ChannelId& id : out.layout) {
    in_layout[static_cast<std::size_t>(id.joint) * kChannelCount +
              static_cast<std::size_t>(id.channel)] = true;
  }
  const KeypointSetDescriptor& descriptor = *seq.descriptor;
  parallel_for(seq.frames.size(), threads, [&](std::size_t i) {
    JointAngles angles = pose_to_angles(to_canonical(seq.frames[i], descriptor));
    for (std::size_t j = 0; j < kJointCount; ++j) {
      for (std::size_t c = 0; c < kChannelCount; ++c) {
        if (!in_layout[j * kChannelCount + c]) {
          angles.set(static_cast<Joint>(j), static_cast<Channel>(c), std::nullopt);
        }
      }
    }
    out.frames[i] = std::move(angles);
  });
  return out;
}

std::vector<BonePair> default_bone_pairs(const KeypointSetDescriptor& descriptor) {
  std::vector<std::vector<std::size_t>> neighbours(descriptor.joint_count());
  for (std::size_t j = 0; j < descriptor.joint_count(); ++j) {
    if (const auto parent = descriptor.parent(j)) neighbours[j].push_back(*parent);
  }
  for (const Bone& bone : descriptor.bones()) neighbours[bone.parent].push_back(bone.child);

  std::vector<BonePair> pairs;
  for (std::size_t j = 0; j < neighbours.size(); ++j) {
    const auto& n = neighbours[j];
    for (std::size_t a = 0; a < n.size(); ++a) {
      for (std::size_t b = a + 1; b < n.size(); ++b) pairs.push_back({j, n[a], n[b]});
    }
  }
  return pairs;
}

std::optional<double> dot_product_angle(const Vec3& u, const Vec3& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (!(nu > 0.0) || !(nv > 0.0)) return std::nullopt;
  return std::acos(std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0));
}

std::vector<std::optional<double>> dot_product_baseline(const Pose& pose,
                                                        const std::vector<BonePair>& pairs) {
  std::vector<std::optional<double>> out;
  out.reserve(pairs.size());
  for (const BonePair& pair : pairs) {
    const auto centre = pose.get(pair.joint);
    const auto a = pose.get(pair.first);
    const auto b = pose.get(pair.second);
    if (!centre || !a || !b) {
      out.push_back(std::nullopt);
    } else {
      out.push_back(dot_product_angle(*a - *centre, *b - *centre));
    }
  }
  return out;
}

}  // namespace jointangles
