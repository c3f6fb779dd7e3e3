// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

#include "jointangles/jcs.hpp"

#include <fmt/format.h>

#include "jointangles/error.hpp"

namespace jointangles {

namespace {

constexpr std::array<std::string_view, kJcsRoleCount> kJcsNames = {
    "hip_left",   "hip_right",   "shoulder_left", "shoulder_right", "upper_proximal",
    "lower_proximal", "elbow_left", "elbow_right", "knee_left",     "knee_right",
    "wrist_left", "wrist_right", "ankle_left",    "ankle_right",    "neck",
};

Vec3& axis_ref(Frame3& frame, Axis a) {
  return a == Axis::x ? frame.x : (a == Axis::y ? frame.y : frame.z);
}

bool is_cyclic(Axis first, Axis second) {
  const int a = static_cast<int>(first);
  const int b = static_cast<int>(second);
  return (a + 1) % 3 == b;
}

Axis remaining_axis(Axis first, Axis second) {
  return static_cast<Axis>(3 - static_cast<int>(first) - static_cast<int>(second));
}

const std::optional<Vec3>& at(const CanonicalPose& pose, Role role) { return pose[index(role)]; }

template <typename... Roles>
bool all_present(const CanonicalPose& pose, Roles... roles) {
  return (at(pose, roles).has_value() && ...);
}

std::optional<Frame3> try_build(Axis primary_label, const Vec3& primary, const Vec3& secondary,
                                Axis cross_label, int handedness, const Vec3& origin) {
  try {
    return build_frame(primary_label, primary, secondary, cross_label, handedness, origin);
  } catch (const DegenerateFrameError&) {
    return std::nullopt;
  }
}

}  // namespace

Mat3 Frame3::rotation() const {
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = static_cast<double>(handedness) * z;
  return r;
}

Frame3 Frame3::from_rotation(const Mat3& rotation, int handedness, const Vec3& origin) {
  Frame3 frame;
  frame.x = rotation.col(0);
  frame.y = rotation.col(1);
  frame.z = static_cast<double>(handedness) * rotation.col(2);
  frame.origin = origin;
  frame.handedness = handedness;
  return frame;
}

Frame3 build_frame(Axis primary_label, const Vec3& primary, const Vec3& secondary,
                   Axis cross_label, int handedness, const Vec3& origin) {
  if (primary_label == cross_label) {
    throw ArgumentError("build_frame: primary and cross axes must differ");
  }
  if (handedness != 1 && handedness != -1) {
    throw ArgumentError(fmt::format("build_frame: handedness must be +1 or -1, got {}", handedness));
  }
  const double primary_norm = primary.norm();
  const double secondary_norm = secondary.norm();
  if (!(primary_norm > kDegenerateEpsilon) || !(secondary_norm > kDegenerateEpsilon)) {
    throw DegenerateFrameError("build_frame: zero-length input vector");
  }
  const Vec3 cross = primary.cross(secondary);
  const double cross_norm = cross.norm();
  if (!(cross_norm > kDegenerateEpsilon * primary_norm * secondary_norm)) {
    throw DegenerateFrameError("build_frame: input vectors are (nearly) parallel");
  }

  const double h = static_cast<double>(handedness);
  Frame3 frame;
  const Vec3 first = primary / primary_norm;
  const Vec3 second = h * (cross / cross_norm);
  axis_ref(frame, primary_label) = first;
  axis_ref(frame, cross_label) = second;
  // det[x y z] = h: cyclic labels complete with first x second, the others
  // with second x first.
  axis_ref(frame, remaining_axis(primary_label, cross_label)) =
      is_cyclic(primary_label, cross_label) ? Vec3(h * first.cross(second))
                                            : Vec3(h * second.cross(first));
  frame.origin = origin;
  frame.handedness = handedness;
  return frame;
}

std::string_view jcs_role_name(JcsRole role) noexcept {
  return kJcsNames[static_cast<std::size_t>(role)];
}

JcsRole hip_jcs(Side side) noexcept { return side == Side::right ? JcsRole::hip_right : JcsRole::hip_left; }
JcsRole shoulder_jcs(Side side) noexcept {
  return side == Side::right ? JcsRole::shoulder_right : JcsRole::shoulder_left;
}
JcsRole elbow_jcs(Side side) noexcept { return side == Side::right ? JcsRole::elbow_right : JcsRole::elbow_left; }
JcsRole knee_jcs(Side side) noexcept { return side == Side::right ? JcsRole::knee_right : JcsRole::knee_left; }
JcsRole wrist_jcs(Side side) noexcept { return side == Side::right ? JcsRole::wrist_right : JcsRole::wrist_left; }
JcsRole ankle_jcs(Side side) noexcept { return side == Side::right ? JcsRole::ankle_right : JcsRole::ankle_left; }

bool jcs_supported(const KeypointSetDescriptor& d, JcsRole role) noexcept {
  auto has = [&](auto... roles) { return (d.has_role(roles) && ...); };
  const bool spine = has(Role::pelvis, Role::spine_top);
  switch (role) {
    case JcsRole::hip_left:
    case JcsRole::hip_right:
    case JcsRole::lower_proximal:
      return spine && has(Role::hip_left, Role::hip_right);
    case JcsRole::shoulder_left:
    case JcsRole::shoulder_right:
    case JcsRole::upper_proximal:
      return spine && has(Role::shoulder_left, Role::shoulder_right);
    case JcsRole::elbow_left:
      return has(Role::shoulder_left, Role::elbow_left, Role::wrist_left);
    case JcsRole::elbow_right:
      return has(Role::shoulder_right, Role::elbow_right, Role::wrist_right);
    case JcsRole::knee_left:
      return has(Role::hip_left, Role::knee_left, Role::ankle_left);
    case JcsRole::knee_right:
      return has(Role::hip_right, Role::knee_right, Role::ankle_right);
    case JcsRole::wrist_left:
      return has(Role::elbow_left, Role::wrist_left, Role::thumb_left);
    case JcsRole::wrist_right:
      return has(Role::elbow_right, Role::wrist_right, Role::thumb_right);
    case JcsRole::ankle_left:
      return has(Role::knee_left, Role::ankle_left, Role::toes_left);
    case JcsRole::ankle_right:
      return has(Role::knee_right, Role::ankle_right, Role::toes_right);
    case JcsRole::neck:
      return spine && has(Role::ear_left, Role::ear_right);
    case JcsRole::count_:
      break;
  }
  return false;
}

std::optional<SpineSections> spine_sections(const CanonicalPose& pose) {
  const auto& pelvis = at(pose, Role::pelvis);
  const auto& top = at(pose, Role::spine_top);
  if (!pelvis || !top) return std::nullopt;
  if (const auto& mid = at(pose, Role::spine_mid)) {
    return SpineSections{*mid - *pelvis, *top - *mid};
  }
  return SpineSections{*top - *pelvis, *top - *pelvis};
}

JcsSet compute_jcs(const CanonicalPose& pose) {
  JcsSet set;
  const auto spine = spine_sections(pose);

  for (Side side : {Side::right, Side::left}) {
    const int h = handedness(side);
    const LegRoles leg = leg_roles(side);
    const ArmRoles arm = arm_roles(side);

    if (spine && all_present(pose, leg.hip, leg.opposite_hip)) {
      const Vec3& hip = *at(pose, leg.hip);
      set[hip_jcs(side)] = try_build(Axis::z, hip - *at(pose, leg.opposite_hip), -spine->bottom,
                                     Axis::x, h, hip);
    }
    if (spine && all_present(pose, arm.shoulder, arm.opposite_shoulder)) {
      const Vec3& shoulder = *at(pose, arm.shoulder);
      set[shoulder_jcs(side)] = try_build(Axis::z, shoulder - *at(pose, arm.opposite_shoulder),
                                          -spine->top, Axis::x, h, shoulder);
    }
    if (all_present(pose, arm.shoulder, arm.elbow, arm.wrist)) {
      const Vec3& elbow = *at(pose, arm.elbow);
      set[elbow_jcs(side)] = try_build(Axis::y, *at(pose, arm.shoulder) - elbow,
                                       elbow - *at(pose, arm.wrist), Axis::z, h, elbow);
    }
    if (all_present(pose, leg.hip, leg.knee, leg.ankle)) {
      const Vec3& knee = *at(pose, leg.knee);
      set[knee_jcs(side)] = try_build(Axis::y, *at(pose, leg.hip) - knee,
                                      *at(pose, leg.ankle) - knee, Axis::z, h, knee);
    }
    if (all_present(pose, arm.elbow, arm.wrist, arm.thumb)) {
      const Vec3& wrist = *at(pose, arm.wrist);
      set[wrist_jcs(side)] = try_build(Axis::y, *at(pose, arm.elbow) - wrist,
                                       *at(pose, arm.thumb) - wrist, Axis::x, h, wrist);
    }
    if (all_present(pose, leg.knee, leg.ankle, leg.toes)) {
      const Vec3& ankle = *at(pose, leg.ankle);
      const Vec3 foot_base = at(pose, leg.foot_base).value_or(ankle);
      set[ankle_jcs(side)] = try_build(Axis::y, *at(pose, leg.knee) - ankle,
                                       foot_base - *at(pose, leg.toes), Axis::z, h, ankle);
    }
  }

  if (const auto& right_hip = set[JcsRole::hip_right]) {
    Frame3 lower = *right_hip;
    lower.origin = *at(pose, Role::pelvis);
    set[JcsRole::lower_proximal] = lower;
  }
  if (const auto& right_shoulder = set[JcsRole::shoulder_right]) {
    Frame3 upper = *right_shoulder;
    upper.origin = *at(pose, Role::spine_top);
    set[JcsRole::upper_proximal] = upper;
  }

  if (spine && all_present(pose, Role::ear_left, Role::ear_right)) {
    const Vec3 origin = at(pose, Role::neck_base).value_or(*at(pose, Role::spine_top));
    set[JcsRole::neck] = try_build(Axis::y, spine->top,
                                   *at(pose, Role::ear_right) - *at(pose, Role::ear_left), Axis::x,
                                   1, origin);
  }
  return set;
}

}  // namespace jointangles
