// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

#include "jointangles/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include <fmt/format.h>

#include "jointangles/error.hpp"

namespace jointangles {

namespace {

constexpr std::array<std::string_view, kRoleCount> kRoleNames = {
    "pelvis",         "spine_mid",      "spine_top",       "neck_base",
    "head",           "ear_left",       "ear_right",       "shoulder_left",
    "shoulder_right", "elbow_left",     "elbow_right",     "wrist_left",
    "wrist_right",    "hand_left",      "hand_right",      "thumb_left",
    "thumb_right",    "hip_left",       "hip_right",       "knee_left",
    "knee_right",     "ankle_left",     "ankle_right",     "foot_base_left",
    "foot_base_right", "toes_left",     "toes_right",      "small_toe_left",
    "small_toe_right",
};

constexpr std::array<Role, kRoleCount> make_all_roles() {
  std::array<Role, kRoleCount> roles{};
  for (std::size_t i = 0; i < kRoleCount; ++i) roles[i] = static_cast<Role>(i);
  return roles;
}
constexpr std::array<Role, kRoleCount> kAllRoles = make_all_roles();

const Vec3 kNaN = Vec3::Constant(std::numeric_limits<double>::quiet_NaN());

}  // namespace

std::string_view role_name(Role role) noexcept { return kRoleNames[index(role)]; }

std::optional<Role> role_from_name(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kRoleCount; ++i) {
    if (kRoleNames[i] == name) return static_cast<Role>(i);
  }
  return std::nullopt;
}

std::span<const Role> all_roles() noexcept { return kAllRoles; }

ArmRoles arm_roles(Side side) noexcept {
  if (side == Side::right) {
    return {Role::shoulder_right, Role::shoulder_left, Role::elbow_right,
            Role::wrist_right,    Role::hand_right,    Role::thumb_right};
  }
  return {Role::shoulder_left, Role::shoulder_right, Role::elbow_left,
          Role::wrist_left,    Role::hand_left,      Role::thumb_left};
}

LegRoles leg_roles(Side side) noexcept {
  if (side == Side::right) {
    return {Role::hip_right,       Role::hip_left,   Role::knee_right,    Role::ankle_right,
            Role::foot_base_right, Role::toes_right, Role::small_toe_right};
  }
  return {Role::hip_left,       Role::hip_right, Role::knee_left,    Role::ankle_left,
          Role::foot_base_left, Role::toes_left, Role::small_toe_left};
}

bool is_tree(std::size_t joint_count, std::span<const Bone> bones) {
  if (joint_count == 0) return false;
  if (bones.size() != joint_count - 1) return false;
  std::vector<std::vector<std::size_t>> adjacency(joint_count);
  for (const Bone& bone : bones) {
    if (bone.parent >= joint_count || bone.child >= joint_count) return false;
    if (bone.parent == bone.child) return false;
    adjacency[bone.parent].push_back(bone.child);
    adjacency[bone.child].push_back(bone.parent);
  }
  std::vector<bool> seen(joint_count, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t joint = frontier.front();
    frontier.pop();
    for (std::size_t next : adjacency[joint]) {
      if (!seen[next]) {
        seen[next] = true;
        ++reached;
        frontier.push(next);
      }
    }
  }
  // J-1 edges plus connectivity rules out cycles.
  return reached == joint_count;
}

std::shared_ptr<const KeypointSetDescriptor> KeypointSetDescriptor::create(
    std::string id, std::vector<std::string> joint_names, std::vector<Bone> bones,
    std::vector<std::pair<Role, RoleSource>> roles) {
  const std::size_t joints = joint_names.size();
  if (!is_tree(joints, bones)) {
    throw StructuralError(
        fmt::format("descriptor '{}': bones do not form a tree over {} joints", id, joints));
  }

  std::shared_ptr<KeypointSetDescriptor> descriptor(new KeypointSetDescriptor());
  descriptor->parents_.assign(joints, std::nullopt);
  for (const Bone& bone : bones) {
    if (descriptor->parents_[bone.child]) {
      throw StructuralError(fmt::format("descriptor '{}': joint '{}' has two parents", id,
                                        joint_names[bone.child]));
    }
    descriptor->parents_[bone.child] = bone.parent;
  }

  std::vector<bool> used(joints, false);
  for (const auto& [role, source] : roles) {
    auto check_index = [&](std::size_t joint) {
      if (joint >= joints) {
        throw StructuralError(fmt::format("descriptor '{}': role {} maps to joint {} (of {})",
                                          id, role_name(role), joint, joints));
      }
    };
    check_index(source.first);
    if (source.second) check_index(*source.second);
    if (descriptor->sources_[index(role)]) {
      throw StructuralError(
          fmt::format("descriptor '{}': role {} mapped twice", id, role_name(role)));
    }
    if (!source.is_midpoint()) {
      if (used[source.first]) {
        throw StructuralError(fmt::format("descriptor '{}': joint '{}' mapped to two roles", id,
                                          joint_names[source.first]));
      }
      used[source.first] = true;
    }
    descriptor->sources_[index(role)] = source;
  }

  const auto& pelvis = descriptor->sources_[index(Role::pelvis)];
  if (!pelvis) {
    throw StructuralError(fmt::format("descriptor '{}': pelvis role is not mapped", id));
  }
  std::size_t root = joints;
  for (std::size_t j = 0; j < joints; ++j) {
    if (!descriptor->parents_[j]) root = j;
  }
  if (root != pelvis->first) {
    throw StructuralError(fmt::format("descriptor '{}': bone tree is rooted at '{}', not at the "
                                      "pelvis source '{}'",
                                      id, joint_names[root], joint_names[pelvis->first]));
  }

  descriptor->id_ = std::move(id);
  descriptor->joint_names_ = std::move(joint_names);
  descriptor->bones_ = std::move(bones);
  descriptor->root_ = root;
  return descriptor;
}

std::optional<std::size_t> KeypointSetDescriptor::joint_index(std::string_view name) const noexcept {
  const auto it = std::find(joint_names_.begin(), joint_names_.end(), name);
  if (it == joint_names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - joint_names_.begin());
}

bool KeypointSetDescriptor::is_role_joint(std::size_t joint) const noexcept {
  return std::any_of(sources_.begin(), sources_.end(), [joint](const auto& source) {
    return source && !source->is_midpoint() && source->first == joint;
  });
}

std::string KeypointSetDescriptor::endpoint_name(Role role) const {
  const auto& source = sources_[index(role)];
  if (!source || source->is_midpoint()) return std::string(role_name(role));
  return joint_names_[source->first];
}

std::string KeypointSetDescriptor::bone_key(const Bone& bone) const {
  return joint_names_[bone.parent] + "-" + joint_names_[bone.child];
}

// ---------------------------------------------------------------------------
// Registry

namespace {

DescriptorPtr make_kinect25() {
  std::vector<std::string> names = {
      "SpineBase",    "SpineMid",     "Neck",          "Head",         "ShoulderLeft",
      "ElbowLeft",    "WristLeft",    "HandLeft",      "ShoulderRight", "ElbowRight",
      "WristRight",   "HandRight",    "HipLeft",       "KneeLeft",     "AnkleLeft",
      "FootLeft",     "HipRight",     "KneeRight",     "AnkleRight",   "FootRight",
      "SpineShoulder", "HandTipLeft", "ThumbLeft",     "HandTipRight", "ThumbRight",
  };
  std::vector<Bone> bones = {
      {0, 1},   {1, 20},  {20, 2},  {2, 3},   {20, 4},  {4, 5},   {5, 6},   {6, 7},
      {7, 21},  {6, 22},  {20, 8},  {8, 9},   {9, 10},  {10, 11}, {11, 23}, {10, 24},
      {0, 12},  {12, 13}, {13, 14}, {14, 15}, {0, 16},  {16, 17}, {17, 18}, {18, 19},
  };
  std::vector<std::pair<Role, RoleSource>> roles = {
      {Role::pelvis, {0, {}}},          {Role::spine_mid, {1, {}}},
      {Role::spine_top, {20, {}}},      {Role::neck_base, {2, {}}},
      {Role::head, {3, {}}},            {Role::shoulder_left, {4, {}}},
      {Role::elbow_left, {5, {}}},      {Role::wrist_left, {6, {}}},
      {Role::hand_left, {7, {}}},       {Role::thumb_left, {22, {}}},
      {Role::shoulder_right, {8, {}}},  {Role::elbow_right, {9, {}}},
      {Role::wrist_right, {10, {}}},    {Role::hand_right, {11, {}}},
      {Role::thumb_right, {24, {}}},    {Role::hip_left, {12, {}}},
      {Role::knee_left, {13, {}}},      {Role::ankle_left, {14, {}}},
      {Role::toes_left, {15, {}}},      {Role::hip_right, {16, {}}},
      {Role::knee_right, {17, {}}},     {Role::ankle_right, {18, {}}},
      {Role::toes_right, {19, {}}},
  };
  return KeypointSetDescriptor::create("kinect25", std::move(names), std::move(bones),
                                       std::move(roles));
}

DescriptorPtr make_openpose25() {
  std::vector<std::string> names = {
      "Nose",   "Neck",   "RShoulder", "RElbow",    "RWrist",  "LShoulder", "LElbow",
      "LWrist", "MidHip", "RHip",      "RKnee",     "RAnkle",  "LHip",      "LKnee",
      "LAnkle", "REye",   "LEye",      "REar",      "LEar",    "LBigToe",   "LSmallToe",
      "LHeel",  "RBigToe", "RSmallToe", "RHeel",
  };
  std::vector<Bone> bones = {
      {8, 1},   {1, 2},   {2, 3},   {3, 4},   {1, 5},   {5, 6},   {6, 7},   {8, 9},
      {9, 10},  {10, 11}, {8, 12},  {12, 13}, {13, 14}, {1, 0},   {0, 15},  {15, 17},
      {0, 16},  {16, 18}, {14, 19}, {19, 20}, {14, 21}, {11, 22}, {22, 23}, {11, 24},
  };
  std::vector<std::pair<Role, RoleSource>> roles = {
      {Role::head, {0, {}}},             {Role::spine_top, {1, {}}},
      {Role::shoulder_right, {2, {}}},   {Role::elbow_right, {3, {}}},
      {Role::wrist_right, {4, {}}},      {Role::shoulder_left, {5, {}}},
      {Role::elbow_left, {6, {}}},       {Role::wrist_left, {7, {}}},
      {Role::pelvis, {8, {}}},           {Role::hip_right, {9, {}}},
      {Role::knee_right, {10, {}}},      {Role::ankle_right, {11, {}}},
      {Role::hip_left, {12, {}}},        {Role::knee_left, {13, {}}},
      {Role::ankle_left, {14, {}}},      {Role::ear_right, {17, {}}},
      {Role::ear_left, {18, {}}},        {Role::toes_left, {19, {}}},
      {Role::small_toe_left, {20, {}}},  {Role::foot_base_left, {21, {}}},
      {Role::toes_right, {22, {}}},      {Role::small_toe_right, {23, {}}},
      {Role::foot_base_right, {24, {}}},
  };
  return KeypointSetDescriptor::create("openpose25", std::move(names), std::move(bones),
                                       std::move(roles));
}

DescriptorPtr make_coco17() {
  std::vector<std::string> names = {
      "nose",        "left_eye",   "right_eye",      "left_ear",    "right_ear",
      "left_shoulder", "right_shoulder", "left_elbow", "right_elbow", "left_wrist",
      "right_wrist", "left_hip",   "right_hip",      "left_knee",   "right_knee",
      "left_ankle",  "right_ankle",
  };
  // COCO has no mid-hip keypoint, so the tree is rooted at the first source of
  // the derived pelvis.
  std::vector<Bone> bones = {
      {11, 12}, {11, 13}, {13, 15}, {12, 14}, {14, 16}, {11, 5}, {5, 6}, {5, 7},
      {7, 9},   {6, 8},   {8, 10},  {5, 0},   {0, 1},   {0, 2},  {1, 3}, {2, 4},
  };
  std::vector<std::pair<Role, RoleSource>> roles = {
      {Role::pelvis, {11, 12}},         {Role::spine_top, {5, 6}},
      {Role::head, {0, {}}},            {Role::ear_left, {3, {}}},
      {Role::ear_right, {4, {}}},       {Role::shoulder_left, {5, {}}},
      {Role::shoulder_right, {6, {}}},  {Role::elbow_left, {7, {}}},
      {Role::elbow_right, {8, {}}},     {Role::wrist_left, {9, {}}},
      {Role::wrist_right, {10, {}}},    {Role::hip_left, {11, {}}},
      {Role::hip_right, {12, {}}},      {Role::knee_left, {13, {}}},
      {Role::knee_right, {14, {}}},     {Role::ankle_left, {15, {}}},
      {Role::ankle_right, {16, {}}},
  };
  return KeypointSetDescriptor::create("coco17", std::move(names), std::move(bones),
                                       std::move(roles));
}

const std::vector<DescriptorPtr>& registry() {
  static const std::vector<DescriptorPtr> descriptors = {make_kinect25(), make_openpose25(),
                                                         make_coco17()};
  return descriptors;
}

}  // namespace

DescriptorPtr find_descriptor(std::string_view id) {
  for (const auto& descriptor : registry()) {
    if (descriptor->id() == id) return descriptor;
  }
  throw UnsupportedFormatError(fmt::format("unknown keypoint set '{}'", id));
}

std::vector<std::string> registered_formats() {
  std::vector<std::string> ids;
  for (const auto& descriptor : registry()) ids.push_back(descriptor->id());
  return ids;
}

// ---------------------------------------------------------------------------
// Pose / sequence

Pose::Pose(std::size_t joint_count) : positions_(joint_count, kNaN), validity_(joint_count, false) {}

Pose::Pose(std::vector<Vec3> positions, std::vector<bool> validity)
    : positions_(std::move(positions)), validity_(std::move(validity)) {
  if (positions_.size() != validity_.size()) {
    throw StructuralError(fmt::format("pose has {} positions but {} validity flags",
                                      positions_.size(), validity_.size()));
  }
  for (std::size_t j = 0; j < positions_.size(); ++j) {
    if (!validity_[j] || !positions_[j].allFinite()) invalidate(j);
  }
}

std::optional<Vec3> Pose::get(std::size_t joint) const {
  if (!validity_[joint]) return std::nullopt;
  return positions_[joint];
}

void Pose::set(std::size_t joint, const Vec3& position) {
  if (!position.allFinite()) {
    invalidate(joint);
    return;
  }
  positions_[joint] = position;
  validity_[joint] = true;
}

void Pose::invalidate(std::size_t joint) {
  positions_[joint] = kNaN;
  validity_[joint] = false;
}

std::size_t Pose::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count(validity_.begin(), validity_.end(), true));
}

bool operator==(const Pose& a, const Pose& b) {
  if (a.validity_ != b.validity_) return false;
  for (std::size_t j = 0; j < a.positions_.size(); ++j) {
    if (a.validity_[j] && a.positions_[j] != b.positions_[j]) return false;
  }
  return true;
}

void MotionSequence::check() const {
  if (!descriptor) throw StructuralError("sequence has no descriptor");
  if (!(fps > 0.0) || !std::isfinite(fps)) {
    throw ArgumentError(fmt::format("fps must be positive, got {}", fps));
  }
  for (std::size_t f = 0; f < frames.size(); ++f) {
    if (frames[f].joint_count() != descriptor->joint_count()) {
      throw StructuralError(fmt::format("frame {} has {} joints, format '{}' has {}", f,
                                        frames[f].joint_count(), descriptor->id(),
                                        descriptor->joint_count()));
    }
  }
}

// ---------------------------------------------------------------------------
// Bone lengths

void BoneLengths::set(std::string key, double length) {
  entries_[std::move(key)] = Entry{length, false};
}

void BoneLengths::set_missing(std::string key) { entries_[std::move(key)] = Entry{0.0, true}; }

std::optional<double> BoneLengths::get(std::string_view key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end() || it->second.missing) return std::nullopt;
  return it->second.length;
}

bool BoneLengths::missing(std::string_view key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() || it->second.missing;
}

std::vector<std::string> BoneLengths::keys() const {
  std::vector<std::string> keys;
  keys.reserve(entries_.size());
  for (const auto& [key, entry] : entries_) keys.push_back(key);
  return keys;
}

// ---------------------------------------------------------------------------
// Rigid transform

void RigidTransform::check() const {
  constexpr double kTolerance = 1e-12;
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw InvalidTransformError("transform has non-finite entries");
  }
  const double orthogonality = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (orthogonality > kTolerance) {
    throw InvalidTransformError(
        fmt::format("rotation is not orthonormal (max |R^T R - I| = {:.3e})", orthogonality));
  }
  const double det = rotation.determinant();
  if (std::abs(det - 1.0) > kTolerance) {
    throw InvalidTransformError(fmt::format("rotation determinant is {}, expected +1", det));
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidTransformError(fmt::format("scale must be positive, got {}", scale));
  }
}

// ---------------------------------------------------------------------------
// Canonical view

CanonicalPose to_canonical(const Pose& pose, const KeypointSetDescriptor& descriptor) {
  CanonicalPose canonical{};
  for (Role role : all_roles()) {
    const auto& source = descriptor.source(role);
    if (!source) continue;
    const auto first = pose.get(source->first);
    if (!first) continue;
    if (!source->second) {
      canonical[index(role)] = *first;
      continue;
    }
    const auto second = pose.get(*source->second);
    if (second) canonical[index(role)] = 0.5 * (*first + *second);
  }
  return canonical;
}

std::vector<Segment> canonical_segments(const KeypointSetDescriptor& descriptor) {
  std::vector<Segment> segments;
  auto add = [&](Role parent, Role child) {
    if (!descriptor.has_role(parent) || !descriptor.has_role(child)) return;
    segments.push_back(
        {parent, child, descriptor.endpoint_name(parent) + "-" + descriptor.endpoint_name(child)});
  };
  auto first_mapped = [&](Role preferred, Role fallback) {
    return descriptor.has_role(preferred) ? preferred : fallback;
  };

  add(Role::pelvis, Role::hip_right);
  add(Role::pelvis, Role::hip_left);
  add(Role::pelvis, Role::spine_mid);
  add(first_mapped(Role::spine_mid, Role::pelvis), Role::spine_top);
  add(Role::spine_top, Role::shoulder_right);
  add(Role::spine_top, Role::shoulder_left);
  add(Role::spine_top, Role::neck_base);
  add(first_mapped(Role::neck_base, Role::spine_top), Role::head);
  add(Role::head, Role::ear_right);
  add(Role::head, Role::ear_left);
  for (Side side : {Side::right, Side::left}) {
    const ArmRoles arm = arm_roles(side);
    add(arm.shoulder, arm.elbow);
    add(arm.elbow, arm.wrist);
    add(arm.wrist, arm.hand);
    add(arm.wrist, arm.thumb);
  }
  for (Side side : {Side::right, Side::left}) {
    const LegRoles leg = leg_roles(side);
    add(leg.hip, leg.knee);
    add(leg.knee, leg.ankle);
    add(leg.ankle, leg.foot_base);
    add(first_mapped(leg.foot_base, leg.ankle), leg.toes);
    add(leg.toes, leg.small_toe);
  }
  return segments;
}

}  // namespace jointangles
