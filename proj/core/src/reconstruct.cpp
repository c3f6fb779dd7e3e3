// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

#include "jointangles/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

#include <Eigen/Geometry>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "jointangles/error.hpp"
#include "jointangles/parallel.hpp"
#include "jointangles/sequence_ops.hpp"

namespace jointangles {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRangeSlack = 1e-9;
constexpr double kRotationTolerance = 1e-6;

Mat3 rot_y(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitY()).toRotationMatrix(); }
Mat3 rot_z(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix(); }

Joint side_joint(Joint right, Side side) {
  return side == Side::right ? right : static_cast<Joint>(static_cast<int>(right) + 1);
}

std::string channel_label(ChannelId id) {
  return fmt::format("{}.{}", joint_name(id.joint), channel_name(id.channel));
}

struct Binding {
  std::vector<ChannelId> channels;
  Placement kind = Placement::exact;
};

std::vector<ChannelId> spine_channels(const KeypointSetDescriptor& d) {
  std::vector<ChannelId> out;
  if (d.has_role(Role::spine_mid)) out.push_back({Joint::spine, Channel::flexion});
  out.push_back({Joint::spine, Channel::abduction});
  out.push_back({Joint::spine, Channel::axial});
  return out;
}

// Channels read when placing `role` from its parent.
Binding binding(Role role, const KeypointSetDescriptor& d) {
  const bool mid = d.has_role(Role::spine_mid);
  const bool ears = d.has_role(Role::ear_left) && d.has_role(Role::ear_right);
  auto neck_reference = [&] {
    return mid ? spine_channels(d) : std::vector<ChannelId>{{Joint::spine, Channel::axial}};
  };
  switch (role) {
    case Role::pelvis:
    case Role::hip_left:
    case Role::hip_right:
    case Role::spine_mid:
      return {};
    case Role::spine_top:
      return {mid ? spine_channels(d) : std::vector<ChannelId>{}, Placement::exact};
    case Role::shoulder_left:
    case Role::shoulder_right:
      return {spine_channels(d), Placement::exact};
    case Role::neck_base:
      return {neck_reference(), Placement::exact};
    case Role::head: {
      auto channels = neck_reference();
      channels.push_back({Joint::neck, Channel::flexion});
      channels.push_back({Joint::neck, Channel::abduction});
      if (ears) channels.push_back({Joint::neck, Channel::axial});
      return {channels, Placement::exact};
    }
    case Role::ear_left:
    case Role::ear_right: {
      auto channels = neck_reference();
      channels.push_back({Joint::neck, Channel::axial});
      return {channels, Placement::representative};
    }
    default:
      break;
  }
  for (Side side : {Side::right, Side::left}) {
    const ArmRoles arm = arm_roles(side);
    const Joint shoulder = side_joint(Joint::shoulder_right, side);
    const Joint elbow = side_joint(Joint::elbow_right, side);
    const Joint wrist = side_joint(Joint::wrist_right, side);
    if (role == arm.elbow) return {{{shoulder, Channel::flexion}, {shoulder, Channel::abduction}}};
    if (role == arm.wrist) return {{{shoulder, Channel::axial}, {elbow, Channel::flexion}}};
    if (role == arm.hand) {
      return {{{elbow, Channel::axial}, {wrist, Channel::flexion}, {wrist, Channel::abduction}}};
    }
    if (role == arm.thumb) return {{{elbow, Channel::axial}}, Placement::representative};

    const LegRoles leg = leg_roles(side);
    const Joint hip = side_joint(Joint::hip_right, side);
    const Joint knee = side_joint(Joint::knee_right, side);
    const Joint ankle = side_joint(Joint::ankle_right, side);
    if (role == leg.knee) return {{{hip, Channel::flexion}, {hip, Channel::abduction}}};
    if (role == leg.ankle) return {{{hip, Channel::axial}, {knee, Channel::flexion}}};
    if (role == leg.toes) {
      // With a heel keypoint the foot starts at an unplaced point.
      if (d.has_role(leg.foot_base)) return {{}, Placement::unavailable};
      return {{{knee, Channel::axial}, {ankle, Channel::flexion}}};
    }
    if (role == leg.small_toe) return {{{ankle, Channel::abduction}}, Placement::representative};
    if (role == leg.foot_base) return {{}, Placement::unavailable};
  }
  return {{}, Placement::unavailable};
}

bool is_rotation(const Mat3& r) {
  return ((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= kRotationTolerance) &&
         std::abs(r.determinant() - 1.0) <= kRotationTolerance;
}

class Builder {
 public:
  Builder(const JointAngles& angles, const BoneLengths& lengths, const FkChain& chain)
      : angles_(angles), lengths_(lengths), chain_(chain) {}

  std::optional<double> channel(Joint joint, Channel ch) {
    const ChannelId id{joint, ch};
    const auto value = angles_.get(id);
    if (!value) {
      note(channel_label(id));
      return std::nullopt;
    }
    const auto [lo, hi] = channel_range(id);
    if (!std::isfinite(*value) || *value < lo - kRangeSlack || *value > hi + kRangeSlack) {
      throw DomainError(fmt::format("{} = {} is outside [{}, {}]", channel_label(id), *value, lo, hi));
    }
    return value;
  }

  std::optional<double> length(Role role) {
    const FkLink* link = chain_.link(role);
    if (link == nullptr) return std::nullopt;
    const auto value = lengths_.get(link->length_key);
    if (!value) note("length " + link->length_key);
    return value;
  }

  const std::optional<Vec3>& at(Role role) const { return pose_[index(role)]; }

  void place(Role role, const Vec3& position) {
    if (chain_.role_placement(role) != Placement::unavailable) pose_[index(role)] = position;
  }

  void note(std::string what) {
    if (std::find(missing_.begin(), missing_.end(), what) == missing_.end()) {
      missing_.push_back(std::move(what));
    }
  }

  Reconstruction finish() {
    Reconstruction out;
    const KeypointSetDescriptor& d = *chain_.descriptor();
    out.pose = Pose(d.joint_count());
    for (Role role : all_roles()) {
      if (chain_.role_placement(role) == Placement::unavailable) continue;
      const auto& position = pose_[index(role)];
      if (!position) {
        out.blocked.push_back(role);
        continue;
      }
      const auto& source = d.source(role);
      if (source && !source->is_midpoint()) out.pose.set(source->first, *position);
    }
    out.canonical = pose_;
    out.missing = std::move(missing_);
    return out;
  }

 private:
  const JointAngles& angles_;
  const BoneLengths& lengths_;
  const FkChain& chain_;
  CanonicalPose pose_{};
  std::vector<std::string> missing_;
};

// Arm or leg below the shoulder/hip. `bend` +1 places the forearm toward +x
// of the elbow frame, -1 places the lower leg toward -x of the knee frame.
// Returns the rebuilt elbow/knee frame when the distal joint was placed.
struct LimbFrames {
  std::optional<Mat3> hinge;
};

LimbFrames place_limb(Builder& b, const Mat3& proximal, int h, Role root, Role middle, Role end,
                      Joint proximal_joint, Joint hinge_joint, int bend,
                      const KeypointSetDescriptor& d) {
  LimbFrames frames;
  const auto& root_pos = b.at(root);
  if (!root_pos || !d.has_role(middle)) return frames;
  const auto flexion = b.channel(proximal_joint, Channel::flexion);
  const auto abduction = b.channel(proximal_joint, Channel::abduction);
  const auto l_upper = b.length(middle);
  if (!flexion || !abduction || !l_upper) return frames;
  const Vec3 middle_pos =
      *root_pos + *l_upper * (proximal * spherical_z_direction(*flexion, *abduction, h));
  b.place(middle, middle_pos);

  if (!d.has_role(end)) return frames;
  const auto twist = b.channel(proximal_joint, Channel::axial);
  const auto hinge = b.channel(hinge_joint, Channel::flexion);
  const auto l_lower = b.length(end);
  if (!twist || !hinge || !l_lower) return frames;
  const Mat3 hinge_frame = proximal * alignment_rotation(*flexion, *abduction, h) *
                           rot_y(static_cast<double>(h) * *twist);
  const Vec3 local(static_cast<double>(bend) * std::sin(*hinge), std::cos(*hinge), 0.0);
  b.place(end, middle_pos + *l_lower * (hinge_frame * local));
  frames.hinge = hinge_frame;
  return frames;
}

Mat3 distal_frame(const Mat3& hinge_frame, double hinge, int bend, int h, double twist) {
  const double align = bend > 0 ? kPi - hinge : hinge - kPi;
  return hinge_frame * rot_z(align) * rot_y(static_cast<double>(h) * twist);
}

}  // namespace

std::string_view placement_name(Placement placement) noexcept {
  switch (placement) {
    case Placement::exact:
      return "exact";
    case Placement::representative:
      return "representative";
    case Placement::unavailable:
      return "unavailable";
  }
  return "unavailable";
}

FkChain FkChain::build(DescriptorPtr descriptor) {
  if (!descriptor) throw ArgumentError("FkChain needs a descriptor");
  FkChain chain;
  chain.descriptor_ = std::move(descriptor);
  const KeypointSetDescriptor& d = *chain.descriptor_;
  chain.layout_ = channel_layout(d);
  chain.placement_.fill(Placement::unavailable);
  chain.placement_[index(Role::pelvis)] = Placement::exact;

  auto in_layout = [&](const ChannelId& id) {
    return std::find(chain.layout_.begin(), chain.layout_.end(), id) != chain.layout_.end();
  };
  for (const Segment& segment : canonical_segments(d)) {
    FkLink link{segment.child, segment.parent, segment.key, {}, Placement::unavailable};
    Binding bind = binding(segment.child, d);
    link.channels = bind.channels;
    const bool parent_placed = chain.placement_[index(segment.parent)] != Placement::unavailable;
    const bool channels_known = std::all_of(bind.channels.begin(), bind.channels.end(), in_layout);
    if (bind.kind != Placement::unavailable && parent_placed && channels_known) {
      link.placement = bind.kind;
    }
    chain.placement_[index(segment.child)] = link.placement;
    chain.links_.push_back(std::move(link));
  }

  chain.joint_placement_.assign(d.joint_count(), Placement::unavailable);
  for (Role role : all_roles()) {
    const auto& source = d.source(role);
    if (source && !source->is_midpoint()) {
      chain.joint_placement_[source->first] = chain.placement_[index(role)];
    }
  }
  return chain;
}

const FkLink* FkChain::link(Role role) const noexcept {
  for (const FkLink& link : links_) {
    if (link.role == role) return &link;
  }
  return nullptr;
}

std::vector<std::size_t> FkChain::joints_with(Placement placement) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < joint_placement_.size(); ++j) {
    if (joint_placement_[j] == placement) out.push_back(j);
  }
  return out;
}

Reconstruction reconstruct(const JointAngles& angles, const BoneLengths& lengths,
                           const FkChain& chain) {
  Builder b(angles, lengths, chain);
  const KeypointSetDescriptor& d = *chain.descriptor();
  if (!angles.root) {
    b.note("root");
    return b.finish();
  }
  const Vec3 pelvis = angles.root->position;
  const Mat3 lower = angles.root->orientation;
  if (!pelvis.allFinite() || !is_rotation(lower)) {
    throw DomainError("root orientation is not a rotation matrix or the root is not finite");
  }
  b.place(Role::pelvis, pelvis);

  for (Side side : {Side::right, Side::left}) {
    const LegRoles leg = leg_roles(side);
    if (!d.has_role(leg.hip)) continue;
    if (const auto l = b.length(leg.hip)) {
      b.place(leg.hip, pelvis + static_cast<double>(handedness(side)) * *l * lower.col(2));
    }
  }

  // Torso.
  const bool mid = d.has_role(Role::spine_mid);
  std::optional<Vec3> spine_mid;
  if (mid) {
    if (const auto l = b.length(Role::spine_mid)) spine_mid = pelvis + *l * lower.col(1);
    if (spine_mid) b.place(Role::spine_mid, *spine_mid);
  }
  std::optional<Mat3> upper;
  std::optional<Mat3> neck_reference;
  const bool shoulders = d.has_role(Role::shoulder_left) || d.has_role(Role::shoulder_right);
  if (shoulders || d.has_role(Role::head)) {
    const auto flexion = mid ? b.channel(Joint::spine, Channel::flexion) : std::optional<double>(0.0);
    const auto lateral = b.channel(Joint::spine, Channel::abduction);
    const auto axial = b.channel(Joint::spine, Channel::axial);
    if (flexion && lateral && axial) upper = lower * spine_rotation(*flexion, *lateral, *axial);
    if (mid) {
      neck_reference = upper;
    } else if (axial) {
      neck_reference = lower * rot_y(*axial);
    }
  }
  std::optional<Vec3> spine_top;
  if (const auto l = b.length(Role::spine_top)) {
    if (mid && spine_mid && upper) spine_top = *spine_mid + *l * upper->col(1);
    if (!mid) spine_top = pelvis + *l * lower.col(1);
  }
  if (spine_top) b.place(Role::spine_top, *spine_top);

  if (spine_top && upper) {
    for (Side side : {Side::right, Side::left}) {
      const ArmRoles arm = arm_roles(side);
      if (!d.has_role(arm.shoulder)) continue;
      if (const auto l = b.length(arm.shoulder)) {
        b.place(arm.shoulder, *spine_top + static_cast<double>(handedness(side)) * *l * upper->col(2));
      }
    }
  }

  // Neck and head.
  if (spine_top && neck_reference && d.has_role(Role::head)) {
    std::optional<Vec3> origin = spine_top;
    if (d.has_role(Role::neck_base)) {
      origin.reset();
      if (const auto l = b.length(Role::neck_base)) {
        origin = *spine_top + *l * neck_reference->col(1);
        b.place(Role::neck_base, *origin);
      }
    }
    const bool ears = d.has_role(Role::ear_left) && d.has_role(Role::ear_right);
    std::optional<Mat3> neck = ears ? std::nullopt : neck_reference;
    if (ears) {
      if (const auto twist = b.channel(Joint::neck, Channel::axial)) {
        neck = *neck_reference * rot_y(*twist);
      }
    }
    const auto flexion = b.channel(Joint::neck, Channel::flexion);
    const auto lateral = b.channel(Joint::neck, Channel::abduction);
    const auto l = b.length(Role::head);
    if (origin && neck && flexion && lateral && l) {
      const Vec3 head = *origin + *l * (*neck * spherical_x_direction(*flexion, *lateral, 1));
      b.place(Role::head, head);
      if (ears) {
        if (const auto lr = b.length(Role::ear_right)) b.place(Role::ear_right, head + *lr * neck->col(2));
        if (const auto ll = b.length(Role::ear_left)) b.place(Role::ear_left, head - *ll * neck->col(2));
      }
    }
  }

  // Arms.
  for (Side side : {Side::right, Side::left}) {
    if (!upper) break;
    const int h = handedness(side);
    const ArmRoles arm = arm_roles(side);
    const LimbFrames frames = place_limb(b, *upper, h, arm.shoulder, arm.elbow, arm.wrist,
                                         side_joint(Joint::shoulder_right, side),
                                         side_joint(Joint::elbow_right, side), +1, d);
    const auto& wrist = b.at(arm.wrist);
    if (!frames.hinge || !wrist) continue;
    if (!d.has_role(arm.thumb) && !d.has_role(arm.hand)) continue;
    const Joint elbow = side_joint(Joint::elbow_right, side);
    const auto twist = b.channel(elbow, Channel::axial);
    if (!twist) continue;
    const double hinge = *b.channel(elbow, Channel::flexion);
    const Mat3 wrist_frame = distal_frame(*frames.hinge, hinge, +1, h, *twist);
    if (d.has_role(arm.hand)) {
      const Joint wj = side_joint(Joint::wrist_right, side);
      const auto flexion = b.channel(wj, Channel::flexion);
      const auto lateral = b.channel(wj, Channel::abduction);
      const auto l = b.length(arm.hand);
      if (flexion && lateral && l) {
        Vec3 local = spherical_x_direction(*flexion, *lateral, h);
        local.y() = -local.y();
        b.place(arm.hand, *wrist + *l * (wrist_frame * local));
      }
    }
    if (d.has_role(arm.thumb)) {
      if (const auto l = b.length(arm.thumb)) {
        b.place(arm.thumb, *wrist + *l * static_cast<double>(h) * wrist_frame.col(2));
      }
    }
  }

  // Legs.
  for (Side side : {Side::right, Side::left}) {
    const int h = handedness(side);
    const LegRoles leg = leg_roles(side);
    const LimbFrames frames = place_limb(b, lower, h, leg.hip, leg.knee, leg.ankle,
                                         side_joint(Joint::hip_right, side),
                                         side_joint(Joint::knee_right, side), -1, d);
    const auto& ankle = b.at(leg.ankle);
    if (!frames.hinge || !ankle) continue;
    if (chain.role_placement(leg.toes) == Placement::unavailable) continue;
    const Joint knee = side_joint(Joint::knee_right, side);
    const Joint ankle_joint = side_joint(Joint::ankle_right, side);
    const auto twist = b.channel(knee, Channel::axial);
    const auto foot_angle = b.channel(ankle_joint, Channel::flexion);
    const auto l = b.length(leg.toes);
    if (!twist || !foot_angle || !l) continue;
    const double hinge = *b.channel(knee, Channel::flexion);
    const Mat3 ankle_frame = distal_frame(*frames.hinge, hinge, -1, h, *twist);
    const Vec3 toes =
        *ankle + *l * (ankle_frame * Vec3(std::sin(*foot_angle), std::cos(*foot_angle), 0.0));
    b.place(leg.toes, toes);
    if (d.has_role(leg.small_toe)) {
      const auto toe_angle = b.channel(ankle_joint, Channel::abduction);
      const auto ls = b.length(leg.small_toe);
      if (toe_angle && ls) {
        const Vec3 lateral = static_cast<double>(h) * ankle_frame.col(2);
        const Vec3 dir = std::cos(*toe_angle) * lateral - std::sin(*toe_angle) * ankle_frame.col(0);
        b.place(leg.small_toe, toes + *ls * dir);
      }
    }
  }
  return b.finish();
}

Pose angles_to_pose(const JointAngles& angles, const BoneLengths& lengths, const FkChain& chain) {
  Reconstruction r = reconstruct(angles, lengths, chain);
  if (!r.blocked.empty()) {
    std::vector<std::string_view> roles;
    for (Role role : r.blocked) roles.push_back(role_name(role));
    throw ReconstructionGapError(fmt::format("cannot place {}: missing {}", fmt::join(roles, ", "),
                                             fmt::join(r.missing, ", ")));
  }
  return std::move(r.pose);
}

MotionSequence sequence_from_angles(const AngleSequence& angles, bool allow_gaps, std::size_t threads) {
  const FkChain chain = FkChain::build(angles.descriptor);
  MotionSequence out{angles.descriptor, angles.fps, {}};
  out.frames.resize(angles.frames.size());
  std::vector<std::exception_ptr> errors(angles.frames.size());
  parallel_for(angles.frames.size(), threads, [&](std::size_t i) {
    try {
      if (allow_gaps) {
        out.frames[i] = reconstruct(angles.frames[i], angles.bone_lengths, chain).pose;
      } else {
        out.frames[i] = angles_to_pose(angles.frames[i], angles.bone_lengths, chain);
      }
    } catch (const ReconstructionGapError& e) {
      errors[i] = std::make_exception_ptr(
          ReconstructionGapError(fmt::format("frame {}: {}", i, e.what())));
    } catch (const DomainError& e) {
      errors[i] = std::make_exception_ptr(DomainError(fmt::format("frame {}: {}", i, e.what())));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  return out;
}

double RoundtripReport::relative_max_error() const noexcept {
  return skeleton_height > 0.0 ? max_error / skeleton_height : 0.0;
}

RoundtripReport sequence_roundtrip_report(const MotionSequence& seq, std::size_t threads) {
  seq.check();
  const KeypointSetDescriptor& d = *seq.descriptor;
  const AngleSequence angles = sequence_to_angles(seq, threads);
  const FkChain chain = FkChain::build(seq.descriptor);

  RoundtripReport report;
  report.format = d.id();
  report.frames = seq.frames.size();
  report.skeleton_height = skeleton_height(seq);
  report.frame_max_error.assign(seq.frames.size(), 0.0);
  std::vector<double> representative_error(seq.frames.size(), 0.0);

  parallel_for(seq.frames.size(), threads, [&](std::size_t i) {
    const Reconstruction r = reconstruct(angles.frames[i], angles.bone_lengths, chain);
    const Pose& original = seq.frames[i];
    for (std::size_t j = 0; j < d.joint_count(); ++j) {
      if (!original.valid(j) || !r.pose.valid(j)) continue;
      const double error = (original.position(j) - r.pose.position(j)).norm();
      if (chain.joint_placement(j) == Placement::exact) {
        report.frame_max_error[i] = std::max(report.frame_max_error[i], error);
      } else if (chain.joint_placement(j) == Placement::representative) {
        representative_error[i] = std::max(representative_error[i], error);
      }
    }
  });

  double sum = 0.0;
  for (double e : report.frame_max_error) {
    report.max_error = std::max(report.max_error, e);
    sum += e;
  }
  if (!report.frame_max_error.empty()) {
    report.mean_error = sum / static_cast<double>(report.frame_max_error.size());
  }
  for (double e : representative_error) {
    report.representative_max_error = std::max(report.representative_max_error, e);
  }
  for (std::size_t j : chain.joints_with(Placement::representative)) {
    report.representative.push_back(d.joint_names()[j]);
  }
  for (std::size_t j : chain.joints_with(Placement::unavailable)) {
    report.unreconstructable.push_back(d.joint_names()[j]);
  }
  for (std::size_t r = 0; r < kJcsRoleCount; ++r) {
    const auto role = static_cast<JcsRole>(r);
    if (!jcs_supported(d, role)) report.orientation_unavailable.emplace_back(jcs_role_name(role));
  }
  return report;
}

}  // namespace jointangles
