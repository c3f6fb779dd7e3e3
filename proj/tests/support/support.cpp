// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <limits>

namespace jointangles::testing {

namespace {

Vec3 normalized(const Vec3& v) { return v / v.norm(); }

void put(RolePositions& roles, Role role, const Vec3& p) { roles[index(role)] = p; }
const Vec3& at(const RolePositions& roles, Role role) { return *roles[index(role)]; }
bool has(const RolePositions& roles, Role role) { return roles[index(role)].has_value(); }

// Rotations written out by hand so the generator does not share code with
// the library's own rotation helpers.
Mat3 rx(double t) {
  Mat3 m;
  m << 1, 0, 0, 0, std::cos(t), -std::sin(t), 0, std::sin(t), std::cos(t);
  return m;
}
Mat3 ry(double t) {
  Mat3 m;
  m << std::cos(t), 0, std::sin(t), 0, 1, 0, -std::sin(t), 0, std::cos(t);
  return m;
}
Mat3 rz(double t) {
  Mat3 m;
  m << std::cos(t), -std::sin(t), 0, std::sin(t), std::cos(t), 0, 0, 0, 1;
  return m;
}

double angle_between(const Vec3& u, const Vec3& v) { return std::atan2(u.cross(v).norm(), u.dot(v)); }

// Proper frame from an up direction and a lateral (subject's right) hint.
Mat3 frame_from(const Vec3& up, const Vec3& right) {
  Mat3 f;
  f.col(2) = normalized(right);
  f.col(1) = normalized(up - up.dot(f.col(2)) * f.col(2));
  f.col(0) = f.col(1).cross(f.col(2));
  return f;
}

Vec3 sample_with(std::mt19937_64& rng, auto&& accept) {
  for (;;) {
    const Vec3 v = random_unit(rng);
    if (accept(v)) return v;
  }
}

std::string swap_side_name(const std::string& name) {
  auto swap_word = [&](std::string_view a, std::string_view b) -> std::optional<std::string> {
    auto pos = name.find(a);
    if (pos == std::string::npos) return std::nullopt;
    std::string out = name;
    out.replace(pos, a.size(), b);
    return out;
  };
  for (auto [a, b] : {std::pair{"Left", "Right"}, std::pair{"Right", "Left"}, std::pair{"left", "right"},
                      std::pair{"right", "left"}}) {
    if (auto s = swap_word(a, b)) return *s;
  }
  if (name.size() > 1 && (name[0] == 'L' || name[0] == 'R') && std::isupper(static_cast<unsigned char>(name[1]))) {
    std::string out = name;
    out[0] = name[0] == 'L' ? 'R' : 'L';
    return out;
  }
  return name;
}

}  // namespace

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    const Vec3 v(n(rng), n(rng), n(rng));
    const double len = v.norm();
    if (len > 1e-6) return v / len;
  }
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

RigidTransform random_transform(std::mt19937_64& rng, bool with_scale) {
  RigidTransform t;
  t.rotation = random_rotation(rng);
  t.translation = Vec3(uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, -3, 3));
  t.scale = with_scale ? uniform(rng, 0.5, 2.0) : 1.0;
  return t;
}

Pose pose_from_roles(const RolePositions& roles, const KeypointSetDescriptor& descriptor) {
  Pose pose(descriptor.joint_count());
  for (Role role : all_roles()) {
    const auto& source = descriptor.source(role);
    if (!source || source->is_midpoint() || !roles[index(role)]) continue;
    pose.set(source->first, *roles[index(role)]);
  }
  // Joints outside the role map hang just off their parent.
  for (std::size_t pass = 0; pass < descriptor.joint_count(); ++pass) {
    bool changed = false;
    for (std::size_t j = 0; j < descriptor.joint_count(); ++j) {
      if (pose.valid(j) || descriptor.is_role_joint(j)) continue;
      const auto parent = descriptor.parent(j);
      if (!parent || !pose.valid(*parent)) continue;
      pose.set(j, pose.position(*parent) + Vec3(0.01, 0.02, 0.0));
      changed = true;
    }
    if (!changed) break;
  }
  return pose;
}

RolePositions t_pose_roles() {
  RolePositions r{};
  put(r, Role::pelvis, {0, 1.0, 0});
  put(r, Role::spine_mid, {0, 1.25, 0});
  put(r, Role::spine_top, {0, 1.5, 0});
  put(r, Role::neck_base, {0, 1.6, 0});
  put(r, Role::head, {0, 1.75, 0});
  for (Side side : {Side::right, Side::left}) {
    const double h = handedness(side);
    const ArmRoles arm = arm_roles(side);
    put(r, arm.shoulder, {0, 1.5, h * 0.2});
    put(r, arm.elbow, {0, 1.5, h * 0.5});
    put(r, arm.wrist, {0, 1.5, h * 0.75});
    put(r, arm.hand, {0, 1.5, h * 0.85});
    put(r, arm.thumb, {0, 1.55, h * 0.75});
    const LegRoles leg = leg_roles(side);
    put(r, leg.hip, {0, 1.0, h * 0.1});
    put(r, leg.knee, {0, 0.55, h * 0.1});
    put(r, leg.ankle, {0, 0.1, h * 0.1});
    put(r, leg.foot_base, {-0.05, 0.1, h * 0.1});
    put(r, leg.toes, {0.15, 0.1, h * 0.1});
    put(r, leg.small_toe, {0.15, 0.1, h * 0.16});
  }
  put(r, Role::ear_right, {0, 1.75, 0.08});
  put(r, Role::ear_left, {0, 1.75, -0.08});
  return r;
}

Pose t_pose(const KeypointSetDescriptor& descriptor) { return pose_from_roles(t_pose_roles(), descriptor); }

MotionSequence t_pose_sequence(const std::string& format, std::size_t frames, double fps) {
  MotionSequence seq;
  seq.descriptor = find_descriptor(format);
  seq.fps = fps;
  seq.frames.assign(frames, t_pose(*seq.descriptor));
  return seq;
}

RolePositions rest_roles() {
  RolePositions r = t_pose_roles();
  for (Side side : {Side::right, Side::left}) {
    const double h = handedness(side);
    const ArmRoles arm = arm_roles(side);
    put(r, arm.elbow, {0, 1.2, h * 0.2});
    put(r, arm.wrist, {0.25, 1.2, h * 0.2});
    put(r, arm.hand, {0.33, 1.2, h * 0.2});
    put(r, arm.thumb, {0.25, 1.2, h * 0.25});
  }
  return r;
}

BodyLengths random_body(std::mt19937_64& rng) {
  BodyLengths b{};
  b.spine_lower = uniform(rng, 0.2, 0.3);
  b.spine_upper = uniform(rng, 0.2, 0.3);
  b.neck = uniform(rng, 0.06, 0.12);
  b.head = uniform(rng, 0.12, 0.2);
  b.ear = {uniform(rng, 0.06, 0.1), uniform(rng, 0.06, 0.1)};
  for (std::size_t s = 0; s < 2; ++s) {
    b.shoulder[s] = uniform(rng, 0.15, 0.22);
    b.upper_arm[s] = uniform(rng, 0.25, 0.35);
    b.forearm[s] = uniform(rng, 0.22, 0.3);
    b.thumb[s] = uniform(rng, 0.03, 0.06);
    b.hand[s] = uniform(rng, 0.06, 0.1);
    b.hip[s] = uniform(rng, 0.07, 0.12);
    b.thigh[s] = uniform(rng, 0.38, 0.5);
    b.shin[s] = uniform(rng, 0.35, 0.45);
    b.foot[s] = uniform(rng, 0.1, 0.2);
  }
  return b;
}

GeneratedPose random_kinect_pose(std::mt19937_64& rng, const GeneratorOptions& options) {
  const BodyLengths body = random_body(rng);
  return random_kinect_pose(rng, body, options);
}

GeneratedPose random_kinect_pose(std::mt19937_64& rng, const BodyLengths& body, const GeneratorOptions& options) {
  GeneratedPose g;
  RolePositions& r = g.roles;
  const double m = options.margin;
  const Mat3 lower = Mat3::Identity();
  const Vec3 pelvis = Vec3::Zero();
  put(r, Role::pelvis, pelvis);

  g.spine_flexion = uniform(rng, -0.6, 0.6);
  g.spine_lateral = uniform(rng, -0.5, 0.5);
  g.spine_axial = uniform(rng, -1.0, 1.0);
  const Mat3 upper = lower * ry(g.spine_axial) * rz(-g.spine_flexion) * rx(g.spine_lateral);

  const Vec3 spine_mid = pelvis + body.spine_lower * lower.col(1);
  const Vec3 spine_top = spine_mid + body.spine_upper * upper.col(1);
  const Vec3 neck_base = spine_top + body.neck * upper.col(1);
  const Vec3 head_dir =
      sample_with(rng, [&](const Vec3& v) { return std::abs(v.dot(upper.col(0))) < std::cos(m); });
  put(r, Role::spine_mid, spine_mid);
  put(r, Role::spine_top, spine_top);
  put(r, Role::neck_base, neck_base);
  const Vec3 head = neck_base + body.head * head_dir;
  put(r, Role::head, head);
  // Ears on the head's lateral axis, twisted about the upper spine.
  const Mat3 neck = upper * ry(uniform(rng, -0.8, 0.8));
  put(r, Role::ear_right, head + body.ear[0] * neck.col(2));
  put(r, Role::ear_left, head - body.ear[1] * neck.col(2));

  for (Side side : {Side::right, Side::left}) {
    const double h = handedness(side);
    const std::size_t s = side == Side::right ? 0 : 1;
    const ArmRoles arm = arm_roles(side);
    const Vec3 shoulder = spine_top + h * body.shoulder[s] * upper.col(2);
    const Vec3 upper_arm =
        sample_with(rng, [&](const Vec3& v) { return std::abs(v.dot(upper.col(2))) < std::cos(m); });
    const Vec3 elbow = shoulder + body.upper_arm[s] * upper_arm;
    const Vec3 forearm = sample_with(rng, [&](const Vec3& v) {
      const double a = angle_between(-upper_arm, v);
      return a > m && a < kPi - m;
    });
    const Vec3 wrist = elbow + body.forearm[s] * forearm;
    Vec3 thumb_dir = sample_with(rng, [&](const Vec3& v) {
      const double a = angle_between(forearm, v);
      return a > 0.3 && a < kPi - 0.3;
    });
    if (options.canonical_thumbs) thumb_dir = normalized(thumb_dir - thumb_dir.dot(forearm) * forearm);
    const Vec3 palm_normal = normalized((-forearm).cross(thumb_dir));
    const Vec3 hand_dir =
        sample_with(rng, [&](const Vec3& v) { return std::abs(v.dot(palm_normal)) < std::cos(m); });
    put(r, arm.shoulder, shoulder);
    put(r, arm.elbow, elbow);
    put(r, arm.wrist, wrist);
    put(r, arm.thumb, wrist + body.thumb[s] * thumb_dir);
    put(r, arm.hand, wrist + body.hand[s] * hand_dir);

    const LegRoles leg = leg_roles(side);
    const Vec3 hip = pelvis + h * body.hip[s] * lower.col(2);
    const Vec3 thigh =
        sample_with(rng, [&](const Vec3& v) { return std::abs(v.dot(lower.col(2))) < std::cos(m); });
    const Vec3 knee = hip + body.thigh[s] * thigh;
    const Vec3 shin = sample_with(rng, [&](const Vec3& v) {
      const double a = angle_between(-thigh, v);
      return a > m && a < kPi - m;
    });
    const Vec3 ankle = knee + body.shin[s] * shin;
    const Vec3 foot = sample_with(rng, [&](const Vec3& v) {
      const double a = angle_between(-shin, v);
      return a > m && a < kPi - m;
    });
    put(r, leg.hip, hip);
    put(r, leg.knee, knee);
    put(r, leg.ankle, ankle);
    const Vec3 toes = ankle + body.foot[s] * foot;
    put(r, leg.toes, toes);
    // Heel just behind the ankle; the heel-to-toe line stays clear of the shin.
    const Vec3 heel_dir = sample_with(rng, [&](const Vec3& v) {
      const Vec3 heel = ankle + 0.05 * v;
      const double a = angle_between(shin, toes - heel);
      return angle_between(v, -foot) < kPi / 3 && a > m && a < kPi - m;
    });
    put(r, leg.foot_base, ankle + 0.05 * heel_dir);
    // Small toe beside the big toe, well away from the shin direction.
    const Vec3 toe_line = sample_with(rng, [&](const Vec3& v) {
      const double a = angle_between(v, shin);
      return a > m && a < kPi - m;
    });
    put(r, leg.small_toe, toes + 0.04 * toe_line);
  }

  if (options.random_placement) {
    const RigidTransform t = random_transform(rng, true);
    for (auto& p : r) {
      if (p) p = t.apply(*p);
    }
  }
  g.pose = pose_from_roles(r, *find_descriptor("kinect25"));
  return g;
}

MotionSequence random_kinect_sequence(std::mt19937_64& rng, std::size_t frames, const GeneratorOptions& options) {
  MotionSequence seq;
  seq.descriptor = find_descriptor("kinect25");
  // One subject with one placement, so the median bone lengths are the
  // lengths of every frame.
  const BodyLengths body = random_body(rng);
  GeneratorOptions local = options;
  local.random_placement = false;
  const RigidTransform t = options.random_placement ? random_transform(rng, true) : RigidTransform{};
  for (std::size_t f = 0; f < frames; ++f) {
    Pose pose = random_kinect_pose(rng, body, local).pose;
    for (std::size_t j = 0; j < pose.joint_count(); ++j) {
      if (pose.valid(j)) pose.set(j, t.apply(pose.position(j)));
    }
    seq.frames.push_back(std::move(pose));
  }
  return seq;
}

ChannelMap oracle_channels(const RolePositions& r) {
  ChannelMap out;
  auto set = [&](Joint j, Channel c, double v) { out[{j, c}] = v; };

  const Mat3 lower = frame_from(at(r, Role::spine_mid) - at(r, Role::pelvis),
                                at(r, Role::hip_right) - at(r, Role::hip_left));
  const Mat3 upper = frame_from(at(r, Role::spine_top) - at(r, Role::spine_mid),
                                at(r, Role::shoulder_right) - at(r, Role::shoulder_left));

  // Torso: lower^T upper = Ry(axial) Rz(-flexion) Rx(lateral), expanded.
  const Mat3 q = lower.transpose() * upper;
  set(Joint::spine, Channel::flexion, std::asin(-q(1, 0)));
  set(Joint::spine, Channel::abduction, std::atan2(-q(1, 2), q(1, 1)));
  set(Joint::spine, Channel::axial, std::atan2(-q(2, 0), q(0, 0)));

  if (has(r, Role::head)) {
    // With ears the head frame keeps the upper-spine y and turns its z onto
    // the ear line.
    Mat3 neck = upper;
    if (has(r, Role::ear_left) && has(r, Role::ear_right)) {
      const Vec3 ears = at(r, Role::ear_right) - at(r, Role::ear_left);
      neck.col(2) = normalized(ears - ears.dot(upper.col(1)) * upper.col(1));
      neck.col(0) = neck.col(1).cross(neck.col(2));
      const Mat3 rel = upper.transpose() * neck;
      set(Joint::neck, Channel::axial, std::atan2(-rel(2, 0), rel(0, 0)));
    }
    const Vec3 origin = has(r, Role::neck_base) ? at(r, Role::neck_base) : at(r, Role::spine_top);
    const Vec3 v = neck.transpose() * normalized(at(r, Role::head) - origin);
    set(Joint::neck, Channel::flexion, std::asin(v.x()));
    set(Joint::neck, Channel::abduction, std::atan2(v.z(), v.y()));
  }

  // Proximal (flexion, abduction) of a bone in a proper frame.
  auto spherical = [](const Mat3& frame, const Vec3& bone, double h) {
    const Vec3 v = frame.transpose() * normalized(bone);
    return std::pair{std::atan2(v.x(), -v.y()), std::asin(h * v.z())};
  };
  // Twist about y of `distal` relative to `aligned`; exact for pure y twists.
  auto twist = [](const Mat3& aligned, const Mat3& distal) {
    const Mat3 rel = aligned.transpose() * distal;
    return std::atan2(-rel(2, 0), rel(0, 0));
  };
  auto aligned = [](const Mat3& frame, double flexion, double abduction, double h) {
    return Mat3(frame * rz(flexion) * rx(-h * abduction));
  };

  for (Side side : {Side::right, Side::left}) {
    const double h = handedness(side);
    const auto sj = [&](Joint right) {
      return static_cast<Joint>(static_cast<int>(right) + (side == Side::left ? 1 : 0));
    };
    const ArmRoles arm = arm_roles(side);
    const Vec3 sh = at(r, arm.shoulder);
    const Vec3 el = at(r, arm.elbow);
    const Vec3 wr = at(r, arm.wrist);
    const auto [sf, sa] = spherical(upper, el - sh, h);
    set(sj(Joint::shoulder_right), Channel::flexion, sf);
    set(sj(Joint::shoulder_right), Channel::abduction, sa);
    const double elbow_angle = angle_between(sh - el, wr - el);
    set(sj(Joint::elbow_right), Channel::flexion, elbow_angle);

    Mat3 elbow_frame;
    elbow_frame.col(1) = normalized(sh - el);
    elbow_frame.col(2) = normalized((wr - el).cross(elbow_frame.col(1)));
    elbow_frame.col(0) = elbow_frame.col(1).cross(elbow_frame.col(2));
    set(sj(Joint::shoulder_right), Channel::axial, h * twist(aligned(upper, sf, sa, h), elbow_frame));

    if (has(r, arm.thumb)) {
      Mat3 wrist_frame;
      wrist_frame.col(1) = normalized(el - wr);
      wrist_frame.col(0) = h * normalized(wrist_frame.col(1).cross(at(r, arm.thumb) - wr));
      wrist_frame.col(2) = wrist_frame.col(0).cross(wrist_frame.col(1));
      const Mat3 bent = elbow_frame * rz(kPi - elbow_angle);
      set(sj(Joint::elbow_right), Channel::axial, h * twist(bent, wrist_frame));
      if (has(r, arm.hand)) {
        Vec3 v = wrist_frame.transpose() * normalized(at(r, arm.hand) - wr);
        v.y() = -v.y();
        set(sj(Joint::wrist_right), Channel::flexion, std::asin(v.x()));
        set(sj(Joint::wrist_right), Channel::abduction, std::atan2(h * v.z(), v.y()));
      }
    }

    const LegRoles leg = leg_roles(side);
    const Vec3 hp = at(r, leg.hip);
    const Vec3 kn = at(r, leg.knee);
    const Vec3 an = at(r, leg.ankle);
    const auto [hf, ha] = spherical(lower, kn - hp, h);
    set(sj(Joint::hip_right), Channel::flexion, hf);
    set(sj(Joint::hip_right), Channel::abduction, ha);
    const double knee_angle = angle_between(hp - kn, an - kn);
    set(sj(Joint::knee_right), Channel::flexion, knee_angle);

    Mat3 knee_frame;
    knee_frame.col(1) = normalized(hp - kn);
    knee_frame.col(2) = normalized(knee_frame.col(1).cross(an - kn));
    knee_frame.col(0) = knee_frame.col(1).cross(knee_frame.col(2));
    set(sj(Joint::hip_right), Channel::axial, h * twist(aligned(lower, hf, ha, h), knee_frame));

    if (has(r, leg.toes)) {
      const Vec3 heel = has(r, leg.foot_base) ? at(r, leg.foot_base) : an;
      const Vec3 toes = at(r, leg.toes);
      Mat3 ankle_frame;
      ankle_frame.col(1) = normalized(kn - an);
      ankle_frame.col(2) = normalized(ankle_frame.col(1).cross(heel - toes));
      ankle_frame.col(0) = ankle_frame.col(1).cross(ankle_frame.col(2));
      const Mat3 bent = knee_frame * rz(knee_angle - kPi);
      set(sj(Joint::knee_right), Channel::axial, h * twist(bent, ankle_frame));
      set(sj(Joint::ankle_right), Channel::flexion, angle_between(kn - an, toes - heel));
      if (has(r, leg.small_toe)) {
        const Vec3 line = at(r, leg.small_toe) - toes;
        set(sj(Joint::ankle_right), Channel::abduction,
            std::atan2(-line.dot(ankle_frame.col(0)), h * line.dot(ankle_frame.col(2))));
      }
    }
  }
  return out;
}

double channel_distance(ChannelId id, double a, double b) {
  const double d = a - b;
  return is_circular(id) ? std::abs(std::remainder(d, 2.0 * kPi)) : std::abs(d);
}

double max_channel_deviation(const JointAngles& a, const JointAngles& b, const ChannelLayout& layout) {
  double worst = 0.0;
  for (const ChannelId& id : layout) {
    const auto va = a.get(id);
    const auto vb = b.get(id);
    if (va.has_value() != vb.has_value()) return std::numeric_limits<double>::infinity();
    if (va) worst = std::max(worst, channel_distance(id, *va, *vb));
  }
  return worst;
}

Joint mirror_joint(Joint joint) {
  if (joint == Joint::spine || joint == Joint::neck) return joint;
  const int i = static_cast<int>(joint);
  // Right and left joints alternate after the two midline joints.
  return static_cast<Joint>(i % 2 == 0 ? i + 1 : i - 1);
}

Pose mirror_pose(const Pose& pose, const KeypointSetDescriptor& d) {
  const CanonicalPose roles = to_canonical(pose, d);
  const Vec3 origin = *roles[index(Role::pelvis)];
  const Vec3 n = normalized(*roles[index(Role::hip_right)] - *roles[index(Role::hip_left)]);
  Pose out(d.joint_count());
  for (std::size_t j = 0; j < d.joint_count(); ++j) {
    const auto target = d.joint_index(swap_side_name(d.joint_names()[j]));
    if (!target) throw std::logic_error("no mirror joint for " + d.joint_names()[j]);
    if (!pose.valid(j)) continue;
    const Vec3 p = pose.position(j);
    out.set(*target, p - 2.0 * (p - origin).dot(n) * n);
  }
  return out;
}

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("jointangles_tests_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace jointangles::testing
