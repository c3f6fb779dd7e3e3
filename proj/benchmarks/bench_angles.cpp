// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <benchmark/benchmark.h>

#include "jointangles/angles.hpp"
#include "jointangles/reconstruct.hpp"
#include "jointangles/sequence_ops.hpp"
#include "support.hpp"

namespace {

using namespace jointangles;

MotionSequence sequence(const std::string& format, std::size_t frames) {
  std::mt19937_64 rng(7);
  const auto d = find_descriptor(format);
  const testing::BodyLengths body = testing::random_body(rng);
  MotionSequence seq{d, 30.0, {}};
  for (std::size_t f = 0; f < frames; ++f) {
    seq.frames.push_back(testing::pose_from_roles(testing::random_kinect_pose(rng, body, {}).roles, *d));
  }
  return seq;
}

void BM_PoseToAngles(benchmark::State& state, const std::string& format) {
  const MotionSequence seq = sequence(format, 64);
  std::size_t i = 0;
  for (auto _ : state) {
    const Pose& pose = seq.frames[i++ % seq.frames.size()];
    benchmark::DoNotOptimize(pose_to_angles(to_canonical(pose, *seq.descriptor)));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK_CAPTURE(BM_PoseToAngles, kinect25, std::string("kinect25"));
BENCHMARK_CAPTURE(BM_PoseToAngles, openpose25, std::string("openpose25"));
BENCHMARK_CAPTURE(BM_PoseToAngles, coco17, std::string("coco17"));

void BM_SequenceToAngles(benchmark::State& state) {
  const MotionSequence seq = sequence("kinect25", 1000);
  const auto threads = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sequence_to_angles(seq, threads));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(seq.frames.size()));
}
BENCHMARK(BM_SequenceToAngles)->Arg(1)->Arg(4)->UseRealTime();

void BM_AnglesToPose(benchmark::State& state) {
  const MotionSequence seq = sequence("kinect25", 64);
  const FkChain chain = FkChain::build(seq.descriptor);
  const BoneLengths lengths = bone_lengths(seq);
  std::vector<JointAngles> angles;
  for (const Pose& pose : seq.frames) angles.push_back(pose_to_angles(to_canonical(pose, *seq.descriptor)));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(angles_to_pose(angles[i++ % angles.size()], lengths, chain));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AnglesToPose);

void BM_DotProductBaseline(benchmark::State& state) {
  const MotionSequence seq = sequence("kinect25", 64);
  const auto pairs = default_bone_pairs(*seq.descriptor);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(dot_product_baseline(seq.frames[i++ % seq.frames.size()], pairs));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DotProductBaseline);

void BM_Resample(benchmark::State& state) {
  const MotionSequence seq = sequence("kinect25", static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(resample(seq, 200));
}
BENCHMARK(BM_Resample)->Arg(73)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
