// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "jointangles/error.hpp"
#include "jointangles/io.hpp"
#include "jointangles/sequence_ops.hpp"
#include "support.hpp"

namespace jointangles {
namespace {

using nlohmann::json;
using testing::kPi;

// Builds a keypoint file by hand so the reader is checked against a document
// that did not come from the writer.
std::string coco_document(std::size_t frames, const std::string& override_cell = {}) {
  std::string text = R"({"format": "coco17", "fps": 25, "frames": [)";
  for (std::size_t f = 0; f < frames; ++f) {
    if (f) text += ", ";
    text += "[";
    for (std::size_t j = 0; j < 17; ++j) {
      if (j) text += ", ";
      if (f == 3 && j == 5 && !override_cell.empty()) {
        text += override_cell;
      } else {
        text += fmt::format("[{}, {}, {}]", 0.1 * j, 1.0 + 0.01 * f, -0.5 * j);
      }
    }
    text += "]";
  }
  return text + "]}";
}

TEST(ParseJson, WellFormedCoco) {
  const MotionSequence seq = parse_sequence_json(coco_document(10));
  EXPECT_EQ(seq.descriptor->id(), "coco17");
  EXPECT_EQ(seq.frames.size(), 10u);
  EXPECT_DOUBLE_EQ(seq.fps, 25.0);
  for (const Pose& p : seq.frames) EXPECT_EQ(p.valid_count(), 17u);
  EXPECT_EQ(seq.frames[4].position(6), Vec3(0.1 * 6, 1.0 + 0.01 * 4, -0.5 * 6));
}

TEST(ParseJson, NanAndNullMarkAJointInvalid) {
  for (const std::string cell : {"[0.5, NaN, 1]", "null", "[0.5, null, 1]", "[1, \"NaN\", 2]", "[Infinity, 0, 0]"}) {
    const MotionSequence seq = parse_sequence_json(coco_document(10, cell));
    EXPECT_FALSE(seq.frames[3].valid(5)) << cell;
    EXPECT_EQ(seq.frames[3].valid_count(), 16u) << cell;
    EXPECT_EQ(seq.frames[2].valid_count(), 17u) << cell;
  }
}

TEST(ParseJson, ShortFrameIsStructural) {
  const MotionSequence k = testing::t_pose_sequence("kinect25", 2);
  json doc = json::parse(sequence_to_json(k));
  doc["frames"][1].erase(doc["frames"][1].begin() + 24);
  EXPECT_THROW(parse_sequence_json(doc.dump()), StructuralError);
}

TEST(ParseJson, UnknownFormat) {
  EXPECT_THROW(parse_sequence_json(R"({"format": "h36m", "fps": 30, "frames": []})"), UnsupportedFormatError);
}

TEST(ParseJson, FormatHintMismatch) {
  ParseOptions options;
  options.format = "kinect25";
  EXPECT_THROW(parse_sequence_json(coco_document(1), options), ArgumentError);
  options.format = "coco17";
  EXPECT_NO_THROW(parse_sequence_json(coco_document(1), options));
}

TEST(ParseJson, SyntaxErrorReportsLineAndColumn) {
  const std::string text = "{\"format\": \"coco17\",\n  \"fps\": 30,\n  \"frames\": [[1, 2,, 3]]}";
  try {
    parse_sequence_json(text);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 20u);
    EXPECT_NE(std::string(e.what()).find("line 3, column 20"), std::string::npos) << e.what();
  }
}

TEST(ParseJson, SchemaErrorsAreParseErrors) {
  EXPECT_THROW(parse_sequence_json(R"({"fps": 30, "frames": []})"), ParseError);
  EXPECT_THROW(parse_sequence_json(R"({"format": "coco17", "fps": "fast", "frames": []})"), ParseError);
  EXPECT_THROW(parse_sequence_json(R"([1, 2])"), ParseError);
}

TEST(ParseJson, ConfidenceBelowThresholdIsInvalid) {
  json doc = json::parse(coco_document(2));
  json confidence = json::array();
  for (int f = 0; f < 2; ++f) {
    json row = json::array();
    for (int j = 0; j < 17; ++j) row.push_back(j == 4 && f == 1 ? 0.05 : 0.9);
    confidence.push_back(row);
  }
  doc["confidence"] = confidence;
  const MotionSequence seq = parse_sequence_json(doc.dump());
  EXPECT_FALSE(seq.frames[1].valid(4));
  EXPECT_TRUE(seq.frames[0].valid(4));
  ParseOptions strict;
  strict.min_confidence = 0.95;
  EXPECT_EQ(parse_sequence_json(doc.dump(), strict).frames[0].valid_count(), 0u);
  doc["confidence"].erase(1);
  EXPECT_THROW(parse_sequence_json(doc.dump()), StructuralError);
}

TEST(ParseJson, CustomSkeleton) {
  const std::string text = R"({"format": "custom", "fps": 10,
    "skeleton": {"joints": ["hip", "knee", "ankle"], "bones": [[0, 1], [1, 2]],
                 "roles": {"pelvis": "hip", "knee_right": "knee", "ankle_right": "ankle"}},
    "frames": [[[0, 1, 0], [0, 0.5, 0], [0, 0, 0]]]})";
  const MotionSequence seq = parse_sequence_json(text);
  EXPECT_EQ(seq.descriptor->id(), "custom");
  EXPECT_EQ(seq.descriptor->joint_count(), 3u);
  EXPECT_EQ(seq.descriptor->source(Role::knee_right)->first, 1u);
  const DescriptorPtr again = parse_descriptor_json(descriptor_to_json(*seq.descriptor));
  EXPECT_EQ(again->joint_names(), seq.descriptor->joint_names());
  EXPECT_EQ(again->bones(), seq.descriptor->bones());
}

TEST(ParseCsv, RowsByNameAndIndex) {
  std::string text = "frame,joint,x,y,z,confidence\n";
  for (int f = 0; f < 2; ++f) {
    for (int j = 0; j < 17; ++j) {
      const std::string joint = j % 2 ? std::to_string(j) : find_descriptor("coco17")->joint_names()[j];
      text += fmt::format("{},{},{},{},{},{}\n", f, joint, j, f, -j, j == 2 && f == 1 ? 0.0 : 1.0);
    }
  }
  ParseOptions options;
  options.format = "coco17";
  options.fps = 60;
  const MotionSequence seq = parse_sequence(text, options);
  EXPECT_EQ(seq.frames.size(), 2u);
  EXPECT_DOUBLE_EQ(seq.fps, 60.0);
  EXPECT_EQ(seq.frames[1].position(7), Vec3(7, 1, -7));
  EXPECT_FALSE(seq.frames[1].valid(2));
  EXPECT_EQ(seq.frames[0].valid_count(), 17u);
}

TEST(ParseCsv, Errors) {
  ParseOptions options;
  options.format = "coco17";
  EXPECT_THROW(parse_sequence_csv("frame,joint,x,y,z\n", ParseOptions{}), ArgumentError);
  EXPECT_THROW(parse_sequence_csv("", options), ParseError);
  EXPECT_THROW(parse_sequence_csv("frame,joint,x,y\n", options), ParseError);
  EXPECT_THROW(parse_sequence_csv("frame,joint,x,y,z\n0,nose,1,2\n", options), ParseError);
  EXPECT_THROW(parse_sequence_csv("frame,joint,x,y,z\n0,elbow,1,2,3\n", options), ParseError);
  EXPECT_THROW(parse_sequence_csv("frame,joint,x,y,z\n0,99,1,2,3\n", options), StructuralError);
  // Frame 0 is incomplete.
  EXPECT_THROW(parse_sequence_csv("frame,joint,x,y,z\n0,nose,1,2,3\n", options), StructuralError);
  try {
    parse_sequence_csv("frame,joint,x,y,z\n0,nose,1,abc,3\n", options);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(WriteJson, SequenceRoundTripIsExact) {
  std::mt19937_64 rng(21);
  MotionSequence seq = testing::random_kinect_sequence(rng, 4);
  seq.frames[1].invalidate(3);
  const MotionSequence back = parse_sequence_json(sequence_to_json(seq));
  ASSERT_EQ(back.frames.size(), 4u);
  for (std::size_t f = 0; f < 4; ++f) EXPECT_EQ(back.frames[f], seq.frames[f]);
  EXPECT_TRUE(json::parse(sequence_to_json(seq))["frames"][1][3].is_null());
}

TEST(WriteJson, PlacementLists) {
  const MotionSequence seq = testing::t_pose_sequence("kinect25", 1);
  const json doc = json::parse(sequence_to_json(seq, PlacementLists{{"ThumbLeft"}, {"HandTipLeft"}}));
  EXPECT_EQ(doc["representative"], json::array({"ThumbLeft"}));
  EXPECT_EQ(doc["unreconstructable"], json::array({"HandTipLeft"}));
}

TEST(FormatDouble, SeventeenSignificantDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(std::nan("")), "null");
  EXPECT_EQ(format_double(-INFINITY), "null");
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double v = testing::uniform(rng, -10, 10) * std::pow(10.0, testing::uniform(rng, -20, 20));
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(AngleJson, RoundTripInRadians) {
  std::mt19937_64 rng(8);
  const AngleSequence angles = sequence_to_angles(testing::random_kinect_sequence(rng, 3));
  const std::string text = angles_to_json(angles);
  const json doc = json::parse(text);
  EXPECT_EQ(doc["layout"].size(), 31u);
  EXPECT_EQ(doc["layout"][0], json::array({"spine", "flexion"}));
  EXPECT_EQ(doc["frames"].size(), 3u);
  EXPECT_EQ(doc["root"]["orientation"][0].size(), 3u);
  EXPECT_TRUE(doc["bone_lengths"].contains("HipLeft-KneeLeft"));
  const AngleSequence back = parse_angles_json(text);
  ASSERT_EQ(back.layout, angles.layout);
  for (std::size_t f = 0; f < 3; ++f) {
    EXPECT_EQ(back.row(f), angles.row(f));
    EXPECT_EQ(back.frames[f].root->orientation, angles.frames[f].root->orientation);
  }
  EXPECT_EQ(back.bone_lengths.get("HipLeft-KneeLeft"), angles.bone_lengths.get("HipLeft-KneeLeft"));
}

TEST(AngleJson, DegreesAndAnatomicalAreOutputOnly) {
  const AngleSequence angles = sequence_to_angles(testing::t_pose_sequence("kinect25", 1));
  const json radians = json::parse(angles_to_json(angles));
  const json degrees = json::parse(angles_to_json(angles, {true, false}));
  const json anatomical = json::parse(angles_to_json(angles, {false, true}));
  for (std::size_t c = 0; c < angles.layout.size(); ++c) {
    const json& r = radians["frames"][0][c];
    if (r.is_null()) {
      EXPECT_TRUE(degrees["frames"][0][c].is_null());
      continue;
    }
    EXPECT_NEAR(degrees["frames"][0][c].get<double>(), r.get<double>() * 180.0 / kPi, 1e-12);
    if (is_hinge(angles.layout[c].joint) && angles.layout[c].channel == Channel::flexion) {
      EXPECT_NEAR(anatomical["frames"][0][c].get<double>(), kPi - r.get<double>(), 1e-15);
    }
  }
  // Reading converts back to canonical units.
  for (const AngleOutputOptions& o : {AngleOutputOptions{true, false}, AngleOutputOptions{true, true}}) {
    const AngleSequence back = parse_angles_json(angles_to_json(angles, o));
    for (std::size_t c = 0; c < angles.layout.size(); ++c) {
      const auto a = angles.row(0)[c];
      const auto b = back.row(0)[c];
      ASSERT_EQ(a.has_value(), b.has_value());
      if (a) EXPECT_NEAR(*a, *b, 1e-12);
    }
  }
}

TEST(AngleCsv, HeaderAndEmptyCells) {
  MotionSequence seq = testing::t_pose_sequence("kinect25", 2);
  seq.frames[1].invalidate(*seq.descriptor->joint_index("WristRight"));
  const AngleSequence angles = sequence_to_angles(seq);
  const std::string csv = angles_to_csv(angles);
  const std::string header = csv.substr(0, csv.find('\n'));
  EXPECT_EQ(header.rfind("frame,spine.flexion,", 0), 0u) << header;
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), 31);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  const std::string first = csv.substr(header.size() + 1, csv.find('\n', header.size() + 1) - header.size() - 1);
  EXPECT_EQ(first.find(",,"), std::string::npos) << first;
  EXPECT_NE(csv.rfind(",,"), std::string::npos);  // frame 1 has no right wrist
}

TEST(Files, ReadWriteAndMissing) {
  const std::string path = testing::temp_path("io_roundtrip.json");
  write_file(path, "{}");
  EXPECT_EQ(read_file(path), "{}");
  EXPECT_THROW(read_file(testing::temp_path("does_not_exist.json")), IoError);
  EXPECT_THROW(write_file("/nonexistent-dir/x.json", "{}"), IoError);
}

}  // namespace
}  // namespace jointangles
