// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jointangles/angles.hpp"
#include "jointangles/reconstruct.hpp"
#include "jointangles/skeleton.hpp"

namespace jointangles {

struct ParseOptions {
  /// Expected format id. Required for CSV; for JSON a mismatch with the
  /// file's "format" is an argument error.
  std::optional<std::string> format;
  /// CSV has no header field for the frame rate.
  double fps = 30.0;
  /// Keypoints with confidence below this are invalid.
  double min_confidence = 0.1;
};

/// Keypoint JSON:
///   {"format": id, "fps": f, "frames": [[[x, y, z] | null, ...J], ...N],
///    "confidence": [[c, ...J], ...N]?, "skeleton": {...}?}
/// null, "NaN" or non-finite coordinates make a keypoint invalid. "custom"
/// files carry {"joints": [...], "bones": [[p, c], ...], "roles": {...}}.
MotionSequence parse_sequence_json(std::string_view text, const ParseOptions& options = {});

/// Keypoint CSV with header `frame,joint,x,y,z[,confidence]`; joints by name
/// or index, one row per joint per frame.
MotionSequence parse_sequence_csv(std::string_view text, const ParseOptions& options);

/// Dispatches on the first non-blank byte ('{' means JSON, else CSV).
MotionSequence parse_sequence(std::string_view bytes, const ParseOptions& options = {});

/// Extra keypoint-file fields written by reconstruction.
struct PlacementLists {
  std::vector<std::string> representative;
  std::vector<std::string> unreconstructable;
};

std::string sequence_to_json(const MotionSequence& seq,
                             const std::optional<PlacementLists>& placement = std::nullopt);

struct AngleOutputOptions {
  bool degrees = false;
  bool anatomical = false;  // hinge flexion reported as pi - interior angle
};

/// Angle JSON:
///   {"format", "fps", "units", "hinge", "layout": [[joint, channel], ...],
///    "frames": [[v | null, ...], ...],
///    "root": {"position": [[x, y, z] | null, ...],
///             "orientation": [[[...3], [...3], [...3]] | null, ...]},
///    "bone_lengths": {"<parent>-<child>": l | null}, "skeleton"?}
std::string angles_to_json(const AngleSequence& angles, const AngleOutputOptions& options = {});
/// Flat export of the vectorised layout: header `frame,<joint>.<channel>,...`,
/// empty cells for unavailable channels.
std::string angles_to_csv(const AngleSequence& angles, const AngleOutputOptions& options = {});
/// Reads angle JSON back into canonical units (radians, interior hinges).
AngleSequence parse_angles_json(std::string_view text);

std::string report_to_json(const RoundtripReport& report);

/// Descriptor of a "custom" file, in the same shape as the "skeleton" field.
std::string descriptor_to_json(const KeypointSetDescriptor& descriptor);
DescriptorPtr parse_descriptor_json(std::string_view text);

/// Whole-file helpers; failures raise IoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// 17 significant digit rendering used by every writer; NaN
/// and infinities become null.
std::string format_double(double value);

}  // namespace jointangles
