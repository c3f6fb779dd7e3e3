// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

#include "jointangles_cli/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <optional>

#include "jointangles/angles.hpp"
#include "jointangles/io.hpp"
#include "jointangles/jcs.hpp"
#include "jointangles/parallel.hpp"
#include "jointangles/reconstruct.hpp"
#include "jointangles/sequence_ops.hpp"

namespace jointangles::cli {

namespace {

constexpr double kInvarianceTolerance = 1e-9;

struct Options {
  std::string input;
  std::string output;
  std::optional<std::string> format;
  double fps = 30.0;
  double min_confidence = 0.1;
  std::size_t resample_len = 0;  // 0: keep the input length
  bool degrees = false;
  bool anatomical = false;
  std::string csv_out;
  std::string verify;
  bool allow_gaps = false;
  std::size_t copies = 1;
  double max_radians = 0.8;
  std::uint64_t seed = 0;
  bool check_invariance = false;
};

void diagnostic(std::ostream& err, std::string_view level, std::string_view code, std::string_view message) {
  // One line per diagnostic, whatever the message contains.
  std::string flat(message);
  std::replace(flat.begin(), flat.end(), '\n', ' ');
  fmt::print(err, "{} {} {}\n", level, code, flat);
}

ParseOptions parse_options(const Options& o) { return ParseOptions{o.format, o.fps, o.min_confidence}; }

MotionSequence load_sequence(const std::string& path, const Options& o) {
  return parse_sequence(read_file(path), parse_options(o));
}

void emit(const Options& o, std::ostream& out, std::string_view text) {
  if (o.output.empty() || o.output == "-") {
    out << text;
  } else {
    write_file(o.output, text);
  }
}

std::filesystem::path numbered_path(const std::filesystem::path& base, std::size_t k) {
  return base.parent_path() / fmt::format("{}.{}{}", base.stem().string(), k, base.extension().string());
}

double channel_deviation(ChannelId id, double a, double b) {
  double d = std::abs(a - b);
  if (is_circular(id)) d = std::min(d, 2.0 * std::numbers::pi - d);
  return d;
}

int cmd_convert(const Options& o, std::ostream& out, std::ostream& err) {
  MotionSequence seq = load_sequence(o.input, o);
  if (o.resample_len > 0) seq = resample(seq, o.resample_len);
  const AngleSequence angles = sequence_to_angles(seq, thread_count_from_env());
  const AngleOutputOptions output{o.degrees, o.anatomical};
  emit(o, out, angles_to_json(angles, output));
  if (!o.csv_out.empty()) write_file(o.csv_out, angles_to_csv(angles, output));
  diagnostic(err, "INFO", "converted",
             fmt::format("{} frames, {} channels ({})", angles.frames.size(), angles.layout.size(),
                         angles.descriptor->id()));
  return kExitOk;
}

int cmd_reconstruct(const Options& o, std::ostream& out, std::ostream& err) {
  const AngleSequence angles = parse_angles_json(read_file(o.input));
  const MotionSequence seq = sequence_from_angles(angles, o.allow_gaps, thread_count_from_env());
  const FkChain chain = FkChain::build(angles.descriptor);
  PlacementLists lists;
  for (std::size_t j : chain.joints_with(Placement::representative)) {
    lists.representative.push_back(angles.descriptor->joint_names()[j]);
  }
  for (std::size_t j : chain.joints_with(Placement::unavailable)) {
    lists.unreconstructable.push_back(angles.descriptor->joint_names()[j]);
  }
  emit(o, out, sequence_to_json(seq, lists));

  if (!o.verify.empty()) {
    Options original_options = o;
    original_options.format = angles.descriptor->id() == "custom" ? std::nullopt
                                                                  : std::optional(angles.descriptor->id());
    const MotionSequence original = load_sequence(o.verify, original_options);
    if (original.frames.size() != seq.frames.size() ||
        original.descriptor->joint_count() != seq.descriptor->joint_count()) {
      throw StructuralError(fmt::format("--verify file has {} frames of {} joints, reconstruction has {} of {}",
                                        original.frames.size(), original.descriptor->joint_count(),
                                        seq.frames.size(), seq.descriptor->joint_count()));
    }
    double max_error = 0.0;
    for (std::size_t f = 0; f < seq.frames.size(); ++f) {
      for (std::size_t j = 0; j < seq.descriptor->joint_count(); ++j) {
        if (chain.joint_placement(j) != Placement::exact) continue;
        if (!seq.frames[f].valid(j) || !original.frames[f].valid(j)) continue;
        max_error = std::max(max_error, (seq.frames[f].position(j) - original.frames[f].position(j)).norm());
      }
    }
    const double height = skeleton_height(original);
    const double relative = height > 0.0 ? max_error / height : 0.0;
    const std::string line = fmt::format("max_error {} relative {} height {}\n", format_double(max_error),
                                         format_double(relative), format_double(height));
    if (o.output.empty() || o.output == "-") {
      diagnostic(err, "INFO", "roundtrip", line.substr(0, line.size() - 1));
    } else {
      out << line;
    }
  }
  return kExitOk;
}

int cmd_augment(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.output.empty()) throw ArgumentError("augment needs -o <output path>");
  const MotionSequence seq = load_sequence(o.input, o);
  const std::size_t threads = thread_count_from_env();
  std::optional<AngleSequence> reference;
  if (o.check_invariance) reference = sequence_to_angles(seq, threads);

  double worst = 0.0;
  std::vector<double> per_channel(reference ? reference->layout.size() : 0, 0.0);
  for (std::size_t k = 0; k < o.copies; ++k) {
    const RigidTransform transform = sample_rotation(o.max_radians, o.seed + k);
    const MotionSequence rotated = rotate_sequence(seq, transform);
    const auto path = numbered_path(o.output, k);
    write_file(path, sequence_to_json(rotated));
    if (!reference) continue;

    const AngleSequence angles = sequence_to_angles(rotated, threads);
    double copy_worst = 0.0;
    for (std::size_t f = 0; f < angles.frames.size(); ++f) {
      for (std::size_t c = 0; c < angles.layout.size(); ++c) {
        const ChannelId id = angles.layout[c];
        const auto a = reference->frames[f].get(id);
        const auto b = angles.frames[f].get(id);
        double d = 0.0;
        if (a.has_value() != b.has_value()) {
          d = std::numeric_limits<double>::infinity();
        } else if (a) {
          d = channel_deviation(id, *a, *b);
        }
        per_channel[c] = std::max(per_channel[c], d);
        copy_worst = std::max(copy_worst, d);
      }
    }
    worst = std::max(worst, copy_worst);
    fmt::print(out, "copy {} {} max_deviation {}\n", k, path.string(), format_double(copy_worst));
  }
  if (reference) {
    for (std::size_t c = 0; c < per_channel.size(); ++c) {
      const ChannelId id = reference->layout[c];
      fmt::print(out, "channel {}.{} max_deviation {}\n", joint_name(id.joint), channel_name(id.channel),
                 std::isinf(per_channel[c]) ? std::string("availability-mismatch") : format_double(per_channel[c]));
    }
    if (!(worst <= kInvarianceTolerance)) {
      diagnostic(err, "ERROR", error_code(ErrorKind::internal_consistency),
                 fmt::format("rotated copies change the angles by up to {} rad (limit {})", format_double(worst),
                             kInvarianceTolerance));
      return kExitInternal;
    }
  }
  diagnostic(err, "INFO", "augmented", fmt::format("{} copies written", o.copies));
  return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& /*err*/) {
  const MotionSequence seq = load_sequence(o.input, o);
  const KeypointSetDescriptor& d = *seq.descriptor;
  fmt::print(out, "format {}\nframes {}\njoints {}\nfps {}\n", d.id(), seq.frames.size(), d.joint_count(),
             format_double(seq.fps));
  const bool tree = is_tree(d.joint_count(), d.bones());
  fmt::print(out, "tree {}\n", tree ? "ok" : "broken");

  std::size_t invalid_total = 0;
  std::size_t offending = 0;
  for (std::size_t f = 0; f < seq.frames.size(); ++f) {
    std::vector<std::string> invalid;
    for (std::size_t j = 0; j < d.joint_count(); ++j) {
      if (!seq.frames[f].valid(j)) invalid.push_back(d.joint_names()[j]);
    }
    if (invalid.empty()) continue;
    ++offending;
    invalid_total += invalid.size();
    fmt::print(out, "frame {} invalid {}\n", f, fmt::join(invalid, ","));
  }
  const BoneLengths lengths = bone_lengths(seq);
  std::vector<std::string> missing;
  for (const auto& key : lengths.keys()) {
    if (lengths.missing(key)) missing.push_back(key);
  }
  if (!missing.empty()) fmt::print(out, "missing_bones {}\n", fmt::join(missing, ","));
  fmt::print(out, "invalid_keypoints {}\noffending_frames {}\n", invalid_total, offending);
  const bool clean = tree && offending == 0 && !seq.frames.empty();
  fmt::print(out, "status {}\n", clean ? "clean" : "issues");
  if (!tree) return kExitStructural;
  return clean ? kExitOk : kExitData;
}

void describe(const DescriptorPtr& descriptor, std::ostream& out) {
  const KeypointSetDescriptor& d = *descriptor;
  const ChannelLayout layout = channel_layout(d);
  const double ratio = static_cast<double>(layout.size()) / static_cast<double>(3 * d.joint_count());
  fmt::print(out, "format {}\njoints {}\nbones {}\nchannels {}\nkeypoint_values {}\nratio {:.4f}\n", d.id(),
             d.joint_count(), d.bones().size(), layout.size(), 3 * d.joint_count(), ratio);
  for (Role role : all_roles()) {
    if (const auto& source = d.source(role)) {
      if (source->is_midpoint()) {
        fmt::print(out, "role {} midpoint {} {}\n", role_name(role), d.joint_names()[source->first],
                   d.joint_names()[*source->second]);
      } else {
        fmt::print(out, "role {} {}\n", role_name(role), d.joint_names()[source->first]);
      }
    }
  }
  for (std::size_t r = 0; r < kJcsRoleCount; ++r) {
    const auto role = static_cast<JcsRole>(r);
    fmt::print(out, "jcs {} {}\n", jcs_role_name(role), jcs_supported(d, role) ? "available" : "unavailable");
  }
  for (const ChannelId& id : layout) {
    fmt::print(out, "channel {}.{}\n", joint_name(id.joint), channel_name(id.channel));
  }
  const FkChain chain = FkChain::build(descriptor);
  for (std::size_t j = 0; j < d.joint_count(); ++j) {
    fmt::print(out, "placement {} {}\n", d.joint_names()[j], placement_name(chain.joint_placement(j)));
  }
}

int cmd_inspect(const Options& o, std::ostream& out, std::ostream& /*err*/) {
  if (!o.input.empty()) {
    const MotionSequence seq = load_sequence(o.input, o);
    std::size_t valid = 0;
    for (const Pose& pose : seq.frames) valid += pose.valid_count();
    const std::size_t total = seq.frames.size() * seq.descriptor->joint_count();
    fmt::print(out, "frames {}\nfps {}\nvalid_keypoints {}/{}\n", seq.frames.size(), format_double(seq.fps), valid,
               total);
    describe(seq.descriptor, out);
    return kExitOk;
  }
  if (o.format) {
    describe(find_descriptor(*o.format), out);
    return kExitOk;
  }
  for (const std::string& id : registered_formats()) {
    const DescriptorPtr d = find_descriptor(id);
    const std::size_t channels = channel_layout(*d).size();
    fmt::print(out, "{} joints {} channels {} ratio {:.4f}\n", id, d->joint_count(), channels,
               static_cast<double>(channels) / static_cast<double>(3 * d->joint_count()));
  }
  return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out, std::ostream& err) {
  const MotionSequence seq = load_sequence(o.input, o);
  const RoundtripReport report = sequence_roundtrip_report(seq, thread_count_from_env());
  emit(o, out, report_to_json(report));
  diagnostic(err, "INFO", "roundtrip",
             fmt::format("max_error {} relative {}", format_double(report.max_error),
                         format_double(report.relative_max_error())));
  return kExitOk;
}

}  // namespace

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::structural:
    case ErrorKind::unsupported_format:
      return kExitStructural;
    case ErrorKind::internal_consistency:
      return kExitInternal;
    default:
      return kExitData;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Convert keypoint sequences to joint angles and back.", "jointangles"};
  app.require_subcommand(1);

  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("input", o.input, "Keypoint file (JSON or CSV)")->required();
  };
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option_function<std::string>("--format", [&](const std::string& id) { o.format = id; },
                                          "Keypoint format id (required for CSV)");
    cmd->add_option("--fps", o.fps, "Frame rate for CSV input")->check(CLI::PositiveNumber);
    cmd->add_option("--min-confidence", o.min_confidence, "Confidence threshold for valid keypoints");
  };

  CLI::App* convert = app.add_subcommand("convert", "Keypoints to angle JSON");
  add_input(convert);
  add_format(convert);
  convert->add_option("-o,--output", o.output, "Angle JSON path (stdout if omitted)");
  convert->add_option("--resample", o.resample_len, "Resample to this many frames first")
      ->check(CLI::PositiveNumber);
  convert->add_flag("--degrees", o.degrees, "Write degrees instead of radians");
  convert->add_flag("--anatomical", o.anatomical, "Write hinge flexion as pi minus the interior angle");
  convert->add_option("--csv-out", o.csv_out, "Also write the vectorised layout as CSV");

  CLI::App* reconstruct_cmd = app.add_subcommand("reconstruct", "Angle JSON to keypoints");
  reconstruct_cmd->add_option("input", o.input, "Angle JSON")->required();
  reconstruct_cmd->add_option("-o,--output", o.output, "Keypoint JSON path (stdout if omitted)");
  reconstruct_cmd->add_option("--verify", o.verify, "Original keypoints to measure the roundtrip error against");
  reconstruct_cmd->add_flag("--allow-gaps", o.allow_gaps, "Leave unplaceable joints invalid instead of failing");

  CLI::App* augment = app.add_subcommand("augment", "Write randomly rotated copies");
  add_input(augment);
  add_format(augment);
  augment->add_option("-o,--output", o.output, "Output path; the copy index goes before the extension")
      ->required();
  augment->add_option("--copies", o.copies, "Number of copies")->check(CLI::PositiveNumber);
  augment->add_option("--max-radians", o.max_radians, "Largest rotation angle")->check(CLI::NonNegativeNumber);
  augment->add_option("--seed", o.seed, "Seed of the first copy (copy k uses seed + k)");
  augment->add_flag("--check-invariance", o.check_invariance, "Convert every copy and compare with the input");

  CLI::App* validate = app.add_subcommand("validate", "Check a keypoint file");
  add_input(validate);
  add_format(validate);

  CLI::App* inspect = app.add_subcommand("inspect", "Describe formats or a keypoint file");
  inspect->add_option("input", o.input, "Keypoint file");
  add_format(inspect);

  CLI::App* report = app.add_subcommand("report", "Roundtrip reconstruction report (JSON)");
  add_input(report);
  add_format(report);
  report->add_option("-o,--output", o.output, "Report path (stdout if omitted)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    diagnostic(err, "ERROR", "usage", e.what());
    return kExitStructural;
  }

  try {
    if (convert->parsed()) return cmd_convert(o, out, err);
    if (reconstruct_cmd->parsed()) return cmd_reconstruct(o, out, err);
    if (augment->parsed()) return cmd_augment(o, out, err);
    if (validate->parsed()) return cmd_validate(o, out, err);
    if (inspect->parsed()) return cmd_inspect(o, out, err);
    if (report->parsed()) return cmd_report(o, out, err);
  } catch (const Error& e) {
    diagnostic(err, "ERROR", e.code(), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    diagnostic(err, "ERROR", "internal", e.what());
    return kExitInternal;
  }
  return kExitStructural;
}

}  // namespace jointangles::cli
