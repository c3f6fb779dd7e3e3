// Copyright 2026 The jointangles Authors
// SPDX-License-Identifier: Apache-2.0

#include "jointangles/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "jointangles/error.hpp"

namespace jointangles {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = std::numbers::pi;

// --- parsing helpers -------------------------------------------------------

std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  const std::size_t end = std::min(byte, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

// Python's json module writes bare NaN / Infinity tokens. They are mapped to
// null before parsing; `shifts` maps positions back to the original text.
struct Sanitized {
  std::string text;
  std::vector<std::pair<std::size_t, std::ptrdiff_t>> shifts;  // (position, cumulative delta)

  std::size_t original(std::size_t pos) const {
    std::ptrdiff_t delta = 0;
    for (const auto& [at, d] : shifts) {
      if (at > pos) break;
      delta = d;
    }
    return static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(pos) - delta));
  }
};

Sanitized sanitize_non_finite(std::string_view text) {
  static constexpr std::array<std::string_view, 4> kTokens = {"-Infinity", "Infinity", "-NaN", "NaN"};
  Sanitized out;
  out.text.reserve(text.size());
  std::ptrdiff_t delta = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < text.size();) {
    const char c = text[i];
    if (in_string) {
      out.text += c;
      if (c == '\\' && i + 1 < text.size()) {
        out.text += text[i + 1];
        i += 2;
        continue;
      }
      if (c == '"') in_string = false;
      ++i;
      continue;
    }
    if (c == '"') {
      in_string = true;
      out.text += c;
      ++i;
      continue;
    }
    bool replaced = false;
    for (std::string_view token : kTokens) {
      if (text.substr(i, token.size()) == token) {
        out.text += "null";
        delta += 4 - static_cast<std::ptrdiff_t>(token.size());
        out.shifts.emplace_back(out.text.size(), delta);
        i += token.size();
        replaced = true;
        break;
      }
    }
    if (!replaced) {
      out.text += c;
      ++i;
    }
  }
  return out;
}

json parse_json(std::string_view text) {
  const Sanitized clean = sanitize_non_finite(text);
  try {
    return json::parse(clean.text.begin(), clean.text.end());
  } catch (const json::parse_error& e) {
    // e.byte is the 1-based offset of the offending character.
    const std::size_t byte = clean.original(e.byte == 0 ? 0 : e.byte - 1);
    const auto [line, column] = locate(text, byte);
    // Drop nlohmann's own position prefix, which refers to the sanitised text.
    std::string_view detail = e.what();
    if (const auto at = detail.find(": ", detail.find("column")); at != std::string_view::npos) {
      detail.remove_prefix(at + 2);
    }
    throw ParseError(fmt::format("line {}, column {}: malformed JSON ({})", line, column, detail),
                     line, column);
  }
}

[[noreturn]] void schema_error(std::string_view where, std::string_view what) {
  throw ParseError(fmt::format("at {}: {}", where, what), 0, 0);
}

const json& member(const json& object, std::string_view key, std::string_view where) {
  const auto it = object.find(key);
  if (it == object.end()) schema_error(where, fmt::format("missing \"{}\"", key));
  return *it;
}

double number(const json& value, std::string_view where) {
  if (!value.is_number()) schema_error(where, "expected a number");
  return value.get<double>();
}

// A coordinate: number, null or a "NaN"-like string.
double coordinate(const json& value, std::string_view where) {
  if (value.is_null()) return kNaN;
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const auto& s = value.get_ref<const std::string&>();
    if (s == "NaN" || s == "nan" || s == "NAN") return kNaN;
  }
  schema_error(where, "expected a number or null");
}

std::size_t joint_ref(const json& value, const std::vector<std::string>& names, std::string_view where) {
  if (value.is_number_unsigned()) {
    const auto index = value.get<std::size_t>();
    if (index >= names.size()) schema_error(where, fmt::format("joint index {} out of range", index));
    return index;
  }
  if (value.is_string()) {
    const auto& name = value.get_ref<const std::string&>();
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return i;
    }
    schema_error(where, fmt::format("unknown joint \"{}\"", name));
  }
  schema_error(where, "expected a joint name or index");
}

DescriptorPtr descriptor_from_json(const json& skeleton) {
  if (!skeleton.is_object()) schema_error("/skeleton", "expected an object");
  const json& joints = member(skeleton, "joints", "/skeleton");
  if (!joints.is_array()) schema_error("/skeleton/joints", "expected an array");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < joints.size(); ++i) {
    if (!joints[i].is_string()) schema_error(fmt::format("/skeleton/joints/{}", i), "expected a string");
    names.push_back(joints[i].get<std::string>());
  }
  const json& bones_json = member(skeleton, "bones", "/skeleton");
  if (!bones_json.is_array()) schema_error("/skeleton/bones", "expected an array");
  std::vector<Bone> bones;
  for (std::size_t i = 0; i < bones_json.size(); ++i) {
    const std::string where = fmt::format("/skeleton/bones/{}", i);
    const json& bone = bones_json[i];
    if (!bone.is_array() || bone.size() != 2) schema_error(where, "expected [parent, child]");
    bones.push_back({joint_ref(bone[0], names, where), joint_ref(bone[1], names, where)});
  }
  const json& roles_json = member(skeleton, "roles", "/skeleton");
  if (!roles_json.is_object()) schema_error("/skeleton/roles", "expected an object");
  std::vector<std::pair<Role, RoleSource>> roles;
  for (const auto& [key, value] : roles_json.items()) {
    const std::string where = "/skeleton/roles/" + key;
    const auto role = role_from_name(key);
    if (!role) throw StructuralError(fmt::format("unknown canonical role \"{}\"", key));
    if (value.is_array()) {
      if (value.size() != 2) schema_error(where, "a midpoint role needs exactly two joints");
      roles.push_back({*role, {joint_ref(value[0], names, where), joint_ref(value[1], names, where)}});
    } else {
      roles.push_back({*role, {joint_ref(value, names, where), {}}});
    }
  }
  return KeypointSetDescriptor::create("custom", std::move(names), std::move(bones), std::move(roles));
}

DescriptorPtr resolve_descriptor(const json& doc, const std::optional<std::string>& expected) {
  const json& format = member(doc, "format", "/");
  if (!format.is_string()) schema_error("/format", "expected a string");
  const auto id = format.get<std::string>();
  if (expected && *expected != id) {
    throw ArgumentError(fmt::format("file declares format \"{}\" but \"{}\" was requested", id, *expected));
  }
  if (id == "custom") return descriptor_from_json(member(doc, "skeleton", "/"));
  return find_descriptor(id);
}

// --- writing helpers -------------------------------------------------------

std::string json_string(std::string_view s) { return json(std::string(s)).dump(); }

void append_vec(std::string& out, const Vec3& v) {
  fmt::format_to(std::back_inserter(out), "[{},{},{}]", format_double(v.x()), format_double(v.y()),
                 format_double(v.z()));
}

void append_mat(std::string& out, const Mat3& m) {
  out += '[';
  for (int r = 0; r < 3; ++r) {
    if (r) out += ',';
    append_vec(out, m.row(r).transpose());
  }
  out += ']';
}

void append_names(std::string& out, const std::vector<std::string>& names) {
  out += '[';
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ',';
    out += json_string(names[i]);
  }
  out += ']';
}

void append_numbers(std::string& out, const std::vector<double>& values) {
  out += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  out += ']';
}

double to_output(ChannelId id, double value, const AngleOutputOptions& options) {
  if (options.anatomical && is_hinge(id.joint) && id.channel == Channel::flexion) value = kPi - value;
  if (options.degrees) value = value * 180.0 / kPi;
  return value;
}

double from_input(ChannelId id, double value, bool degrees, bool anatomical) {
  if (degrees) value = value * kPi / 180.0;
  if (anatomical && is_hinge(id.joint) && id.channel == Channel::flexion) value = kPi - value;
  return value;
}

// --- CSV -------------------------------------------------------------------

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct CsvField {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<CsvField> split_csv(std::string_view line) {
  std::vector<CsvField> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? line.size() : comma;
    fields.push_back({trim(line.substr(start, end - start)), start + 1});
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void csv_error(std::size_t line, std::size_t column, std::string_view what) {
  throw ParseError(fmt::format("line {}, column {}: {}", line, column, what), line, column);
}

double csv_number(const CsvField& field, std::size_t line, bool allow_missing) {
  std::string_view s = field.text;
  if (allow_missing && (s.empty() || s == "nan" || s == "NaN" || s == "NAN" || s == "null")) return kNaN;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    csv_error(line, field.column, fmt::format("expected a number, got \"{}\"", field.text));
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  if (!std::isfinite(value)) return "null";
  return fmt::format("{:.17g}", value);
}

// --- keypoint sequences ----------------------------------------------------

MotionSequence parse_sequence_json(std::string_view text, const ParseOptions& options) {
  const json doc = parse_json(text);
  if (!doc.is_object()) schema_error("/", "expected an object");
  MotionSequence seq;
  seq.descriptor = resolve_descriptor(doc, options.format);
  const std::size_t joints = seq.descriptor->joint_count();
  if (const auto it = doc.find("fps"); it != doc.end()) seq.fps = number(*it, "/fps");

  const json& frames = member(doc, "frames", "/");
  if (!frames.is_array()) schema_error("/frames", "expected an array");
  const json* confidence = nullptr;
  if (const auto it = doc.find("confidence"); it != doc.end() && !it->is_null()) {
    confidence = &*it;
    if (!confidence->is_array() || confidence->size() != frames.size()) {
      throw StructuralError(fmt::format("confidence has {} frames, expected {}",
                                        confidence->is_array() ? confidence->size() : 0, frames.size()));
    }
  }

  seq.frames.reserve(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const json& frame = frames[f];
    if (!frame.is_array()) schema_error(fmt::format("/frames/{}", f), "expected an array of joints");
    if (frame.size() != joints) {
      throw StructuralError(
          fmt::format("frame {} has {} joints, format {} declares {}", f, frame.size(), seq.descriptor->id(), joints));
    }
    std::vector<Vec3> positions(joints);
    std::vector<bool> validity(joints, true);
    for (std::size_t j = 0; j < joints; ++j) {
      const std::string where = fmt::format("/frames/{}/{}", f, j);
      const json& point = frame[j];
      if (point.is_null()) {
        positions[j] = Vec3::Constant(kNaN);
        validity[j] = false;
        continue;
      }
      if (!point.is_array() || point.size() != 3) schema_error(where, "expected [x, y, z] or null");
      positions[j] = Vec3(coordinate(point[0], where), coordinate(point[1], where), coordinate(point[2], where));
    }
    if (confidence) {
      const json& row = (*confidence)[f];
      if (!row.is_array() || row.size() != joints) {
        throw StructuralError(fmt::format("confidence frame {} does not have {} entries", f, joints));
      }
      for (std::size_t j = 0; j < joints; ++j) {
        const double c = row[j].is_null() ? 0.0 : number(row[j], fmt::format("/confidence/{}/{}", f, j));
        if (!(c >= options.min_confidence)) validity[j] = false;
      }
    }
    seq.frames.emplace_back(std::move(positions), std::move(validity));
  }
  seq.check();
  return seq;
}

MotionSequence parse_sequence_csv(std::string_view text, const ParseOptions& options) {
  if (!options.format) throw ArgumentError("CSV input needs an explicit format id");
  MotionSequence seq;
  seq.descriptor = find_descriptor(*options.format);
  seq.fps = options.fps;
  const auto& names = seq.descriptor->joint_names();
  const std::size_t joints = names.size();

  struct Sample {
    Vec3 position;
    double confidence = 1.0;
    bool seen = false;
  };
  std::map<std::size_t, std::vector<Sample>> frames;

  std::size_t line_no = 0;
  std::size_t columns = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) {
      if (nl == std::string_view::npos) break;
      continue;
    }
    const auto fields = split_csv(line);
    if (columns == 0) {
      const bool header_ok = (fields.size() == 5 || fields.size() == 6) && fields[0].text == "frame" &&
                             fields[1].text == "joint" && fields[2].text == "x" && fields[3].text == "y" &&
                             fields[4].text == "z" && (fields.size() == 5 || fields[5].text == "confidence");
      if (!header_ok) csv_error(line_no, 1, "expected header frame,joint,x,y,z[,confidence]");
      columns = fields.size();
      continue;
    }
    if (fields.size() != columns) {
      csv_error(line_no, fields.back().column, fmt::format("expected {} fields, got {}", columns, fields.size()));
    }
    std::size_t frame = 0;
    {
      const auto& f = fields[0];
      const auto [ptr, ec] = std::from_chars(f.text.data(), f.text.data() + f.text.size(), frame);
      if (ec != std::errc() || ptr != f.text.data() + f.text.size() || f.text.empty()) {
        csv_error(line_no, f.column, "expected a non-negative frame index");
      }
    }
    std::size_t joint = joints;
    {
      const auto& f = fields[1];
      for (std::size_t i = 0; i < joints; ++i) {
        if (names[i] == f.text) joint = i;
      }
      if (joint == joints) {
        std::size_t index = 0;
        const auto [ptr, ec] = std::from_chars(f.text.data(), f.text.data() + f.text.size(), index);
        if (ec == std::errc() && ptr == f.text.data() + f.text.size() && !f.text.empty()) {
          if (index >= joints) {
            throw StructuralError(fmt::format("line {}: joint index {} out of range for {}", line_no, index,
                                              seq.descriptor->id()));
          }
          joint = index;
        } else {
          csv_error(line_no, f.column, fmt::format("unknown joint \"{}\"", f.text));
        }
      }
    }
    auto& samples = frames[frame];
    if (samples.empty()) samples.resize(joints);
    Sample& sample = samples[joint];
    if (sample.seen) {
      throw StructuralError(fmt::format("line {}: duplicate row for frame {} joint {}", line_no, frame, names[joint]));
    }
    sample.seen = true;
    sample.position = Vec3(csv_number(fields[2], line_no, true), csv_number(fields[3], line_no, true),
                           csv_number(fields[4], line_no, true));
    if (columns == 6) sample.confidence = csv_number(fields[5], line_no, true);
    if (nl == std::string_view::npos) break;
  }
  if (columns == 0) throw ParseError("line 1, column 1: empty CSV (no header)", 1, 1);

  std::size_t expected = 0;
  for (auto& [index, samples] : frames) {
    if (index != expected) throw StructuralError(fmt::format("CSV frames are not contiguous: missing frame {}", expected));
    ++expected;
    std::vector<Vec3> positions(joints);
    std::vector<bool> validity(joints);
    for (std::size_t j = 0; j < joints; ++j) {
      if (!samples[j].seen) {
        throw StructuralError(fmt::format("frame {} has no row for joint {}", index, names[j]));
      }
      positions[j] = samples[j].position;
      validity[j] = samples[j].confidence >= options.min_confidence;
    }
    seq.frames.emplace_back(std::move(positions), std::move(validity));
  }
  seq.check();
  return seq;
}

MotionSequence parse_sequence(std::string_view bytes, const ParseOptions& options) {
  for (char c : bytes) {
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
    if (c == '{') return parse_sequence_json(bytes, options);
    break;
  }
  return parse_sequence_csv(bytes, options);
}

std::string descriptor_to_json(const KeypointSetDescriptor& d) {
  std::string out = "{\"joints\":";
  append_names(out, d.joint_names());
  out += ",\"bones\":[";
  for (std::size_t i = 0; i < d.bones().size(); ++i) {
    if (i) out += ',';
    fmt::format_to(std::back_inserter(out), "[{},{}]", d.bones()[i].parent, d.bones()[i].child);
  }
  out += "],\"roles\":{";
  bool first = true;
  for (Role role : all_roles()) {
    const auto& source = d.source(role);
    if (!source) continue;
    if (!first) out += ',';
    first = false;
    out += json_string(role_name(role));
    out += ':';
    if (source->is_midpoint()) {
      out += '[' + json_string(d.joint_names()[source->first]) + ',' + json_string(d.joint_names()[*source->second]) + ']';
    } else {
      out += json_string(d.joint_names()[source->first]);
    }
  }
  out += "}}";
  return out;
}

DescriptorPtr parse_descriptor_json(std::string_view text) { return descriptor_from_json(parse_json(text)); }

std::string sequence_to_json(const MotionSequence& seq, const std::optional<PlacementLists>& placement) {
  seq.check();
  std::string out = "{\"format\":" + json_string(seq.descriptor->id());
  out += ",\"fps\":" + format_double(seq.fps);
  if (seq.descriptor->id() == "custom") out += ",\"skeleton\":" + descriptor_to_json(*seq.descriptor);
  if (placement) {
    out += ",\"representative\":";
    append_names(out, placement->representative);
    out += ",\"unreconstructable\":";
    append_names(out, placement->unreconstructable);
  }
  out += ",\"frames\":[";
  for (std::size_t f = 0; f < seq.frames.size(); ++f) {
    out += f ? ",\n[" : "\n[";
    const Pose& pose = seq.frames[f];
    for (std::size_t j = 0; j < pose.joint_count(); ++j) {
      if (j) out += ',';
      if (pose.valid(j)) {
        append_vec(out, pose.position(j));
      } else {
        out += "null";
      }
    }
    out += ']';
  }
  out += "]}\n";
  return out;
}

// --- angle sequences -------------------------------------------------------

std::string angles_to_json(const AngleSequence& angles, const AngleOutputOptions& options) {
  std::string out = "{\"format\":" + json_string(angles.descriptor->id());
  out += ",\"fps\":" + format_double(angles.fps);
  out += options.degrees ? ",\"units\":\"degrees\"" : ",\"units\":\"radians\"";
  out += options.anatomical ? ",\"hinge\":\"anatomical\"" : ",\"hinge\":\"interior\"";
  if (angles.descriptor->id() == "custom") out += ",\"skeleton\":" + descriptor_to_json(*angles.descriptor);
  out += ",\"layout\":[";
  for (std::size_t i = 0; i < angles.layout.size(); ++i) {
    if (i) out += ',';
    out += '[' + json_string(joint_name(angles.layout[i].joint)) + ',' + json_string(channel_name(angles.layout[i].channel)) + ']';
  }
  out += "],\"frames\":[";
  for (std::size_t f = 0; f < angles.frames.size(); ++f) {
    out += f ? ",\n[" : "\n[";
    for (std::size_t i = 0; i < angles.layout.size(); ++i) {
      if (i) out += ',';
      const auto value = angles.frames[f].get(angles.layout[i]);
      out += value ? format_double(to_output(angles.layout[i], *value, options)) : "null";
    }
    out += ']';
  }
  out += "],\n\"root\":{\"position\":[";
  for (std::size_t f = 0; f < angles.frames.size(); ++f) {
    if (f) out += ',';
    if (const auto& root = angles.frames[f].root) {
      append_vec(out, root->position);
    } else {
      out += "null";
    }
  }
  out += "],\"orientation\":[";
  for (std::size_t f = 0; f < angles.frames.size(); ++f) {
    if (f) out += ',';
    if (const auto& root = angles.frames[f].root) {
      append_mat(out, root->orientation);
    } else {
      out += "null";
    }
  }
  out += "]},\n\"bone_lengths\":{";
  const auto keys = angles.bone_lengths.keys();
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i) out += ',';
    const auto length = angles.bone_lengths.get(keys[i]);
    out += json_string(keys[i]) + ':' + (length ? format_double(*length) : "null");
  }
  out += "}}\n";
  return out;
}

std::string angles_to_csv(const AngleSequence& angles, const AngleOutputOptions& options) {
  std::string out = "frame";
  for (const ChannelId& id : angles.layout) {
    fmt::format_to(std::back_inserter(out), ",{}.{}", joint_name(id.joint), channel_name(id.channel));
  }
  out += '\n';
  for (std::size_t f = 0; f < angles.frames.size(); ++f) {
    out += std::to_string(f);
    for (const ChannelId& id : angles.layout) {
      out += ',';
      if (const auto value = angles.frames[f].get(id)) out += format_double(to_output(id, *value, options));
    }
    out += '\n';
  }
  return out;
}

AngleSequence parse_angles_json(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) schema_error("/", "expected an object");
  AngleSequence angles;
  angles.descriptor = resolve_descriptor(doc, std::nullopt);
  if (const auto it = doc.find("fps"); it != doc.end()) angles.fps = number(*it, "/fps");

  bool degrees = false;
  if (const auto it = doc.find("units"); it != doc.end()) {
    if (*it == "degrees") {
      degrees = true;
    } else if (*it != "radians") {
      schema_error("/units", "expected \"radians\" or \"degrees\"");
    }
  }
  bool anatomical = false;
  if (const auto it = doc.find("hinge"); it != doc.end()) {
    if (*it == "anatomical") {
      anatomical = true;
    } else if (*it != "interior") {
      schema_error("/hinge", "expected \"interior\" or \"anatomical\"");
    }
  }

  const json& layout = member(doc, "layout", "/");
  if (!layout.is_array()) schema_error("/layout", "expected an array");
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const std::string where = fmt::format("/layout/{}", i);
    const json& entry = layout[i];
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() || !entry[1].is_string()) {
      schema_error(where, "expected [joint, channel]");
    }
    const auto joint = joint_from_name(entry[0].get<std::string>());
    const auto channel = channel_from_name(entry[1].get<std::string>());
    if (!joint || !channel) schema_error(where, "unknown joint or channel name");
    angles.layout.push_back({*joint, *channel});
  }

  const json& frames = member(doc, "frames", "/");
  if (!frames.is_array()) schema_error("/frames", "expected an array");
  angles.frames.resize(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const json& row = frames[f];
    if (!row.is_array() || row.size() != angles.layout.size()) {
      throw StructuralError(fmt::format("angle frame {} does not have {} values", f, angles.layout.size()));
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i].is_null()) continue;
      const double value = number(row[i], fmt::format("/frames/{}/{}", f, i));
      angles.frames[f].set(angles.layout[i], from_input(angles.layout[i], value, degrees, anatomical));
    }
  }

  if (const auto it = doc.find("root"); it != doc.end()) {
    const json& positions = member(*it, "position", "/root");
    const json& orientations = member(*it, "orientation", "/root");
    if (!positions.is_array() || positions.size() != frames.size() || !orientations.is_array() ||
        orientations.size() != frames.size()) {
      throw StructuralError("root position/orientation must have one entry per frame");
    }
    for (std::size_t f = 0; f < frames.size(); ++f) {
      const json& p = positions[f];
      const json& o = orientations[f];
      if (p.is_null() || o.is_null()) continue;
      const std::string where = fmt::format("/root/.../{}", f);
      if (!p.is_array() || p.size() != 3 || !o.is_array() || o.size() != 3) {
        schema_error(where, "expected [x, y, z] and a 3x3 matrix");
      }
      RootPose root;
      for (int k = 0; k < 3; ++k) {
        root.position[k] = number(p[k], where);
        if (!o[k].is_array() || o[k].size() != 3) schema_error(where, "expected a 3x3 matrix");
        for (int c = 0; c < 3; ++c) root.orientation(k, c) = number(o[k][c], where);
      }
      angles.frames[f].root = root;
    }
  }

  if (const auto it = doc.find("bone_lengths"); it != doc.end()) {
    if (!it->is_object()) schema_error("/bone_lengths", "expected an object");
    for (const auto& [key, value] : it->items()) {
      if (value.is_null()) {
        angles.bone_lengths.set_missing(key);
      } else {
        const double length = number(value, "/bone_lengths/" + key);
        if (!(length >= 0.0)) throw DomainError(fmt::format("bone length {} is negative", key));
        angles.bone_lengths.set(key, length);
      }
    }
  }
  return angles;
}

std::string report_to_json(const RoundtripReport& r) {
  std::string out = "{\"format\":" + json_string(r.format);
  fmt::format_to(std::back_inserter(out), ",\"frames\":{}", r.frames);
  out += ",\"skeleton_height\":" + format_double(r.skeleton_height);
  out += ",\"max_error\":" + format_double(r.max_error);
  out += ",\"mean_error\":" + format_double(r.mean_error);
  out += ",\"relative_max_error\":" + format_double(r.relative_max_error());
  out += ",\"representative_max_error\":" + format_double(r.representative_max_error);
  out += ",\"representative\":";
  append_names(out, r.representative);
  out += ",\"unreconstructable\":";
  append_names(out, r.unreconstructable);
  out += ",\"orientation_unavailable\":";
  append_names(out, r.orientation_unavailable);
  out += ",\n\"frame_max_error\":";
  append_numbers(out, r.frame_max_error);
  out += "}\n";
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {} for reading", path.string()));
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(fmt::format("error while reading {}", path.string()));
  return contents;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError(fmt::format("error while writing {}", path.string()));
}

}  // namespace jointangles
