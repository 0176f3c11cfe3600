#pragma once

// Annotation / prediction interchange text format, one line per sequence:
//
//   <sequence_id> <start>:<end>:<label> [<start>:<end>:<label> ...]
//
// Frames are 1-based and inclusive; labels are positive integers. A line
// holding only the id is a sequence with no intervals. Blank lines are
// ignored.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gesture/detail/bytes.hpp"
#include "gesture/error.hpp"

namespace gesture {

using Label = std::uint32_t;

struct LabeledInterval {
  std::uint32_t start = 1;  // 1-based, inclusive
  std::uint32_t end = 1;    // 1-based, inclusive
  Label label = 1;

  std::uint32_t length() const noexcept { return end - start + 1; }
  friend bool operator==(const LabeledInterval&, const LabeledInterval&) = default;
};

inline void validate(const LabeledInterval& iv) {
  if (iv.start < 1) throw InvalidArgument("interval start must be >= 1");
  if (iv.start > iv.end) throw InvalidArgument("interval start > end");
  if (iv.label < 1) throw InvalidArgument("interval label must be positive");
}

using IntervalList = std::vector<LabeledInterval>;
using AnnotationSet = std::map<std::string, IntervalList>;

/// Per-sequence frame counts, keyed by sequence id.
using LengthTable = std::map<std::string, std::uint32_t>;

namespace detail {

inline std::uint32_t parse_u32(std::string_view s, std::string_view what) {
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw FormatError("malformed " + std::string(what) + ": '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::istringstream in(text);
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    try {
      fn(tokens);
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const InvalidArgument& e) {
      throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

inline std::string read_text(const std::filesystem::path& path) {
  auto bytes = read_file(path);
  return {bytes.begin(), bytes.end()};
}

}  // namespace detail

inline LabeledInterval parse_interval(std::string_view token) {
  const auto c1 = token.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : token.find(':', c1 + 1);
  if (c2 == std::string_view::npos || token.find(':', c2 + 1) != std::string_view::npos) {
    throw FormatError("expected <start>:<end>:<label>, got '" + std::string(token) + "'");
  }
  LabeledInterval iv{detail::parse_u32(token.substr(0, c1), "start"),
                     detail::parse_u32(token.substr(c1 + 1, c2 - c1 - 1), "end"),
                     detail::parse_u32(token.substr(c2 + 1), "label")};
  validate(iv);
  return iv;
}

inline AnnotationSet parse_annotations_text(const std::string& text) {
  AnnotationSet set;
  detail::for_each_line(text, [&](const std::vector<std::string>& tokens) {
    auto [it, inserted] = set.try_emplace(tokens[0]);
    if (!inserted) throw FormatError("duplicate sequence id '" + tokens[0] + "'");
    for (std::size_t i = 1; i < tokens.size(); ++i) it->second.push_back(parse_interval(tokens[i]));
  });
  return set;
}

inline std::string format_annotations(const AnnotationSet& set) {
  std::string out;
  for (const auto& [id, intervals] : set) {
    out += id;
    for (const auto& iv : intervals) {
      validate(iv);
      out += ' ' + std::to_string(iv.start) + ':' + std::to_string(iv.end) + ':' + std::to_string(iv.label);
    }
    out += '\n';
  }
  return out;
}

inline AnnotationSet parse_annotations(const std::filesystem::path& path) {
  return parse_annotations_text(detail::read_text(path));
}

inline void write_annotations(const AnnotationSet& set, const std::filesystem::path& path) {
  detail::write_text(path, format_annotations(set));
}

// Lengths file: "<sequence_id> <frame_count>" per line.

inline LengthTable parse_lengths_text(const std::string& text) {
  LengthTable table;
  detail::for_each_line(text, [&](const std::vector<std::string>& tokens) {
    if (tokens.size() != 2) throw FormatError("expected '<sequence_id> <frame_count>'");
    auto frames = detail::parse_u32(tokens[1], "frame count");
    if (frames == 0) throw FormatError("frame count must be positive");
    if (!table.emplace(tokens[0], frames).second) throw FormatError("duplicate sequence id '" + tokens[0] + "'");
  });
  return table;
}

inline std::string format_lengths(const LengthTable& table) {
  std::string out;
  for (const auto& [id, frames] : table) out += id + ' ' + std::to_string(frames) + '\n';
  return out;
}

inline LengthTable parse_lengths(const std::filesystem::path& path) {
  return parse_lengths_text(detail::read_text(path));
}

inline void write_lengths(const LengthTable& table, const std::filesystem::path& path) {
  detail::write_text(path, format_lengths(table));
}

}  // namespace gesture
