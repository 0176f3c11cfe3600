#pragma once

// End-to-end composition: segment -> IDMM -> pseudo-color -> classify, plus
// the helpers shared by the command-line tool (input discovery, encode
// manifests, a bounded worker pool).
//
// Encode manifest, one line per encoded segment (frames 1-based inclusive):
//   <sequence_id> <segment_index> <start> <end> <png_path> [<label>]

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "gesture/annotations.hpp"
#include "gesture/classify.hpp"
#include "gesture/depth.hpp"
#include "gesture/depthio.hpp"
#include "gesture/error.hpp"
#include "gesture/idmm.hpp"
#include "gesture/qomseg.hpp"

namespace gesture {

namespace fs = std::filesystem;

inline bool is_pgm_dir(const fs::path& p) {
  if (!fs::is_directory(p)) return false;
  for (const auto& e : fs::directory_iterator(p)) {
    if (e.is_regular_file() && has_pgm_extension(e.path())) return true;
  }
  return false;
}

/// Sequence inputs under `input`: the path itself if it is a .dseq file or a
/// PGM directory, otherwise every *.dseq file and PGM subdirectory inside it,
/// sorted by name.
inline std::vector<fs::path> discover_sequences(const fs::path& input) {
  if (fs::is_regular_file(input)) return {input};
  if (!fs::is_directory(input)) throw IoError("no such input " + input.string());
  if (is_pgm_dir(input)) return {input};
  std::vector<fs::path> found;
  for (const auto& e : fs::directory_iterator(input)) {
    if ((e.is_regular_file() && e.path().extension() == ".dseq") || is_pgm_dir(e.path())) found.push_back(e.path());
  }
  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
  return found;
}

inline DepthSequence load_sequence(const fs::path& p) { return fs::is_directory(p) ? load_pgm_dir(p) : load_dseq(p); }

/// Runs fn(0..count-1) on up to `jobs` threads. The first exception thrown
/// by any call is rethrown after all workers finish.
inline void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---------------------------------------------------------------------------
// Segment spans

/// Spans to encode for training from ground truth: each interval extended
/// back by one frame so the IDMM reference is the neutral frame before the
/// gesture, as with QOM segments. Returned spans are 0-based.
inline std::vector<FrameSpan> ground_truth_spans(const IntervalList& truth, std::size_t frame_count) {
  std::vector<FrameSpan> spans;
  for (const auto& iv : truth) {
    validate(iv);
    if (iv.end > frame_count) throw InvalidArgument("ground-truth interval exceeds sequence length");
    spans.push_back({iv.start >= 2 ? iv.start - 2 : 0, iv.end - 1});
  }
  return spans;
}

struct EncodedSegment {
  std::size_t index = 0;
  FrameSpan span;
  PseudoColorImage image;
};

inline std::vector<EncodedSegment> encode_spans(const DepthSequence& seq, const std::vector<FrameSpan>& spans) {
  std::vector<EncodedSegment> out;
  out.reserve(spans.size());
  for (std::size_t k = 0; k < spans.size(); ++k) {
    out.push_back({k, spans[k], encode_segment(seq.slice(spans[k].start, spans[k].end))});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Manifest

struct ManifestEntry {
  std::string sequence_id;
  std::size_t segment_index = 0;
  std::uint32_t start = 1;  // 1-based inclusive
  std::uint32_t end = 1;
  fs::path image;
  std::optional<Label> label;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

inline std::string format_manifest_line(const ManifestEntry& e) {
  std::string line = e.sequence_id + ' ' + std::to_string(e.segment_index) + ' ' + std::to_string(e.start) + ' ' +
                     std::to_string(e.end) + ' ' + e.image.string();
  if (e.label) line += ' ' + std::to_string(*e.label);
  return line + '\n';
}

inline std::vector<ManifestEntry> parse_manifest_text(const std::string& text) {
  std::vector<ManifestEntry> entries;
  detail::for_each_line(text, [&](const std::vector<std::string>& t) {
    if (t.size() != 5 && t.size() != 6) {
      throw FormatError("manifest: expected '<sequence_id> <segment_index> <start> <end> <png_path> [<label>]'");
    }
    ManifestEntry e{t[0], detail::parse_u32(t[1], "segment index"), detail::parse_u32(t[2], "start"),
                    detail::parse_u32(t[3], "end"), t[4], std::nullopt};
    if (t.size() == 6) {
      e.label = detail::parse_u32(t[5], "label");
      if (*e.label == 0) throw FormatError("manifest: label must be positive");
    }
    entries.push_back(std::move(e));
  });
  return entries;
}

inline std::vector<ManifestEntry> parse_manifest(const fs::path& path) {
  return parse_manifest_text(detail::read_text(path));
}

// ---------------------------------------------------------------------------
// Full pipeline

/// Tiled prediction intervals (1-based) for one sequence.
inline IntervalList predict_sequence(const DepthSequence& seq, const SegmentationParams& params,
                                     const SegmentClassifier& classifier) {
  const SegmentationResult seg = segment(seq, params);
  const auto tiles = tile_segments(seg);
  IntervalList out;
  for (std::size_t k = 0; k < seg.segments.size(); ++k) {
    const auto& span = seg.segments[k];
    const Prediction p = classifier.predict(encode_segment(seq.slice(span.start, span.end)));
    out.push_back({static_cast<std::uint32_t>(tiles[k].start + 1), static_cast<std::uint32_t>(tiles[k].end + 1),
                   p.label});
  }
  return out;
}

struct PipelineConfig {
  SegmentationParams params;
  fs::path input;
  fs::path output;  // prediction file; empty = do not write
  fs::path model;
  std::size_t jobs = 1;
};

struct PipelineResult {
  AnnotationSet predictions;
  std::vector<std::string> failures;
  int exit_code = 0;
};

/// Processes every discovered sequence; a failing sequence is reported and
/// skipped. Output order and content do not depend on `jobs`.
inline PipelineResult run_pipeline(const PipelineConfig& config, const SegmentClassifier& classifier,
                                   std::ostream& log = std::cerr) {
  config.params.validate();
  if (config.jobs < 1) throw InvalidArgument("run_pipeline: jobs must be >= 1");
  const auto inputs = discover_sequences(config.input);
  if (inputs.empty()) throw IoError("run_pipeline: no sequences under " + config.input.string());

  struct Slot {
    std::string id;
    IntervalList intervals;
    std::string error;
  };
  std::vector<Slot> slots(inputs.size());
  parallel_for(inputs.size(), config.jobs, [&](std::size_t i) {
    Slot& slot = slots[i];
    slot.id = fs::is_directory(inputs[i]) ? inputs[i].filename().string() : inputs[i].stem().string();
    try {
      slot.intervals = predict_sequence(load_sequence(inputs[i]), config.params, classifier);
    } catch (const std::exception& e) {
      slot.error = e.what();
    }
  });

  PipelineResult result;
  for (auto& slot : slots) {
    if (!slot.error.empty()) {
      log << "error: " << slot.id << ": " << slot.error << '\n';
      result.failures.push_back(slot.id);
      continue;
    }
    if (!result.predictions.emplace(slot.id, std::move(slot.intervals)).second) {
      log << "error: duplicate sequence id " << slot.id << '\n';
      result.failures.push_back(slot.id);
    }
  }
  result.exit_code = result.failures.empty() ? 0 : 1;
  if (!config.output.empty()) write_annotations(result.predictions, config.output);
  return result;
}

inline PipelineResult run_pipeline(const PipelineConfig& config, std::ostream& log = std::cerr) {
  const NearestTemplateClassifier classifier(load_model(config.model));
  return run_pipeline(config, classifier, log);
}

}  // namespace gesture
