#pragma once

// Synthetic multi-gesture depth sequences with known boundaries.
//
// Layout: neutral_gap neutral frames, then gesture_count blocks each followed
// by neutral_gap neutral frames. Inside a block a disc covering at least 10%
// of the frame is pushed `amplitude` depth units towards (or, if the neutral
// depth is too shallow, away from) the camera and travels along a quadratic
// Bezier path. The path depends only on the label, so equal labels render
// equal blocks for equal lengths. The config seed drives label draws, block
// lengths and the Gaussian noise added after rendering.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gesture/annotations.hpp"
#include "gesture/depth.hpp"
#include "gesture/error.hpp"

namespace gesture {

struct SynthConfig {
  std::uint32_t width = 64;
  std::uint32_t height = 64;
  std::uint32_t gesture_count = 5;
  std::vector<Label> labels = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  DepthSample neutral_depth = 2000;
  std::pair<std::uint32_t, std::uint32_t> gesture_length_range = {24, 36};
  std::uint32_t neutral_gap = 5;
  std::uint32_t amplitude = 400;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (width == 0 || height == 0) throw InvalidArgument("synth: zero frame dimension");
    if (labels.empty()) throw InvalidArgument("synth: no labels to draw from");
    for (Label l : labels) {
      if (l == 0) throw InvalidArgument("synth: labels must be positive");
    }
    if (gesture_length_range.first < 1 || gesture_length_range.first > gesture_length_range.second) {
      throw InvalidArgument("synth: gesture length range must satisfy 1 <= min <= max");
    }
    if (neutral_gap < 1) throw InvalidArgument("synth: neutral_gap must be >= 1");
    if (amplitude < 1) throw InvalidArgument("synth: amplitude must be >= 1");
    if (amplitude > neutral_depth && std::uint32_t{neutral_depth} + amplitude > 65535) {
      throw InvalidArgument("synth: amplitude does not fit the 16-bit depth range");
    }
    if (!(noise_sigma >= 0.0)) throw InvalidArgument("synth: noise_sigma must be >= 0");
  }
};

struct SynthOutput {
  DepthSequence sequence;
  IntervalList ground_truth;
  DepthFrame neutral_frame;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Smallest disc radius covering >= 10% of the frame.
inline std::uint32_t blob_radius(std::uint32_t w, std::uint32_t h) {
  const auto need = static_cast<std::uint64_t>(std::ceil(0.1 * w * h));
  for (std::uint32_t r = 0; 2 * r + 1 <= std::min(w, h); ++r) {
    std::uint64_t area = 0;
    const auto ir = static_cast<std::int64_t>(r);
    for (std::int64_t dy = -ir; dy <= ir; ++dy)
      for (std::int64_t dx = -ir; dx <= ir; ++dx) area += dx * dx + dy * dy <= ir * ir;
    if (area >= need) return r;
  }
  throw InvalidArgument("synth: frame too small for a 10% blob");
}

struct Point {
  double x, y;
};

}  // namespace detail

/// Seed of the label-specific trajectory.
inline std::uint64_t gesture_seed(Label label) { return detail::splitmix64(0x5EED0000ull + label); }

/// Noise-free frames of one gesture block.
inline std::vector<DepthFrame> render_gesture(const SynthConfig& config, Label label, std::uint32_t length) {
  const std::uint32_t w = config.width, h = config.height;
  const std::uint32_t r = detail::blob_radius(w, h);
  std::mt19937_64 rng(gesture_seed(label));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  detail::Point ctrl[3];
  for (auto& p : ctrl) p = {unit(rng), unit(rng)};

  const bool toward = config.amplitude <= config.neutral_depth;
  const auto blob_depth = static_cast<DepthSample>(toward ? config.neutral_depth - config.amplitude
                                                          : config.neutral_depth + config.amplitude);
  const double span_x = static_cast<double>(w - 1 - 2 * r);
  const double span_y = static_cast<double>(h - 1 - 2 * r);
  const auto ir = static_cast<std::int64_t>(r);

  std::vector<DepthFrame> frames;
  frames.reserve(length);
  for (std::uint32_t i = 0; i < length; ++i) {
    const double u = length == 1 ? 0.5 : static_cast<double>(i) / (length - 1);
    const double a = (1 - u) * (1 - u), b = 2 * u * (1 - u), c = u * u;
    const double px = a * ctrl[0].x + b * ctrl[1].x + c * ctrl[2].x;
    const double py = a * ctrl[0].y + b * ctrl[1].y + c * ctrl[2].y;
    const auto cx = static_cast<std::int64_t>(r + std::lround(px * span_x));
    const auto cy = static_cast<std::int64_t>(r + std::lround(py * span_y));

    DepthFrame frame(w, h, config.neutral_depth);
    for (std::int64_t dy = -ir; dy <= ir; ++dy) {
      for (std::int64_t dx = -ir; dx <= ir; ++dx) {
        if (dx * dx + dy * dy <= ir * ir) {
          frame.data()[static_cast<std::size_t>((cy + dy) * w + (cx + dx))] = blob_depth;
        }
      }
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

inline SynthOutput generate(const SynthConfig& config, std::string source_id = {}) {
  config.validate();
  std::mt19937_64 rng(detail::splitmix64(config.seed));
  const DepthFrame neutral(config.width, config.height, config.neutral_depth);

  std::vector<DepthFrame> frames(config.neutral_gap, neutral);
  IntervalList truth;
  std::vector<Label> deck;
  std::uniform_int_distribution<std::uint32_t> length_dist(config.gesture_length_range.first,
                                                          config.gesture_length_range.second);
  for (std::uint32_t g = 0; g < config.gesture_count; ++g) {
    if (deck.empty()) {
      deck = config.labels;
      std::shuffle(deck.begin(), deck.end(), rng);
    }
    const Label label = deck.back();
    deck.pop_back();
    const std::uint32_t length = length_dist(rng);

    const auto start = static_cast<std::uint32_t>(frames.size()) + 1;
    auto block = render_gesture(config, label, length);
    frames.insert(frames.end(), std::make_move_iterator(block.begin()), std::make_move_iterator(block.end()));
    truth.push_back({start, start + length - 1, label});
    frames.insert(frames.end(), config.neutral_gap, neutral);
  }

  if (config.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, config.noise_sigma);
    for (auto& frame : frames) {
      for (auto& s : frame.data()) s = static_cast<DepthSample>(std::clamp(std::round(s + noise(rng)), 0.0, 65535.0));
    }
  }
  return {DepthSequence(std::move(frames), std::move(source_id)), std::move(truth), neutral};
}

/// Sequence ids of a generated corpus: seq000, seq001, ...
inline std::string corpus_sequence_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "seq%03zu", index);
  return buf;
}

/// `count` sequences; sequence i uses seed splitmix64(config.seed + i).
inline std::vector<SynthOutput> generate_corpus(const SynthConfig& config, std::size_t count) {
  std::vector<SynthOutput> corpus;
  corpus.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    SynthConfig c = config;
    c.seed = detail::splitmix64(config.seed + i);
    corpus.push_back(generate(c, corpus_sequence_id(i)));
  }
  return corpus;
}

}  // namespace gesture
