#pragma once

// Improved Depth Motion Map (IDMM) and its pseudo-color encoding.
//
//   IDMM[p] = sum_i |frame_i[p] - neutral[p]|
//
// accumulated without thresholding, where the neutral frame defaults to the
// first frame of the segment. The map is min-max normalized to [0, 255] per
// image and each intensity I is colored with the power rainbow transform
//
//   theta = 4*pi*I / (3*255)
//   R = ((1 + cos(theta)) / 2)^2
//   G = ((1 + cos(theta - 2*pi/3)) / 2)^2
//   B = ((1 + cos(theta - 4*pi/3)) / 2)^2
//
// then quantized to bytes with round-half-up of 255 * channel.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <string>

#include "gesture/depth.hpp"
#include "gesture/error.hpp"
#include "gesture/image.hpp"

namespace gesture {

/// Accumulated absolute depth differences; 64-bit so that (N-1) * 65535
/// never overflows.
using Idmm = Grid<std::uint64_t>;

/// Per-pixel intensities in [0, 255].
using IntensityMap = Grid<double>;

struct RainbowColor {
  double r = 0.0, g = 0.0, b = 0.0;
};

inline Idmm build_idmm(const DepthSequence& segment, const DepthFrame& neutral) {
  if (!neutral.same_shape(segment[0])) throw InvalidArgument("build_idmm: neutral frame shape differs");
  Idmm map(segment.width(), segment.height(), std::uint64_t{0});
  auto& acc = map.data();
  const auto& ref = neutral.data();
  for (const auto& frame : segment.frames()) {
    const auto& cur = frame.data();
    for (std::size_t p = 0; p < acc.size(); ++p) {
      acc[p] += static_cast<std::uint64_t>(std::abs(std::int32_t{cur[p]} - std::int32_t{ref[p]}));
    }
  }
  return map;
}

inline Idmm build_idmm(const DepthSequence& segment) { return build_idmm(segment, segment[0]); }

/// Linear map of [min, max] onto [0, 255]; a constant map becomes all zeros.
inline IntensityMap normalize(const Idmm& idmm) {
  const auto [lo_it, hi_it] = std::minmax_element(idmm.data().begin(), idmm.data().end());
  const std::uint64_t lo = *lo_it, hi = *hi_it;
  IntensityMap out(idmm.width(), idmm.height(), 0.0);
  if (hi == lo) return out;
  const double range = static_cast<double>(hi - lo);
  auto& dst = out.data();
  for (std::size_t p = 0; p < dst.size(); ++p) {
    dst[p] = 255.0 * static_cast<double>(idmm.data()[p] - lo) / range;
  }
  return out;
}

inline RainbowColor rainbow(double intensity) {
  if (!(intensity >= 0.0 && intensity <= 255.0)) {
    throw InvalidArgument("rainbow: intensity " + std::to_string(intensity) + " outside [0, 255]");
  }
  constexpr double pi = std::numbers::pi;
  const double theta = 4.0 * pi * intensity / (3.0 * 255.0);
  auto lobe = [](double phase) {
    const double h = (1.0 + std::cos(phase)) / 2.0;
    return h * h;
  };
  return {lobe(theta), lobe(theta - 2.0 * pi / 3.0), lobe(theta - 4.0 * pi / 3.0)};
}

inline std::uint8_t quantize_channel(double unit) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(255.0 * unit + 0.5), 0.0, 255.0));
}

inline Rgb8 quantize(const RainbowColor& c) { return {quantize_channel(c.r), quantize_channel(c.g), quantize_channel(c.b)}; }

inline PseudoColorImage colorize(const IntensityMap& map) {
  PseudoColorImage img(map.width(), map.height());
  for (std::size_t p = 0; p < map.size(); ++p) img.data()[p] = quantize(rainbow(map.data()[p]));
  return img;
}

/// colorize(normalize(build_idmm(segment))), optionally against an
/// externally supplied neutral frame.
inline PseudoColorImage encode_segment(const DepthSequence& segment,
                                       const std::optional<DepthFrame>& neutral = std::nullopt) {
  return colorize(normalize(neutral ? build_idmm(segment, *neutral) : build_idmm(segment)));
}

}  // namespace gesture
