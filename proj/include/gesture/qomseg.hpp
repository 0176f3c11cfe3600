#pragma once

// Quantity-of-movement (QOM) temporal segmentation.
//
// The QOM between two depth frames is the number of pixels whose absolute
// depth difference reaches `pixel_threshold`. The global QOM of frame t is
// its QOM against frame 0. Frames whose global QOM is at most the boundary
// threshold (mean + 2 * population std of the global QOMs of the first and
// last ceil(boundary_fraction * L) frames) are candidate delimiters; one
// candidate per tumbling window of floor(L / window_divisor) frames is kept.
//
// Delimiter convention: segment k spans the inclusive frame range
// [delimiters[k], delimiters[k+1]], so interior delimiter frames are shared
// by the two segments they separate. When every frame must be owned by
// exactly one segment (prediction output), a shared delimiter belongs to the
// segment it starts; see tile_segments().

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <vector>

#include "gesture/annotations.hpp"
#include "gesture/depth.hpp"
#include "gesture/error.hpp"

namespace gesture {

/// Too few frames to gather the boundary statistics.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

struct QomProfile {
  std::vector<std::uint64_t> values;

  std::size_t size() const noexcept { return values.size(); }
  friend bool operator==(const QomProfile&, const QomProfile&) = default;
};

struct SegmentationParams {
  std::uint32_t pixel_threshold = 60;
  double boundary_fraction = 0.125;
  double window_divisor = 2.0;
  std::uint32_t mean_gesture_length = 0;  // L, frames; must be supplied

  void validate() const {
    if (pixel_threshold < 1) throw InvalidArgument("pixel_threshold must be >= 1");
    if (!(boundary_fraction > 0.0 && boundary_fraction < 0.5)) {
      throw InvalidArgument("boundary_fraction must lie in (0, 0.5)");
    }
    if (!(window_divisor >= 1.0)) throw InvalidArgument("window_divisor must be >= 1");
    if (mean_gesture_length < 2) throw InvalidArgument("mean_gesture_length must be >= 2");
  }

  /// ceil(boundary_fraction * L). The 1e-9 slack keeps products such as
  /// 0.1 * 30 from rounding up past an exact integer.
  std::size_t boundary_frames() const {
    return static_cast<std::size_t>(std::ceil(boundary_fraction * mean_gesture_length - 1e-9));
  }

  std::size_t window() const {
    auto w = static_cast<std::size_t>(std::floor(mean_gesture_length / window_divisor + 1e-9));
    return std::max<std::size_t>(w, 1);
  }
};

struct FrameSpan {
  std::size_t start = 0;  // 0-based, inclusive
  std::size_t end = 0;    // 0-based, inclusive

  std::size_t length() const noexcept { return end - start + 1; }
  friend bool operator==(const FrameSpan&, const FrameSpan&) = default;
};

struct SegmentationResult {
  std::vector<std::size_t> delimiters;
  std::vector<FrameSpan> segments;

  friend bool operator==(const SegmentationResult&, const SegmentationResult&) = default;
};

inline std::uint64_t qom_pair(const DepthFrame& a, const DepthFrame& b, std::uint32_t pixel_threshold) {
  if (!a.same_shape(b)) throw InvalidArgument("qom_pair: frame dimensions differ");
  const auto& da = a.data();
  const auto& db = b.data();
  std::uint64_t moved = 0;
  for (std::size_t p = 0; p < da.size(); ++p) {
    const std::int32_t diff = std::int32_t{da[p]} - std::int32_t{db[p]};
    moved += static_cast<std::uint32_t>(std::abs(diff)) >= pixel_threshold;
  }
  return moved;
}

inline QomProfile global_qom(const DepthSequence& seq, std::uint32_t pixel_threshold) {
  QomProfile profile;
  profile.values.reserve(seq.size());
  for (const auto& frame : seq.frames()) profile.values.push_back(qom_pair(frame, seq[0], pixel_threshold));
  return profile;
}

namespace detail {

// mean + 2 * population standard deviation
template <typename It>
double mean_plus_two_std(It first, It last) {
  const auto n = static_cast<double>(std::distance(first, last));
  double sum = 0.0;
  for (auto it = first; it != last; ++it) sum += static_cast<double>(*it);
  const double mean = sum / n;
  double sq = 0.0;
  for (auto it = first; it != last; ++it) {
    const double d = static_cast<double>(*it) - mean;
    sq += d * d;
  }
  return mean + 2.0 * std::sqrt(sq / n);
}

}  // namespace detail

/// Threshold from the first and last k = ceil(boundary_fraction * L) global
/// QOMs of the sequence. Throws DegenerateInput when the profile holds fewer
/// than 2k values.
inline double candidate_threshold(const QomProfile& profile, const SegmentationParams& params) {
  params.validate();
  const std::size_t k = params.boundary_frames();
  if (profile.size() < 2 * k) {
    throw DegenerateInput("candidate_threshold: profile of " + std::to_string(profile.size()) +
                          " frames is shorter than 2k = " + std::to_string(2 * k));
  }
  std::vector<std::uint64_t> sample(profile.values.begin(), profile.values.begin() + static_cast<std::ptrdiff_t>(k));
  sample.insert(sample.end(), profile.values.end() - static_cast<std::ptrdiff_t>(k), profile.values.end());
  return detail::mean_plus_two_std(sample.begin(), sample.end());
}

/// candidate_threshold, falling back to whole-profile statistics on short
/// sequences.
inline double segmentation_threshold(const QomProfile& profile, const SegmentationParams& params) {
  params.validate();
  if (profile.size() < 2 * params.boundary_frames()) {
    return detail::mean_plus_two_std(profile.values.begin(), profile.values.end());
  }
  return candidate_threshold(profile, params);
}

/// Keeps the minimum-QOM candidate (ties: smallest index) in each tumbling
/// window [0, w), [w, 2w), ...
inline std::vector<std::size_t> refine_candidates(const QomProfile& profile, const std::vector<std::size_t>& candidates,
                                                  std::size_t window) {
  if (window < 1) throw InvalidArgument("refine_candidates: window must be >= 1");
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i] >= profile.size()) throw InvalidArgument("refine_candidates: candidate out of range");
    if (i > 0 && candidates[i] <= candidates[i - 1]) {
      throw InvalidArgument("refine_candidates: candidates must be strictly increasing");
    }
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < candidates.size();) {
    const std::size_t session = candidates[i] / window;
    std::size_t best = candidates[i];
    for (; i < candidates.size() && candidates[i] / window == session; ++i) {
      if (profile.values[candidates[i]] < profile.values[best]) best = candidates[i];
    }
    kept.push_back(best);
  }
  return kept;
}

namespace detail {

// A neutral pause can straddle a window border and leave two delimiters in
// one run of consecutive candidate frames. Keep one per run: a forced
// endpoint if the run holds one, otherwise the minimum QOM (smallest index).
inline std::vector<std::size_t> collapse_candidate_runs(const QomProfile& profile, const std::vector<bool>& is_candidate,
                                                        const std::vector<std::size_t>& delimiters) {
  const std::size_t last = profile.size() - 1;
  std::vector<std::size_t> run_of(profile.size(), std::numeric_limits<std::size_t>::max());
  std::size_t run = 0;
  for (std::size_t t = 0; t < profile.size(); ++t) {
    if (is_candidate[t]) {
      run_of[t] = run;
    } else if (t > 0 && is_candidate[t - 1]) {
      ++run;
    }
  }

  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < delimiters.size();) {
    const std::size_t r = run_of[delimiters[i]];
    std::size_t j = i + 1;
    if (r != std::numeric_limits<std::size_t>::max()) {
      while (j < delimiters.size() && run_of[delimiters[j]] == r) ++j;
    }
    bool forced = false;
    for (std::size_t m = i; m < j; ++m) {
      if (delimiters[m] == 0 || delimiters[m] == last) {
        out.push_back(delimiters[m]);
        forced = true;
      }
    }
    if (!forced) {
      std::size_t best = delimiters[i];
      for (std::size_t m = i; m < j; ++m) {
        if (profile.values[delimiters[m]] < profile.values[best]) best = delimiters[m];
      }
      out.push_back(best);
    }
    i = j;
  }
  return out;
}

// Removes delimiters until every half-open segment [d[k], d[k+1]) holds at
// least two frames. A short segment joins its shorter neighbour (ties: left).
inline void merge_short_segments(std::vector<std::size_t>& d) {
  for (;;) {
    const std::size_t segments = d.size() - 1;
    if (segments <= 1) return;
    std::size_t k = 0;
    while (k < segments && d[k + 1] - d[k] >= 2) ++k;
    if (k == segments) return;

    const bool has_left = k > 0;
    const bool has_right = k + 1 < segments;
    bool into_left = has_left;
    if (has_left && has_right) into_left = (d[k] - d[k - 1]) <= (d[k + 2] - d[k + 1]);
    d.erase(d.begin() + static_cast<std::ptrdiff_t>(into_left ? k : k + 1));
  }
}

}  // namespace detail

inline std::vector<FrameSpan> segments_from_delimiters(const std::vector<std::size_t>& delimiters) {
  std::vector<FrameSpan> segments;
  for (std::size_t k = 0; k + 1 < delimiters.size(); ++k) segments.push_back({delimiters[k], delimiters[k + 1]});
  return segments;
}

inline SegmentationResult segment(const DepthSequence& seq, const SegmentationParams& params) {
  params.validate();
  if (seq.size() < 4) throw InvalidArgument("segment: sequence must hold at least 4 frames");

  const QomProfile profile = global_qom(seq, params.pixel_threshold);
  const double threshold = segmentation_threshold(profile, params);

  std::vector<bool> is_candidate(profile.size());
  std::vector<std::size_t> candidates;
  for (std::size_t t = 0; t < profile.size(); ++t) {
    is_candidate[t] = static_cast<double>(profile.values[t]) <= threshold;
    if (is_candidate[t]) candidates.push_back(t);
  }

  std::vector<std::size_t> delimiters = refine_candidates(profile, candidates, params.window());
  delimiters.push_back(0);
  delimiters.push_back(seq.last_index());
  std::sort(delimiters.begin(), delimiters.end());
  delimiters.erase(std::unique(delimiters.begin(), delimiters.end()), delimiters.end());

  delimiters = detail::collapse_candidate_runs(profile, is_candidate, delimiters);
  detail::merge_short_segments(delimiters);

  SegmentationResult result;
  result.segments = segments_from_delimiters(delimiters);
  result.delimiters = std::move(delimiters);
  return result;
}

/// Disjoint cover of [0, last]: each shared delimiter frame goes to the
/// segment it starts, and the final segment keeps the last frame.
inline std::vector<FrameSpan> tile_segments(const SegmentationResult& result) {
  std::vector<FrameSpan> tiles;
  const auto& d = result.delimiters;
  for (std::size_t k = 0; k + 1 < d.size(); ++k) {
    const bool final_segment = k + 2 == d.size();
    tiles.push_back({d[k], final_segment ? d[k + 1] : d[k + 1] - 1});
  }
  return tiles;
}

/// Mean interval length over every sequence, rounded to nearest (ties up).
inline std::uint32_t mean_gesture_length(const AnnotationSet& annotations) {
  std::uint64_t total = 0, count = 0;
  for (const auto& [id, intervals] : annotations) {
    for (const auto& iv : intervals) {
      validate(iv);
      total += iv.length();
      ++count;
    }
  }
  if (count == 0) throw InvalidArgument("mean_gesture_length: no intervals");
  return static_cast<std::uint32_t>((2 * total + count) / (2 * count));
}

}  // namespace gesture
