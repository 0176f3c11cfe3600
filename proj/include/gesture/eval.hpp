#pragma once

// Temporal Jaccard scoring of labeled frame intervals.
//
// For one sequence s and class i, G and P are the binary frame indicators of
// the ground-truth and predicted intervals carrying label i:
//   J(s,i) = |G & P| / |G | P|, and 0 when both are empty.
// J(s) = (1 / l_s) * sum_i J(s,i) where l_s is the number of distinct
// ground-truth labels in s; classes absent from both sides contribute 0 so
// only labels present in either side are visited. The corpus score is the
// mean of J(s) over ground-truth sequences.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <iterator>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gesture/annotations.hpp"
#include "gesture/error.hpp"

namespace gesture {

struct JaccardReport {
  std::map<std::string, double> per_sequence;
  double mean = 0.0;
};

namespace detail {

inline std::vector<bool> indicator(const IntervalList& intervals, std::uint32_t horizon) {
  std::vector<bool> on(horizon, false);
  for (const auto& iv : intervals) {
    validate(iv);
    if (iv.end > horizon) {
      throw InvalidArgument("interval " + std::to_string(iv.start) + ":" + std::to_string(iv.end) +
                            " exceeds horizon " + std::to_string(horizon));
    }
    std::fill(on.begin() + (iv.start - 1), on.begin() + iv.end, true);
  }
  return on;
}

inline IntervalList with_label(const IntervalList& intervals, Label label) {
  IntervalList out;
  std::copy_if(intervals.begin(), intervals.end(), std::back_inserter(out),
               [&](const LabeledInterval& iv) { return iv.label == label; });
  return out;
}

}  // namespace detail

/// Ground truth must not overlap itself, whatever the labels.
inline void validate_ground_truth(const IntervalList& gt) {
  IntervalList sorted = gt;
  for (const auto& iv : sorted) validate(iv);
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].start <= sorted[i - 1].end) throw InvalidArgument("ground-truth intervals overlap");
  }
}

/// Labels are ignored here: callers pass the intervals of a single class.
inline double jaccard_class(const IntervalList& gt, const IntervalList& pred, std::uint32_t horizon) {
  const auto g = detail::indicator(gt, horizon);
  const auto p = detail::indicator(pred, horizon);
  std::uint64_t inter = 0, uni = 0;
  for (std::uint32_t f = 0; f < horizon; ++f) {
    inter += g[f] && p[f];
    uni += g[f] || p[f];
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

inline double jaccard_sequence(const IntervalList& gt, const IntervalList& pred, std::uint32_t horizon) {
  if (gt.empty()) throw InvalidArgument("jaccard_sequence: ground truth is empty");
  validate_ground_truth(gt);
  std::set<Label> true_labels, all_labels;
  for (const auto& iv : gt) true_labels.insert(iv.label);
  all_labels = true_labels;
  for (const auto& iv : pred) all_labels.insert(iv.label);

  double sum = 0.0;
  for (Label label : all_labels) {
    sum += jaccard_class(detail::with_label(gt, label), detail::with_label(pred, label), horizon);
  }
  return sum / static_cast<double>(true_labels.size());
}

/// A sequence missing from `pred` scores as an empty prediction; predicted
/// sequences without ground truth are not scored.
inline JaccardReport mean_jaccard(const AnnotationSet& gt, const AnnotationSet& pred, const LengthTable& horizons) {
  if (gt.empty()) throw InvalidArgument("mean_jaccard: no ground-truth sequences");
  JaccardReport report;
  static const IntervalList kEmpty;
  double sum = 0.0;
  for (const auto& [id, truth] : gt) {
    const auto h = horizons.find(id);
    if (h == horizons.end()) throw InvalidArgument("mean_jaccard: no length for sequence '" + id + "'");
    const auto p = pred.find(id);
    const double score = jaccard_sequence(truth, p == pred.end() ? kEmpty : p->second, h->second);
    report.per_sequence.emplace(id, score);
    sum += score;
  }
  report.mean = sum / static_cast<double>(gt.size());
  return report;
}

inline std::string format_report(const JaccardReport& report) {
  std::string out;
  char buf[64];
  for (const auto& [id, score] : report.per_sequence) {
    std::snprintf(buf, sizeof buf, "%.6f", score);
    out += id + ' ' + buf + '\n';
  }
  std::snprintf(buf, sizeof buf, "%.6f", report.mean);
  out += std::string("mean ") + buf + '\n';
  return out;
}

}  // namespace gesture
