#pragma once

// Segment classification behind a narrow interface. The shipped backend is a
// nearest-neighbour store of bilinear thumbnails (default 32x32, RGB),
// compared by Euclidean distance on raw channel values.
//
// Model file (little-endian):
//   "IDNN" | version u16 = 1 | side u16 | template_count u32 |
//   template_count * (label u32, 3 * side * side float32)

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "gesture/annotations.hpp"
#include "gesture/detail/bytes.hpp"
#include "gesture/error.hpp"
#include "gesture/image.hpp"

namespace gesture {

inline constexpr std::uint16_t kDefaultThumbnailSide = 32;
inline constexpr std::uint16_t kModelVersion = 1;
inline constexpr std::size_t kModelHeaderBytes = 12;

/// Channel-major, then row-major, values in [0, 255].
using FeatureVector = std::vector<float>;

struct Prediction {
  Label label = 0;
  double distance = 0.0;
};

/// Anything that can label a pseudo-colored segment image.
class SegmentClassifier {
 public:
  virtual ~SegmentClassifier() = default;
  virtual Prediction predict(const PseudoColorImage& img) const = 0;
};

/// Bilinear resampling to side x side with pixel-centre alignment.
inline FeatureVector downsample(const PseudoColorImage& img, std::uint32_t side) {
  if (side == 0) throw InvalidArgument("downsample: side must be >= 1");
  const std::uint32_t w = img.width(), h = img.height();
  FeatureVector out(3 * std::size_t{side} * side);

  auto axis = [](std::uint32_t dst, std::uint32_t src_len, std::uint32_t dst_len) {
    double s = (dst + 0.5) * static_cast<double>(src_len) / dst_len - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src_len - 1));
    auto i0 = static_cast<std::uint32_t>(std::floor(s));
    std::uint32_t i1 = std::min(i0 + 1, src_len - 1);
    return std::tuple{i0, i1, s - i0};
  };

  for (std::uint32_t y = 0; y < side; ++y) {
    const auto [y0, y1, fy] = axis(y, h, side);
    for (std::uint32_t x = 0; x < side; ++x) {
      const auto [x0, x1, fx] = axis(x, w, side);
      for (int c = 0; c < 3; ++c) {
        auto ch = [&](std::uint32_t px, std::uint32_t py) {
          const Rgb8& v = img(px, py);
          return static_cast<double>(c == 0 ? v.r : c == 1 ? v.g : v.b);
        };
        const double top = ch(x0, y0) * (1.0 - fx) + ch(x1, y0) * fx;
        const double bottom = ch(x0, y1) * (1.0 - fx) + ch(x1, y1) * fx;
        out[(std::size_t(c) * side + y) * side + x] = static_cast<float>(top * (1.0 - fy) + bottom * fy);
      }
    }
  }
  return out;
}

inline double euclidean_distance(const FeatureVector& a, const FeatureVector& b) {
  if (a.size() != b.size()) throw InvalidArgument("euclidean_distance: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

struct Template {
  Label label = 0;
  FeatureVector feature;
  friend bool operator==(const Template&, const Template&) = default;
};

class TemplateModel {
 public:
  TemplateModel(std::uint16_t side, std::vector<Template> templates) : side_(side), templates_(std::move(templates)) {
    if (side_ == 0) throw InvalidArgument("TemplateModel: side must be >= 1");
    if (templates_.empty()) throw InvalidArgument("TemplateModel: at least one template required");
    for (const auto& t : templates_) {
      if (t.feature.size() != feature_length()) throw InvalidArgument("TemplateModel: feature length mismatch");
    }
  }

  std::uint16_t side() const noexcept { return side_; }
  std::size_t feature_length() const noexcept { return 3 * std::size_t{side_} * side_; }
  const std::vector<Template>& templates() const noexcept { return templates_; }

  std::set<Label> label_set() const {
    std::set<Label> labels;
    for (const auto& t : templates_) labels.insert(t.label);
    return labels;
  }

  friend bool operator==(const TemplateModel&, const TemplateModel&) = default;

 private:
  std::uint16_t side_;
  std::vector<Template> templates_;
};

struct LabeledImage {
  PseudoColorImage image;
  Label label;
};

inline TemplateModel train(const std::vector<LabeledImage>& samples, std::uint16_t side = kDefaultThumbnailSide) {
  if (samples.empty()) throw InvalidArgument("train: no samples");
  std::vector<Template> templates;
  templates.reserve(samples.size());
  for (const auto& s : samples) templates.push_back({s.label, downsample(s.image, side)});
  return TemplateModel(side, std::move(templates));
}

/// Nearest template; ties go to the smallest label, then the earliest
/// template.
inline Prediction predict_features(const TemplateModel& model, const FeatureVector& query) {
  if (query.size() != model.feature_length()) throw InvalidArgument("predict: feature length mismatch");
  Prediction best{0, std::numeric_limits<double>::infinity()};
  for (const auto& t : model.templates()) {
    const double d = euclidean_distance(t.feature, query);
    if (d < best.distance || (d == best.distance && t.label < best.label)) best = {t.label, d};
  }
  return best;
}

inline Prediction predict(const TemplateModel& model, const PseudoColorImage& img) {
  return predict_features(model, downsample(img, model.side()));
}

class NearestTemplateClassifier final : public SegmentClassifier {
 public:
  explicit NearestTemplateClassifier(TemplateModel model) : model_(std::move(model)) {}
  Prediction predict(const PseudoColorImage& img) const override { return gesture::predict(model_, img); }
  const TemplateModel& model() const noexcept { return model_; }

 private:
  TemplateModel model_;
};

inline std::vector<std::uint8_t> encode_model(const TemplateModel& model) {
  detail::ByteWriter w;
  w.raw("IDNN");
  w.u16(kModelVersion);
  w.u16(model.side());
  w.u32(static_cast<std::uint32_t>(model.templates().size()));
  for (const auto& t : model.templates()) {
    w.u32(t.label);
    for (float v : t.feature) w.f32(v);
  }
  return std::move(w.bytes());
}

inline TemplateModel decode_model(const std::vector<std::uint8_t>& bytes) {
  detail::ByteReader r(bytes);
  if (bytes.size() < kModelHeaderBytes) throw FormatError("model: truncated header");
  if (!r.magic("IDNN")) throw FormatError("model: bad magic");
  if (auto v = r.u16(); v != kModelVersion) throw FormatError("model: unsupported version " + std::to_string(v));
  const std::uint16_t side = r.u16();
  const std::uint32_t count = r.u32();
  if (side == 0) throw FormatError("model: zero side");
  if (count == 0) throw FormatError("model: no templates");

  const std::size_t feature_len = 3 * std::size_t{side} * side;
  const std::uint64_t record = 4 + 4 * std::uint64_t{feature_len};
  if (r.remaining() / record < count) throw FormatError("model: truncated template records");
  if (r.remaining() != record * count) throw FormatError("model: feature length mismatch with declared side");

  std::vector<Template> templates(count);
  for (auto& t : templates) {
    t.label = r.u32();
    t.feature.resize(feature_len);
    for (auto& v : t.feature) {
      v = r.f32();
      if (!(v >= 0.0f && v <= 255.0f)) throw FormatError("model: feature value outside [0, 255]");
    }
  }
  return TemplateModel(side, std::move(templates));
}

inline void save_model(const TemplateModel& model, const std::filesystem::path& path) {
  detail::write_file(path, encode_model(model));
}

inline TemplateModel load_model(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw IoError("model: no such file " + path.string());
  return decode_model(detail::read_file(path));
}

}  // namespace gesture
