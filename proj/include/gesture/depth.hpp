#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gesture/error.hpp"

namespace gesture {

using DepthSample = std::uint16_t;

/// One depth map: a row-major grid of unsigned 16-bit samples.
/// Larger values are farther away; the pipeline treats them as opaque
/// magnitudes.
class DepthFrame {
 public:
  DepthFrame(std::uint32_t width, std::uint32_t height, std::vector<DepthSample> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width_ == 0 || height_ == 0) throw InvalidArgument("DepthFrame: zero dimension");
    if (data_.size() != pixel_count()) throw InvalidArgument("DepthFrame: data length != width*height");
  }

  DepthFrame(std::uint32_t width, std::uint32_t height, DepthSample fill = 0)
      : DepthFrame(width, height, std::vector<DepthSample>(std::size_t{width} * height, fill)) {}

  std::uint32_t width() const noexcept { return width_; }
  std::uint32_t height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return std::size_t{width_} * height_; }

  const std::vector<DepthSample>& data() const noexcept { return data_; }
  std::vector<DepthSample>& data() noexcept { return data_; }

  DepthSample at(std::uint32_t x, std::uint32_t y) const { return data_.at(std::size_t{y} * width_ + x); }

  bool same_shape(const DepthFrame& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const DepthFrame&, const DepthFrame&) = default;

 private:
  std::uint32_t width_;
  std::uint32_t height_;
  std::vector<DepthSample> data_;
};

/// An ordered, nonempty stream of equally sized depth frames.
class DepthSequence {
 public:
  explicit DepthSequence(std::vector<DepthFrame> frames, std::string source_id = {})
      : frames_(std::move(frames)), source_id_(std::move(source_id)) {
    if (frames_.empty()) throw InvalidArgument("DepthSequence: at least one frame required");
    for (const auto& f : frames_) {
      if (!f.same_shape(frames_.front())) throw InvalidArgument("DepthSequence: frame dimensions differ");
    }
  }

  const std::vector<DepthFrame>& frames() const noexcept { return frames_; }
  const DepthFrame& operator[](std::size_t i) const { return frames_.at(i); }
  std::size_t size() const noexcept { return frames_.size(); }
  std::size_t last_index() const noexcept { return frames_.size() - 1; }

  std::uint32_t width() const noexcept { return frames_.front().width(); }
  std::uint32_t height() const noexcept { return frames_.front().height(); }

  const std::string& source_id() const noexcept { return source_id_; }

  /// Frames first..last inclusive (0-based) as a new sequence.
  DepthSequence slice(std::size_t first, std::size_t last) const {
    if (first > last || last >= frames_.size()) throw InvalidArgument("DepthSequence::slice: bad range");
    return DepthSequence({frames_.begin() + static_cast<std::ptrdiff_t>(first),
                          frames_.begin() + static_cast<std::ptrdiff_t>(last) + 1},
                         source_id_);
  }

  friend bool operator==(const DepthSequence&, const DepthSequence&) = default;

 private:
  std::vector<DepthFrame> frames_;
  std::string source_id_;
};

}  // namespace gesture
