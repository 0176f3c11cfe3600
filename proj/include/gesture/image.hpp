#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "gesture/error.hpp"

namespace gesture {

/// Row-major 2-D grid with a fixed shape. The element type distinguishes
/// the pipeline's image kinds (motion accumulators, intensities, colors).
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid(std::uint32_t width, std::uint32_t height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width_ == 0 || height_ == 0) throw InvalidArgument("Grid: zero dimension");
    if (data_.size() != std::size_t{width_} * height_) throw InvalidArgument("Grid: data length != width*height");
  }
  Grid(std::uint32_t width, std::uint32_t height, const T& fill = T{})
      : Grid(width, height, std::vector<T>(std::size_t{width} * height, fill)) {}

  std::uint32_t width() const noexcept { return width_; }
  std::uint32_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  const std::vector<T>& data() const noexcept { return data_; }
  std::vector<T>& data() noexcept { return data_; }

  const T& operator()(std::uint32_t x, std::uint32_t y) const { return data_[std::size_t{y} * width_ + x]; }
  T& operator()(std::uint32_t x, std::uint32_t y) { return data_[std::size_t{y} * width_ + x]; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::uint32_t width_;
  std::uint32_t height_;
  std::vector<T> data_;
};

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

using PseudoColorImage = Grid<Rgb8>;

}  // namespace gesture
