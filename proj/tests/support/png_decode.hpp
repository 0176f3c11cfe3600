#pragma once

// Minimal PNG reader for 8-bit RGB, non-interlaced images: chunk walk,
// zlib inflate, scanline unfiltering. Used to check the exporter without
// going back through libpng.

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include <zlib.h>

#include "gesture/detail/bytes.hpp"
#include "gesture/image.hpp"

namespace testpng {

inline std::uint32_t be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

inline gesture::PseudoColorImage decode(const std::filesystem::path& path) {
  const auto file = gesture::detail::read_file(path);
  static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  if (file.size() < 8 || !std::equal(sig, sig + 8, file.begin())) throw std::runtime_error("not a PNG");

  std::uint32_t w = 0, h = 0;
  std::vector<std::uint8_t> idat;
  for (std::size_t pos = 8; pos + 12 <= file.size();) {
    const std::uint32_t len = be32(&file[pos]);
    const std::string type(file.begin() + pos + 4, file.begin() + pos + 8);
    const std::uint8_t* body = &file[pos + 8];
    if (type == "IHDR") {
      w = be32(body);
      h = be32(body + 4);
      if (body[8] != 8 || body[9] != 2 || body[12] != 0) throw std::runtime_error("not 8-bit RGB non-interlaced");
    } else if (type == "IDAT") {
      idat.insert(idat.end(), body, body + len);
    } else if (type == "IEND") {
      break;
    }
    pos += 12 + len;
  }

  const std::size_t stride = std::size_t{w} * 3;
  std::vector<std::uint8_t> raw((stride + 1) * h);
  uLongf raw_len = raw.size();
  if (uncompress(raw.data(), &raw_len, idat.data(), idat.size()) != Z_OK || raw_len != raw.size()) {
    throw std::runtime_error("inflate failed");
  }

  std::vector<std::uint8_t> pix(stride * h);
  for (std::size_t y = 0; y < h; ++y) {
    const std::uint8_t filter = raw[y * (stride + 1)];
    const std::uint8_t* in = &raw[y * (stride + 1) + 1];
    std::uint8_t* out = &pix[y * stride];
    const std::uint8_t* up = y ? &pix[(y - 1) * stride] : nullptr;
    for (std::size_t i = 0; i < stride; ++i) {
      const int a = i >= 3 ? out[i - 3] : 0;
      const int b = up ? up[i] : 0;
      const int c = (up && i >= 3) ? up[i - 3] : 0;
      int pred = 0;
      switch (filter) {
        case 0: pred = 0; break;
        case 1: pred = a; break;
        case 2: pred = b; break;
        case 3: pred = (a + b) / 2; break;
        case 4: {
          const int p = a + b - c, pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
          pred = (pa <= pb && pa <= pc) ? a : (pb <= pc ? b : c);
          break;
        }
        default: throw std::runtime_error("bad filter type");
      }
      out[i] = static_cast<std::uint8_t>(in[i] + pred);
    }
  }

  gesture::PseudoColorImage img(w, h);
  for (std::size_t i = 0; i < img.size(); ++i) img.data()[i] = {pix[3 * i], pix[3 * i + 1], pix[3 * i + 2]};
  return img;
}

}  // namespace testpng
