#pragma once

// On-disk formats for depth sequences and pseudo-color images.
//
// .dseq (little-endian):
//   "DSEQ" | version u16 = 1 | width u32 | height u32 | frame_count u32 |
//   bits_per_sample u16 = 16 | reserved u32 = 0 | frame_count * width * height u16
// The header is 24 bytes; frames are row-major and stored back to back.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <png.h>

#include "gesture/depth.hpp"
#include "gesture/detail/bytes.hpp"
#include "gesture/error.hpp"
#include "gesture/image.hpp"

namespace gesture {

inline constexpr std::size_t kDseqHeaderBytes = 24;
inline constexpr std::uint16_t kDseqVersion = 1;

inline std::vector<std::uint8_t> encode_dseq(const DepthSequence& seq) {
  detail::ByteWriter w;
  w.raw("DSEQ");
  w.u16(kDseqVersion);
  w.u32(seq.width());
  w.u32(seq.height());
  w.u32(static_cast<std::uint32_t>(seq.size()));
  w.u16(16);
  w.u32(0);
  w.bytes().reserve(kDseqHeaderBytes + seq.size() * seq[0].pixel_count() * 2);
  for (const auto& frame : seq.frames()) {
    for (DepthSample s : frame.data()) w.u16(s);
  }
  return std::move(w.bytes());
}

inline DepthSequence decode_dseq(const std::vector<std::uint8_t>& bytes, std::string source_id = {}) {
  detail::ByteReader r(bytes);
  if (bytes.size() < kDseqHeaderBytes) throw FormatError("dseq: truncated header");
  if (!r.magic("DSEQ")) throw FormatError("dseq: bad magic");
  const auto version = r.u16();
  if (version != kDseqVersion) throw FormatError("dseq: unsupported version " + std::to_string(version));
  const std::uint32_t width = r.u32();
  const std::uint32_t height = r.u32();
  const std::uint32_t count = r.u32();
  const auto bits = r.u16();
  r.u32();  // reserved
  if (bits != 16) throw FormatError("dseq: bits_per_sample must be 16");
  if (width == 0 || height == 0) throw FormatError("dseq: zero dimensions");
  if (count == 0) throw FormatError("dseq: zero frames");

  const std::uint64_t frame_bytes = std::uint64_t{width} * height * 2;
  if (frame_bytes > r.remaining() || count > r.remaining() / frame_bytes) {
    throw FormatError("dseq: truncated payload (declared " + std::to_string(count) + " frames)");
  }
  if (r.remaining() != frame_bytes * count) throw FormatError("dseq: trailing bytes after payload");

  std::vector<DepthFrame> frames;
  frames.reserve(count);
  const std::size_t pixels = std::size_t{width} * height;
  for (std::uint32_t f = 0; f < count; ++f) {
    std::vector<DepthSample> data(pixels);
    for (auto& s : data) s = r.u16();
    frames.emplace_back(width, height, std::move(data));
  }
  return DepthSequence(std::move(frames), std::move(source_id));
}

inline DepthSequence load_dseq(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw IoError("dseq: no such file " + path.string());
  return decode_dseq(detail::read_file(path), path.stem().string());
}

inline void save_dseq(const DepthSequence& seq, const std::filesystem::path& path) {
  detail::write_file(path, encode_dseq(seq));
}

// ---------------------------------------------------------------------------
// PGM (binary P5). Samples above 255 are two bytes, big-endian.

namespace detail {

inline std::uint32_t pgm_header_field(const std::vector<std::uint8_t>& b, std::size_t& pos) {
  for (;;) {
    while (pos < b.size() && std::isspace(b[pos])) ++pos;
    if (pos < b.size() && b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  if (pos >= b.size() || !std::isdigit(b[pos])) throw FormatError("pgm: malformed header");
  std::uint64_t v = 0;
  while (pos < b.size() && std::isdigit(b[pos])) {
    v = v * 10 + (b[pos++] - '0');
    if (v > 0xFFFFFFFFu) throw FormatError("pgm: header value out of range");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace detail

inline DepthFrame decode_pgm(const std::vector<std::uint8_t>& b) {
  if (b.size() < 2 || b[0] != 'P' || b[1] != '5') throw FormatError("pgm: not a binary P5 file");
  std::size_t pos = 2;
  const auto width = detail::pgm_header_field(b, pos);
  const auto height = detail::pgm_header_field(b, pos);
  const auto maxval = detail::pgm_header_field(b, pos);
  if (pos >= b.size() || !std::isspace(b[pos])) throw FormatError("pgm: malformed header");
  ++pos;
  if (width == 0 || height == 0) throw FormatError("pgm: zero dimensions");
  if (maxval == 0 || maxval > 65535) throw FormatError("pgm: maxval out of range");

  const std::size_t bytes_per = maxval < 256 ? 1 : 2;
  const std::size_t pixels = std::size_t{width} * height;
  if (b.size() - pos < pixels * bytes_per) throw FormatError("pgm: truncated raster");

  std::vector<DepthSample> data(pixels);
  for (std::size_t i = 0; i < pixels; ++i) {
    std::uint32_t v = bytes_per == 1 ? b[pos + i] : (std::uint32_t{b[pos + 2 * i]} << 8) | b[pos + 2 * i + 1];
    if (v > maxval) throw FormatError("pgm: sample exceeds maxval");
    data[i] = static_cast<DepthSample>(v);
  }
  return DepthFrame(width, height, std::move(data));
}

inline std::vector<std::uint8_t> encode_pgm(const DepthFrame& frame, std::uint16_t maxval = 65535) {
  if (maxval == 0) throw InvalidArgument("pgm: maxval must be positive");
  std::string header = "P5\n" + std::to_string(frame.width()) + " " + std::to_string(frame.height()) + "\n" +
                       std::to_string(maxval) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (DepthSample s : frame.data()) {
    if (s > maxval) throw InvalidArgument("pgm: sample exceeds maxval");
    if (maxval < 256) {
      out.push_back(static_cast<std::uint8_t>(s));
    } else {
      out.push_back(static_cast<std::uint8_t>(s >> 8));
      out.push_back(static_cast<std::uint8_t>(s & 0xFF));
    }
  }
  return out;
}

inline void save_pgm(const DepthFrame& frame, const std::filesystem::path& path, std::uint16_t maxval = 65535) {
  detail::write_file(path, encode_pgm(frame, maxval));
}

inline bool has_pgm_extension(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".pgm";
}

/// Reads every *.pgm file in `dir` as one frame, in lexicographic filename
/// order. The directory name becomes the sequence id.
inline DepthSequence load_pgm_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("pgm: not a directory " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && has_pgm_extension(entry.path())) files.push_back(entry.path());
  }
  if (files.empty()) throw FormatError("pgm: no .pgm files in " + dir.string());
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });

  std::vector<DepthFrame> frames;
  frames.reserve(files.size());
  for (const auto& f : files) {
    frames.push_back(decode_pgm(detail::read_file(f)));
    if (!frames.back().same_shape(frames.front())) {
      throw FormatError("pgm: dimension mismatch at " + f.filename().string());
    }
  }
  return DepthSequence(std::move(frames), dir.filename().string());
}

// ---------------------------------------------------------------------------
// PNG, 8-bit RGB without alpha, through libpng's simplified API.

inline void export_png(const PseudoColorImage& img, const std::filesystem::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = img.width();
  png.height = img.height();
  png.format = PNG_FORMAT_RGB;

  std::vector<png_byte> buf;
  buf.reserve(img.size() * 3);
  for (const auto& px : img.data()) {
    buf.push_back(px.r);
    buf.push_back(px.g);
    buf.push_back(px.b);
  }
  const bool ok = png_image_write_to_file(&png, path.c_str(), 0, buf.data(), 0, nullptr) != 0;
  std::string message = png.message;
  png_image_free(&png);
  if (!ok) throw IoError("png: cannot write " + path.string() + ": " + message);
}

inline PseudoColorImage import_png(const std::filesystem::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&png, path.c_str()) == 0) {
    std::string message = png.message;
    png_image_free(&png);
    throw IoError("png: cannot read " + path.string() + ": " + message);
  }
  png.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(png));
  if (png_image_finish_read(&png, nullptr, buf.data(), 0, nullptr) == 0) {
    std::string message = png.message;
    png_image_free(&png);
    throw FormatError("png: cannot decode " + path.string() + ": " + message);
  }
  std::vector<Rgb8> pixels(std::size_t{png.width} * png.height);
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = {buf[3 * i], buf[3 * i + 1], buf[3 * i + 2]};
  const auto width = png.width, height = png.height;
  png_image_free(&png);
  return PseudoColorImage(width, height, std::move(pixels));
}

}  // namespace gesture
