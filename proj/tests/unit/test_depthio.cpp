#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "gesture/depthio.hpp"
#include "support/png_decode.hpp"
#include "support/random.hpp"
#include "support/tempdir.hpp"

using namespace gesture;

namespace {

std::vector<std::uint8_t> dseq_header(std::uint32_t w, std::uint32_t h, std::uint32_t n) {
  detail::ByteWriter bw;
  bw.raw("DSEQ");
  bw.u16(1);
  bw.u32(w);
  bw.u32(h);
  bw.u32(n);
  bw.u16(16);
  bw.u32(0);
  return bw.bytes();
}

// Byte-level PGM reader used as the widening oracle.
std::vector<std::uint16_t> raw_pgm_samples(const std::vector<std::uint8_t>& bytes, std::size_t pixels,
                                           std::size_t bytes_per) {
  std::vector<std::uint16_t> out;
  const std::size_t offset = bytes.size() - pixels * bytes_per;
  for (std::size_t i = 0; i < pixels; ++i) {
    out.push_back(bytes_per == 1 ? bytes[offset + i] : (bytes[offset + 2 * i] << 8) | bytes[offset + 2 * i + 1]);
  }
  return out;
}

}  // namespace

TEST_CASE("dseq: zero payload decodes to an all-zero frame", "[depthio]") {
  auto bytes = dseq_header(2, 2, 1);
  bytes.resize(bytes.size() + 8, 0);
  const auto seq = decode_dseq(bytes);
  REQUIRE(seq.size() == 1);
  CHECK(seq.width() == 2);
  CHECK(seq.height() == 2);
  CHECK(seq[0].data() == std::vector<DepthSample>(4, 0));
}

TEST_CASE("dseq: 2x2 single frame is 24 header bytes plus 8 payload bytes", "[depthio]") {
  const DepthSequence seq({DepthFrame(2, 2)});
  const auto bytes = encode_dseq(seq);
  CHECK(bytes.size() == kDseqHeaderBytes + 2 * 2 * 2);
  CHECK(bytes == [] {
    auto b = dseq_header(2, 2, 1);
    b.resize(32, 0);
    return b;
  }());
}

TEST_CASE("dseq: samples are little-endian", "[depthio]") {
  const DepthSequence seq({DepthFrame(1, 1, std::vector<DepthSample>{0x1234})});
  const auto bytes = encode_dseq(seq);
  CHECK(bytes[24] == 0x34);
  CHECK(bytes[25] == 0x12);
}

TEST_CASE("dseq: malformed inputs are rejected", "[depthio]") {
  SECTION("truncated payload") {
    auto bytes = dseq_header(2, 2, 3);
    bytes.resize(bytes.size() + 2 * 8, 0);
    CHECK_THROWS_AS(decode_dseq(bytes), FormatError);
  }
  SECTION("bad magic") {
    auto bytes = dseq_header(1, 1, 1);
    bytes.resize(26, 0);
    bytes[0] = 'X';
    CHECK_THROWS_AS(decode_dseq(bytes), FormatError);
  }
  SECTION("zero dimensions") {
    auto bytes = dseq_header(0, 2, 1);
    CHECK_THROWS_AS(decode_dseq(bytes), FormatError);
  }
  SECTION("huge declared count does not overflow the size check") {
    auto bytes = dseq_header(0xFFFFFFFF, 0xFFFFFFFF, 0xFFFFFFFF);
    bytes.resize(64, 0);
    CHECK_THROWS_AS(decode_dseq(bytes), FormatError);
  }
  SECTION("trailing bytes") {
    auto bytes = dseq_header(1, 1, 1);
    bytes.resize(27, 0);
    CHECK_THROWS_AS(decode_dseq(bytes), FormatError);
  }
  SECTION("missing file") {
    CHECK_THROWS_AS(load_dseq("/nonexistent/x.dseq"), IoError);
  }
}

TEST_CASE("DepthSequence rejects an empty frame list and mixed shapes", "[depthio]") {
  CHECK_THROWS_AS(DepthSequence({}), InvalidArgument);
  CHECK_THROWS_AS(DepthSequence({DepthFrame(2, 2), DepthFrame(2, 3)}), InvalidArgument);
  CHECK_THROWS_AS(DepthFrame(0, 3), InvalidArgument);
}

TEST_CASE("dseq: save/load reproduces random sequences exactly", "[depthio][property]") {
  testgen::TempDir dir;
  testgen::Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto seq = testgen::sequence(rng, testgen::uniform(rng, 1, 9), testgen::uniform(rng, 1, 9),
                                       testgen::uniform(rng, 1, 6), 0, 65535);
    const auto path = dir / "s.dseq";
    save_dseq(seq, path);
    const auto back = load_dseq(path);
    CHECK(back.frames() == seq.frames());
    CHECK(back.source_id() == "s");
    CHECK(detail::read_file(path) == encode_dseq(back));
  }
}

TEST_CASE("pgm: directory frames load in filename order", "[depthio]") {
  testgen::TempDir dir;
  save_pgm(DepthFrame(3, 2, 7), dir / "f1.pgm");
  save_pgm(DepthFrame(3, 2, 300), dir / "f0.pgm");
  const auto seq = load_pgm_dir(dir.path());
  REQUIRE(seq.size() == 2);
  CHECK(seq[0].data()[0] == 300);
  CHECK(seq[1].data()[0] == 7);
}

TEST_CASE("pgm: mixed dimensions are rejected", "[depthio]") {
  testgen::TempDir dir;
  save_pgm(DepthFrame(4, 4), dir / "a.pgm");
  save_pgm(DepthFrame(8, 8), dir / "b.pgm");
  CHECK_THROWS_AS(load_pgm_dir(dir.path()), FormatError);
}

TEST_CASE("pgm: empty directory and malformed header are rejected", "[depthio]") {
  testgen::TempDir dir;
  CHECK_THROWS_AS(load_pgm_dir(dir.path()), FormatError);
  const std::string bad = "P5\n4 x\n255\n";
  CHECK_THROWS_AS(decode_pgm({bad.begin(), bad.end()}), FormatError);
  const std::string p2 = "P2\n1 1\n255\n0\n";
  CHECK_THROWS_AS(decode_pgm({p2.begin(), p2.end()}), FormatError);
}

TEST_CASE("pgm: 8-bit samples widen losslessly, 16-bit samples are big-endian", "[depthio]") {
  testgen::Rng rng(5);
  const auto f8 = testgen::frame(rng, 5, 4, 0, 255);
  const auto b8 = encode_pgm(f8, 255);
  CHECK(decode_pgm(b8).data() == raw_pgm_samples(b8, 20, 1));

  const auto f16 = testgen::frame(rng, 5, 4, 0, 65535);
  const auto b16 = encode_pgm(f16);
  CHECK(decode_pgm(b16).data() == raw_pgm_samples(b16, 20, 2));
  CHECK(decode_pgm(b16) == f16);
}

TEST_CASE("pgm: header comments are skipped", "[depthio]") {
  std::string text = "P5\n# sensor dump\n2 1\n# max\n255\n";
  std::vector<std::uint8_t> bytes(text.begin(), text.end());
  bytes.push_back(9);
  bytes.push_back(200);
  CHECK(decode_pgm(bytes).data() == std::vector<DepthSample>{9, 200});
}

TEST_CASE("png: export decodes to the exact pixels with an independent reader", "[depthio]") {
  testgen::TempDir dir;
  SECTION("single pixel") {
    PseudoColorImage img(1, 1, Rgb8{255, 16, 16});
    export_png(img, dir / "p.png");
    CHECK(testpng::decode(dir / "p.png") == img);
  }
  SECTION("all black") {
    PseudoColorImage img(7, 3);
    export_png(img, dir / "b.png");
    const auto back = testpng::decode(dir / "b.png");
    CHECK(back == img);
  }
  SECTION("random images round-trip through export and import") {
    testgen::Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
      const auto img = testgen::image(rng, testgen::uniform(rng, 1, 40), testgen::uniform(rng, 1, 40));
      export_png(img, dir / "r.png");
      CHECK(testpng::decode(dir / "r.png") == img);
      CHECK(import_png(dir / "r.png") == img);
    }
  }
}

TEST_CASE("png: unwritable path raises IoError", "[depthio]") {
  CHECK_THROWS_AS(export_png(PseudoColorImage(1, 1), "/nonexistent/dir/x.png"), IoError);
  CHECK_THROWS_AS(import_png("/nonexistent/x.png"), IoError);
}
