#include <catch2/catch_amalgamated.hpp>

#include "gesture/pipeline.hpp"
#include "gesture/synth.hpp"
#include "support/random.hpp"
#include "support/tempdir.hpp"

using namespace gesture;

namespace {

// Labels every segment with a fixed id.
class ConstantClassifier final : public SegmentClassifier {
 public:
  Prediction predict(const PseudoColorImage&) const override { return {3, 0.0}; }
};

}  // namespace

TEST_CASE("ground_truth_spans start on the preceding neutral frame", "[pipeline]") {
  const auto spans = ground_truth_spans({{1, 4, 1}, {8, 12, 2}}, 20);
  CHECK(spans[0] == FrameSpan{0, 3});
  CHECK(spans[1] == FrameSpan{6, 11});
  CHECK_THROWS_AS(ground_truth_spans({{1, 21, 1}}, 20), InvalidArgument);
}

TEST_CASE("manifest lines round-trip", "[pipeline]") {
  const std::vector<ManifestEntry> entries{{"seq000", 0, 1, 40, "out/seq000_000.png", 4},
                                           {"seq000", 1, 40, 77, "out/seq000_001.png", std::nullopt}};
  std::string text;
  for (const auto& e : entries) text += format_manifest_line(e);
  CHECK(parse_manifest_text(text) == entries);
  CHECK_THROWS_AS(parse_manifest_text("a 0 1 2\n"), FormatError);
  CHECK_THROWS_AS(parse_manifest_text("a 0 1 2 x.png 0\n"), FormatError);
}

TEST_CASE("discover_sequences finds .dseq files and PGM directories in name order", "[pipeline]") {
  testgen::TempDir dir;
  save_dseq(DepthSequence({DepthFrame(2, 2)}), dir / "b.dseq");
  std::filesystem::create_directories(dir / "a_frames");
  save_pgm(DepthFrame(2, 2), dir / "a_frames" / "0.pgm");
  std::filesystem::create_directories(dir / "empty");
  detail::write_text(dir / "notes.txt", "x");
  const auto found = discover_sequences(dir.path());
  REQUIRE(found.size() == 2);
  CHECK(found[0].filename() == "a_frames");
  CHECK(found[1].filename() == "b.dseq");
  CHECK(discover_sequences(dir / "b.dseq").size() == 1);
  CHECK(discover_sequences(dir / "empty").empty());
}

TEST_CASE("parallel_for visits every index and propagates errors", "[pipeline]") {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                    if (i == 7) throw InvalidArgument("boom");
                  }),
                  InvalidArgument);
}

TEST_CASE("predict_sequence tiles the frame range", "[pipeline]") {
  SynthConfig c;
  c.width = c.height = 24;
  c.seed = 3;
  const auto out = generate(c);
  SegmentationParams p;
  p.mean_gesture_length = 30;
  const auto intervals = predict_sequence(out.sequence, p, ConstantClassifier{});
  REQUIRE(!intervals.empty());
  CHECK(intervals.front().start == 1);
  CHECK(intervals.back().end == out.sequence.size());
  for (std::size_t k = 1; k < intervals.size(); ++k) CHECK(intervals[k].start == intervals[k - 1].end + 1);
  for (const auto& iv : intervals) CHECK(iv.label == 3);
}

TEST_CASE("run_pipeline reports failing sequences and continues", "[pipeline]") {
  testgen::TempDir dir;
  SynthConfig c;
  c.width = c.height = 16;
  c.gesture_count = 2;
  save_dseq(generate(c, "good").sequence, dir / "good.dseq");
  save_dseq(DepthSequence({DepthFrame(2, 2), DepthFrame(2, 2)}), dir / "short.dseq");
  detail::write_text(dir / "broken.dseq", "DSEQ garbage");

  PipelineConfig config;
  config.params.mean_gesture_length = 30;
  config.input = dir.path();
  config.output = dir / "pred.txt";
  std::ostringstream log;
  const auto result = run_pipeline(config, ConstantClassifier{}, log);
  CHECK(result.exit_code == 1);
  CHECK(result.failures == std::vector<std::string>{"broken", "short"});
  CHECK(result.predictions.count("good") == 1);
  CHECK(log.str().find("broken") != std::string::npos);
  CHECK(parse_annotations(dir / "pred.txt") == result.predictions);
}

TEST_CASE("run_pipeline rejects an empty input directory", "[pipeline]") {
  testgen::TempDir dir;
  PipelineConfig config;
  config.params.mean_gesture_length = 30;
  config.input = dir.path();
  config.output = dir / "pred.txt";
  CHECK_THROWS_AS(run_pipeline(config, ConstantClassifier{}), IoError);
  CHECK_FALSE(std::filesystem::exists(dir / "pred.txt"));
}
