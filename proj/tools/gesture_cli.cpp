// gesture: command-line front end for the depth-gesture pipeline.
//
//   gesture gen       synthetic .dseq corpus + ground truth + lengths
//   gesture segment   QOM segmentation of sequences
//   gesture encode    pseudo-colored IDMM PNG per segment + manifest
//   gesture train     nearest-template model from a labeled manifest
//   gesture predict   label manifest images with a model
//   gesture run       segment -> encode -> predict, writes predictions
//   gesture evaluate  mean Jaccard of predictions against ground truth
//
// Every subcommand accepts --config FILE with flat `key=value` lines (keys
// are long flag names without dashes); flags on the command line win.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gesture/gesture.hpp"

namespace fs = std::filesystem;
using namespace gesture;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SegOptions {
  std::uint32_t pixel_threshold = 60;
  double boundary_fraction = 0.125;
  double window_divisor = 2.0;
  std::optional<std::uint32_t> mean_length;
  std::string train_annotations;

  void attach(CLI::App* app) {
    app->add_option("--pixel-threshold", pixel_threshold, "Depth difference counted as movement")
        ->capture_default_str();
    app->add_option("--boundary-fraction", boundary_fraction, "Fraction of L pooled at each end")
        ->capture_default_str();
    app->add_option("--window-divisor", window_divisor, "Refinement window is L / divisor")->capture_default_str();
    app->add_option("--mean-length", mean_length, "Mean gesture length L in frames");
    app->add_option("--train-annotations", train_annotations, "Compute L from these training annotations");
  }

  SegmentationParams resolve() const {
    SegmentationParams p;
    p.pixel_threshold = pixel_threshold;
    p.boundary_fraction = boundary_fraction;
    p.window_divisor = window_divisor;
    if (mean_length) {
      p.mean_gesture_length = *mean_length;
    } else if (!train_annotations.empty()) {
      p.mean_gesture_length = mean_gesture_length(parse_annotations(train_annotations));
      std::cerr << "mean gesture length L = " << p.mean_gesture_length << '\n';
    } else {
      throw UsageError("one of --mean-length or --train-annotations is required");
    }
    try {
      p.validate();
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
    return p;
  }
};

std::string sequence_id_of(const fs::path& p) {
  return fs::is_directory(p) ? p.filename().string() : p.stem().string();
}

// Appends `--key value` for every config-file key not already given as a
// flag, so command-line values take precedence.
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
  std::string config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
  }
  if (config.empty()) return args;
  std::ifstream in(config);
  if (!in) throw UsageError("cannot read config file " + config);

  std::set<std::string> given;
  for (const auto& a : args) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos
                                                                                         : a.find('=') - 2));
  }
  for (std::string line; std::getline(in, line);) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) throw UsageError("config: expected key=value");
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError("config: empty key");
    if (!given.count(key)) {
      args.push_back("--" + key);
      args.push_back(value);
    }
  }
  return args;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path);
  return file;
}

// ---------------------------------------------------------------------------

struct GenOptions {
  std::string output;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  SynthConfig synth;
  std::uint32_t min_length = 24, max_length = 36;
  std::vector<Label> labels;
};

int cmd_gen(const GenOptions& o) {
  SynthConfig config = o.synth;
  config.seed = o.seed;
  config.gesture_length_range = {o.min_length, o.max_length};
  if (!o.labels.empty()) config.labels = o.labels;
  try {
    config.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  fs::create_directories(o.output);
  AnnotationSet truth;
  LengthTable lengths;
  for (const auto& out : generate_corpus(config, o.count)) {
    const auto& id = out.sequence.source_id();
    save_dseq(out.sequence, fs::path(o.output) / (id + ".dseq"));
    truth[id] = out.ground_truth;
    lengths[id] = static_cast<std::uint32_t>(out.sequence.size());
  }
  write_annotations(truth, fs::path(o.output) / "gt.txt");
  write_lengths(lengths, fs::path(o.output) / "lengths.txt");
  std::cerr << "generated " << o.count << " sequence(s) in " << o.output << '\n';
  return kExitOk;
}

int cmd_segment(const std::string& input, const std::string& output, const SegOptions& seg) {
  const auto params = seg.resolve();
  const auto inputs = discover_sequences(input);
  if (inputs.empty()) throw IoError("no sequences under " + input);
  std::ofstream file;
  std::ostream& out = open_output(output, file);
  int status = kExitOk;
  for (const auto& path : inputs) {
    try {
      const auto result = segment(load_sequence(path), params);
      std::string line = sequence_id_of(path);
      for (const auto& s : result.segments) line += ' ' + std::to_string(s.start + 1) + ':' + std::to_string(s.end + 1);
      out << line << '\n';
    } catch (const std::exception& e) {
      std::cerr << "error: " << path.string() << ": " << e.what() << '\n';
      status = kExitFailed;
    }
  }
  return status;
}

int cmd_encode(const std::string& input, const std::string& output, const std::string& gt_path,
               const SegOptions& seg) {
  std::optional<SegmentationParams> params;
  AnnotationSet truth;
  if (gt_path.empty()) {
    params = seg.resolve();
  } else {
    truth = parse_annotations(gt_path);
  }
  const auto inputs = discover_sequences(input);
  if (inputs.empty()) throw IoError("no sequences under " + input);
  fs::create_directories(output);

  std::string manifest;
  int status = kExitOk;
  for (const auto& path : inputs) {
    const std::string id = sequence_id_of(path);
    try {
      const DepthSequence seq = load_sequence(path);
      std::vector<FrameSpan> spans;
      const IntervalList* labels = nullptr;
      if (params) {
        spans = segment(seq, *params).segments;
      } else {
        const auto it = truth.find(id);
        if (it == truth.end()) throw InvalidArgument("no ground truth for sequence");
        labels = &it->second;
        spans = ground_truth_spans(it->second, seq.size());
      }
      for (const auto& enc : encode_spans(seq, spans)) {
        char name[64];
        std::snprintf(name, sizeof name, "_%03zu.png", enc.index);
        const fs::path png = fs::path(output) / (id + name);
        export_png(enc.image, png);
        ManifestEntry entry{id, enc.index, static_cast<std::uint32_t>(enc.span.start + 1),
                            static_cast<std::uint32_t>(enc.span.end + 1), png, std::nullopt};
        if (labels) entry.label = (*labels)[enc.index].label;
        manifest += format_manifest_line(entry);
      }
    } catch (const std::exception& e) {
      std::cerr << "error: " << id << ": " << e.what() << '\n';
      status = kExitFailed;
    }
  }
  gesture::detail::write_text(fs::path(output) / "manifest.txt", manifest);
  return status;
}

int cmd_train(const std::string& input, const std::string& model_path, std::uint16_t side) {
  if (side == 0) throw UsageError("--side must be >= 1");
  std::vector<LabeledImage> samples;
  for (const auto& e : parse_manifest(input)) {
    if (!e.label) throw FormatError("manifest entry " + e.image.string() + " has no label");
    samples.push_back({import_png(e.image), *e.label});
  }
  const auto model = train(samples, side);
  save_model(model, model_path);
  std::cerr << "trained " << model.templates().size() << " templates over " << model.label_set().size()
            << " labels\n";
  return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& input, const std::string& output) {
  const auto model = load_model(model_path);
  std::ofstream file;
  std::ostream& out = open_output(output, file);
  char dist[64];
  if (fs::path(input).extension() == ".png") {
    const auto p = predict(model, import_png(input));
    std::snprintf(dist, sizeof dist, "%.6f", p.distance);
    out << input << ' ' << p.label << ' ' << dist << '\n';
    return kExitOk;
  }
  for (const auto& e : parse_manifest(input)) {
    const auto p = predict(model, import_png(e.image));
    std::snprintf(dist, sizeof dist, "%.6f", p.distance);
    out << e.sequence_id << ' ' << e.segment_index << ' ' << p.label << ' ' << dist << '\n';
  }
  return kExitOk;
}

int cmd_run(const std::string& input, const std::string& output, const std::string& model, std::size_t jobs,
            const SegOptions& seg) {
  if (jobs < 1) throw UsageError("--jobs must be >= 1");
  PipelineConfig config{seg.resolve(), input, output, model, jobs};
  const auto result = run_pipeline(config);
  if (output.empty()) std::cout << format_annotations(result.predictions);
  std::cerr << "predicted " << result.predictions.size() << " sequence(s), " << result.failures.size()
            << " failed\n";
  return result.exit_code;
}

int cmd_evaluate(const std::string& gt, const std::string& pred, const std::string& lengths) {
  const auto report = mean_jaccard(parse_annotations(gt), parse_annotations(pred), parse_lengths(lengths));
  std::cout << format_report(report);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous gesture recognition from depth sequences"};
  app.require_subcommand(1);

  std::string input, output, model, gt, pred, lengths;
  std::size_t jobs = 1;
  std::uint16_t side = kDefaultThumbnailSide;
  std::string config;
  SegOptions seg;
  GenOptions gen;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Flat key=value file; command-line flags win");
  };

  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic corpus");
  gen_cmd->add_option("--output", gen.output, "Output directory")->required();
  gen_cmd->add_option("--count", gen.count, "Number of sequences")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--width", gen.synth.width)->capture_default_str();
  gen_cmd->add_option("--height", gen.synth.height)->capture_default_str();
  gen_cmd->add_option("--gestures", gen.synth.gesture_count, "Gestures per sequence")->capture_default_str();
  gen_cmd->add_option("--labels", gen.labels, "Label ids to draw from (default 1..10)")->delimiter(',');
  gen_cmd->add_option("--min-length", gen.min_length)->capture_default_str();
  gen_cmd->add_option("--max-length", gen.max_length)->capture_default_str();
  gen_cmd->add_option("--gap", gen.synth.neutral_gap, "Neutral frames around gestures")->capture_default_str();
  gen_cmd->add_option("--amplitude", gen.synth.amplitude)->capture_default_str();
  gen_cmd->add_option("--noise", gen.synth.noise_sigma, "Gaussian depth noise sigma")->capture_default_str();
  gen_cmd->add_option("--neutral-depth", gen.synth.neutral_depth)->capture_default_str();
  add_config(gen_cmd);

  auto* seg_cmd = app.add_subcommand("segment", "Segment sequences into gestures");
  seg_cmd->add_option("--input", input, ".dseq file, PGM directory, or directory of sequences")->required();
  seg_cmd->add_option("--output", output, "Output file (default stdout)");
  seg.attach(seg_cmd);
  add_config(seg_cmd);

  auto* enc_cmd = app.add_subcommand("encode", "Write a pseudo-colored IDMM per segment");
  enc_cmd->add_option("--input", input)->required();
  enc_cmd->add_option("--output", output, "Output directory")->required();
  enc_cmd->add_option("--gt", gt, "Encode ground-truth intervals (labeled manifest) instead of segmenting");
  seg.attach(enc_cmd);
  add_config(enc_cmd);

  auto* train_cmd = app.add_subcommand("train", "Train the nearest-template classifier");
  train_cmd->add_option("--input", input, "Labeled encode manifest")->required();
  train_cmd->add_option("--model,--output", model, "Model file to write")->required();
  train_cmd->add_option("--side", side, "Thumbnail side length")->capture_default_str();
  add_config(train_cmd);

  auto* pred_cmd = app.add_subcommand("predict", "Classify encoded segments");
  pred_cmd->add_option("--model", model)->required();
  pred_cmd->add_option("--input", input, "Encode manifest or a single PNG")->required();
  pred_cmd->add_option("--output", output, "Output file (default stdout)");
  add_config(pred_cmd);

  auto* run_cmd = app.add_subcommand("run", "Full pipeline: segment, encode, classify");
  run_cmd->add_option("--input", input)->required();
  run_cmd->add_option("--model", model)->required();
  run_cmd->add_option("--output", output, "Prediction file (default stdout)");
  run_cmd->add_option("--jobs", jobs, "Worker threads")->capture_default_str();
  seg.attach(run_cmd);
  add_config(run_cmd);

  auto* eval_cmd = app.add_subcommand("evaluate", "Mean Jaccard index");
  eval_cmd->add_option("--gt", gt)->required();
  eval_cmd->add_option("--pred", pred)->required();
  eval_cmd->add_option("--lengths", lengths)->required();
  add_config(eval_cmd);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = apply_config_file(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen);
    if (*seg_cmd) return cmd_segment(input, output, seg);
    if (*enc_cmd) return cmd_encode(input, output, gt, seg);
    if (*train_cmd) return cmd_train(input, model, side);
    if (*pred_cmd) return cmd_predict(model, input, output);
    if (*run_cmd) return cmd_run(input, output, model, jobs, seg);
    if (*eval_cmd) return cmd_evaluate(gt, pred, lengths);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}
