// vidfuse: key-frame sampling, flow feature images and multi-tier decision fusion.

#include "vidfuse/config.hpp"
#include "vidfuse/image_io.hpp"
#include "vidfuse/pipeline.hpp"
#include "vidfuse/records.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <set>

namespace fs = std::filesystem;
using namespace vidfuse;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw DataError(path.string() + ": write failed");
}

PipelineConfig config_from(const std::string& path) {
  return path.empty() ? PipelineConfig{} : load_config(path);
}

struct KeyframesArgs {
  std::string frames_dir, out, config, video_id, frames_out, hist_csv, disparity_csv;
  int n_kf = 0;
};

void run_keyframes(const KeyframesArgs& a) {
  PipelineConfig cfg = config_from(a.config);
  if (a.n_kf != 0) cfg.n_kf = a.n_kf;
  validate_config(cfg);

  const fs::path dir = fs::path(a.frames_dir).lexically_normal();
  const std::string video_id =
      a.video_id.empty() ? fs::absolute(dir).lexically_normal().filename().string() : a.video_id;
  const auto files = list_frame_files(dir);
  const auto frames = ingest_frame_sequence(dir);
  const KeyframeRun run = extract_keyframes(frames, cfg);

  write_text(a.out, selection_to_json(run.selection, video_id, cfg.n_kf) + "\n");

  const fs::path out_path(a.out);
  const fs::path copy_dir = a.frames_out.empty()
                                ? out_path.parent_path() / (out_path.stem().string() + "_frames")
                                : fs::path(a.frames_out);
  fs::create_directories(copy_dir);
  for (const auto& c : run.selection.chosen) {
    const fs::path& src = files[static_cast<std::size_t>(c.frame_index - 1)];
    fs::copy_file(src, copy_dir / src.filename(), fs::copy_options::overwrite_existing);
  }

  if (!a.hist_csv.empty()) {
    std::ostringstream s;
    write_histogram_csv(s, run.histograms);
    write_text(a.hist_csv, s.str());
  }
  if (!a.disparity_csv.empty()) {
    std::ostringstream s;
    write_disparity_csv(s, run.histograms, run.disparities);
    write_text(a.disparity_csv, s.str());
  }
  std::cerr << video_id << ": " << frames.size() << " frames, " << run.reduced.size()
            << " after redundancy reduction (threshold " << run.disparities.threshold << "), "
            << run.selection.chosen.size() << " key-frames"
            << (run.selection.padded() ? " (padded)" : "") << '\n';
}

struct FlowfeatArgs {
  std::string frames_dir, keyframes, out_dir, config, format = "pgm";
};

void run_flowfeat(const FlowfeatArgs& a) {
  const PipelineConfig cfg = config_from(a.config);
  const SelectionDocument sel = parse_selection_json(a.keyframes);
  const auto frames = ingest_frame_sequence(a.frames_dir);
  std::vector<int> indices;
  for (const auto& c : sel.chosen) indices.push_back(c.frame_index);
  const auto written =
      write_flow_features(frames, indices, sel.video_id, a.out_dir, cfg.flow, "." + a.format);
  std::cerr << sel.video_id << ": wrote " << written.size() << " flow images to " << a.out_dir
            << '\n';
}

struct FuseArgs {
  std::string preds, plan, out;
  int jobs = 1;
};

void run_fuse(const FuseArgs& a) {
  const PipelineConfig cfg = config_from(a.plan);
  const auto records = parse_prediction_records(fs::path(a.preds));
  if (records.empty()) throw DataError(a.preds + ": no prediction records");
  const auto bundles = group_into_bundles(records);
  const auto fused = fuse_bundles(bundles, cfg.plan, a.jobs);
  std::string text;
  for (const auto& f : fused) text += serialize_fused(f) + "\n";
  write_text(a.out, text);
  std::cerr << "fused " << fused.size() << " videos\n";
}

struct EvalArgs {
  std::string fused, labels, report, plot_csv;
};

void run_eval(const EvalArgs& a) {
  const auto fused = parse_fused(a.fused);
  const auto labels = parse_labels_csv(a.labels);
  std::vector<std::pair<int, int>> pairs;
  std::set<std::string> seen;
  int classes = 0;
  for (const auto& f : fused) {
    classes = std::max(classes, static_cast<int>(f.dist.size()));
    auto it = labels.find(f.video_id);
    if (it == labels.end()) {
      std::cerr << "warning: no label for video '" << f.video_id << "', skipped\n";
      continue;
    }
    if (!seen.insert(f.video_id).second)
      throw DataError(a.fused + ": duplicate video '" + f.video_id + "'");
    pairs.emplace_back(f.predicted_class, it->second);
  }
  for (const auto& [id, label] : labels)
    if (!seen.contains(id)) throw DataError(a.labels + ": video '" + id + "' has no fused prediction");
  for (const auto& [pred, truth] : pairs)
    if (truth >= classes || pred >= classes)
      throw DataError("label or prediction outside the " + std::to_string(classes) + " classes");

  const AccuracyReport report = evaluate_accuracy(pairs, classes);
  write_text(a.report, report_to_json(report) + "\n");
  const fs::path plot = a.plot_csv.empty()
                            ? fs::path(fs::path(a.report).replace_extension().string() + "_recall.csv")
                            : fs::path(a.plot_csv);
  std::ostringstream csv;
  write_recall_csv(csv, report);
  write_text(plot, csv.str());
  std::cout << "overall_acc " << report.overall_acc << "\nmacro_acc " << report.macro_acc << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Key-frame sampling, optical-flow feature images and biased-conflation fusion"};
  app.require_subcommand(1);

  KeyframesArgs kf;
  auto* keyframes = app.add_subcommand("keyframes", "Select key-frames from a frame directory");
  keyframes->add_option("frames_dir", kf.frames_dir, "Directory of PNG/PGM/PPM frames")->required();
  keyframes->add_option("--n-kf", kf.n_kf, "Number of key-frames (overrides config)")
      ->check(CLI::Range(2, 1 << 20));
  keyframes->add_option("--out", kf.out, "Selection JSON output")->required();
  keyframes->add_option("--config", kf.config, "Pipeline config file");
  keyframes->add_option("--video-id", kf.video_id, "Video id (default: directory name)");
  keyframes->add_option("--frames-out", kf.frames_out,
                        "Where chosen frames are copied (default: <out stem>_frames/)");
  keyframes->add_option("--hist-csv", kf.hist_csv, "Write motion histograms as CSV");
  keyframes->add_option("--disparity-csv", kf.disparity_csv, "Write temporal disparities as CSV");

  FlowfeatArgs ff;
  auto* flowfeat = app.add_subcommand("flowfeat", "Write flow-magnitude images for key-frames");
  flowfeat->add_option("frames_dir", ff.frames_dir, "Directory of PNG/PGM/PPM frames")->required();
  flowfeat->add_option("--keyframes", ff.keyframes, "Selection JSON from `keyframes`")->required();
  flowfeat->add_option("--out-dir", ff.out_dir, "Output directory")->required();
  flowfeat->add_option("--config", ff.config, "Pipeline config file");
  flowfeat->add_option("--format", ff.format, "pgm or png")->check(CLI::IsMember({"pgm", "png"}));

  FuseArgs fu;
  auto* fuse = app.add_subcommand("fuse", "Multi-tier fusion of prediction records");
  fuse->add_option("--preds", fu.preds, "Prediction JSONL")->required();
  fuse->add_option("--plan", fu.plan, "Fusion plan / pipeline config file");
  fuse->add_option("--out", fu.out, "Fused JSONL output")->required();
  fuse->add_option("--jobs", fu.jobs, "Videos fused in parallel")->check(CLI::Range(1, 1024));

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Accuracy report for fused predictions");
  eval->add_option("--fused", ev.fused, "Fused JSONL from `fuse`")->required();
  eval->add_option("--labels", ev.labels, "CSV with header video_id,label")->required();
  eval->add_option("--report", ev.report, "Report JSON output")->required();
  eval->add_option("--plot-csv", ev.plot_csv, "Recall CSV (default: <report stem>_recall.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*keyframes) run_keyframes(kf);
    if (*flowfeat) run_flowfeat(ff);
    if (*fuse) run_fuse(fu);
    if (*eval) run_eval(ev);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
