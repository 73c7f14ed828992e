#include "vidfuse/pipeline.hpp"

#include "vidfuse/image_io.hpp"
#include "vidfuse/optical_flow.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;

namespace vidfuse {

KeyframeRun extract_keyframes(std::span<const Frame> frames, const PipelineConfig& config) {
  validate_config(config);
  if (frames.size() < 4)
    throw DataError("key-framing needs at least 4 frames, got " + std::to_string(frames.size()));

  KeyframeRun run;
  run.histograms.reserve(frames.size() - 1);
  for (std::size_t k = 0; k + 1 < frames.size(); ++k) {
    const auto flow = compute_dense_flow<double>(frames[k], frames[k + 1], config.flow);
    run.histograms.push_back(motion_histogram(flow, config.hist, frames[k].index));
  }
  run.disparities = redundancy_threshold(consecutive_disparities(run.histograms));
  run.reduced = reduce_redundancy(run.histograms, run.disparities.threshold);

  std::vector<MotionHistogram> nodes;
  if (run.reduced.size() < 2) {
    // A single survivor cannot form a graph; fall back to every candidate.
    nodes = run.histograms;
  } else {
    for (const auto& h : run.histograms)
      if (std::binary_search(run.reduced.begin(), run.reduced.end(), h.frame_index)) nodes.push_back(h);
  }
  run.graph = build_frame_graph(nodes);
  run.selection = select_keyframes(run.graph, config.n_kf, static_cast<int>(frames.size()));
  return run;
}

std::vector<fs::path> write_flow_features(std::span<const Frame> frames,
                                          std::span<const int> frame_indices,
                                          const std::string& video_id, const fs::path& out_dir,
                                          const HornSchunckParams& flow,
                                          const std::string& extension) {
  if (extension != ".pgm" && extension != ".png")
    throw UsageError("flow feature format must be pgm or png");
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  for (int k : frame_indices) {
    if (k < 1 || static_cast<std::size_t>(k) >= frames.size())
      throw DataError("key-frame " + std::to_string(k) + " has no successor frame (video has " +
                      std::to_string(frames.size()) + " frames)");
    const auto field = compute_dense_flow<double>(frames[k - 1], frames[k], flow);
    const fs::path out = out_dir / (video_id + "_k" + std::to_string(k) + "_flow" + extension);
    write_gray_image(out, magnitude_image(field));
    written.push_back(out);
  }
  return written;
}

std::vector<FusedPrediction> fuse_bundles(std::span<const PredictionBundle> bundles,
                                          const FusionPlan& plan, int jobs) {
  std::vector<FusedPrediction> out(bundles.size());
  auto fuse_one = [&](std::size_t i) {
    const auto& b = bundles[i];
    FusionTrace trace;
    const ProbDist d = multi_tier_fuse(b, plan, &trace);
    out[i] = FusedPrediction{b.video_id, std::vector<double>(d.begin(), d.end()), predict_class(d),
                             trace.modality_order, b.frame_indices, to_string(plan.frame_tiers)};
  };

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), bundles.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < bundles.size(); ++i) fuse_one(i);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < bundles.size();) {
        try {
          fuse_one(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace vidfuse
