#pragma once

#include "vidfuse/config.hpp"
#include "vidfuse/keyframe_select.hpp"
#include "vidfuse/motion_features.hpp"
#include "vidfuse/records.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace vidfuse {

/// Everything produced while key-framing one video.
struct KeyframeRun {
  std::vector<MotionHistogram> histograms;  // frames 1..N-1 (flow k -> k+1)
  DisparitySeries disparities;
  std::vector<int> reduced;                 // frame indices surviving redundancy reduction
  FrameGraph graph;
  SelectionResult selection;
};

/// Flow -> motion histograms -> redundancy reduction -> greedy selection.
/// Needs at least 4 frames (three histograms, two disparities).
KeyframeRun extract_keyframes(std::span<const Frame> frames, const PipelineConfig& config);

/// Writes `<video_id>_k<frame_index>_flow.<ext>` for every selected frame,
/// computed from the flow between that frame and the next one.
std::vector<std::filesystem::path> write_flow_features(std::span<const Frame> frames,
                                                       std::span<const int> frame_indices,
                                                       const std::string& video_id,
                                                       const std::filesystem::path& out_dir,
                                                       const HornSchunckParams& flow,
                                                       const std::string& extension = ".pgm");

/// Runs multi_tier_fuse on every bundle using up to `jobs` threads. Output
/// order follows the input order and does not depend on `jobs`.
std::vector<FusedPrediction> fuse_bundles(std::span<const PredictionBundle> bundles,
                                          const FusionPlan& plan, int jobs = 1);

}  // namespace vidfuse
