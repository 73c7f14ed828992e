#pragma once

#include "vidfuse/conflation.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace vidfuse {

/// Predictions for one video, keyed by modality.
///
/// `frame_preds[m]` holds the per-key-frame distributions of modality m in
/// temporal order (possibly empty); `video_preds[m]` the sequence-level one.
struct PredictionBundle {
  std::string video_id;
  std::vector<std::string> modalities;
  std::map<std::string, std::vector<ProbDist>> frame_preds;
  std::map<std::string, ProbDist> video_preds;
  std::vector<int> frame_indices;  // key-frame timestamps shared by all frame streams
  std::optional<int> label;
};

/// Order in which frame-level predictions are lifted to video level.
enum class FrameTierOrder {
  CrossThenSelf,  // fuse modalities per key-frame, then fuse across key-frames
  SelfThenCross,  // fuse each modality's key-frames, then fuse across modalities
};

/// Declarative description of the fusion DAG.
struct FusionPlan {
  std::vector<std::string> modality_order;  // empty: use the bundle's order
  FrameTierOrder frame_tiers = FrameTierOrder::CrossThenSelf;
};

/// Counters filled by multi_tier_fuse, mainly for tests and diagnostics.
struct FusionTrace {
  int cross_fusions = 0;  // biased conflations across modalities
  int self_fusions = 0;   // biased conflations across key-frames
  int final_fusions = 0;  // frame-derived vs sequence-level reconciliation
  std::vector<std::string> modality_order;
};

/// Left fold of biased_conflate in the given (modality) order.
ProbDist cross_fuse(std::span<const ProbDist> dists, int* fold_count = nullptr);

/// Left fold of biased_conflate in key-frame order.
ProbDist self_fuse(std::span<const ProbDist> dists, int* fold_count = nullptr);

/// Plain arithmetic mean; kept as a comparator for the biased scheme.
ProbDist average_fuse(std::span<const ProbDist> dists);

/// Fuses a whole bundle into one video-level distribution.
///
/// Default plan: per key-frame cross-fusion, self-fusion of those results
/// (V_frames), cross-fusion of video-level predictions (V_video), then
/// biased_conflate(V_frames, V_video). A missing level is skipped.
ProbDist multi_tier_fuse(const PredictionBundle& bundle, const FusionPlan& plan = {},
                         FusionTrace* trace = nullptr);

struct AccuracyReport {
  double overall_acc = 0.0;  // percent
  double macro_acc = 0.0;    // percent, mean per-class recall over classes present
  std::vector<int> support;  // per class
  std::vector<int> correct;  // per class
  std::vector<std::vector<int>> confusion;  // [true][predicted]
};

/// `pairs` holds (predicted, truth). Classes are sized to `num_classes` or,
/// when 0, to the largest label seen.
AccuracyReport evaluate_accuracy(std::span<const std::pair<int, int>> pairs, int num_classes = 0);

}  // namespace vidfuse
