#include "vidfuse/fusion_engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace vidfuse {

namespace {

ProbDist fold(std::span<const ProbDist> dists, int* fold_count, const char* what) {
  if (dists.empty()) throw std::invalid_argument(std::string(what) + ": no distributions");
  for (const auto& d : dists)
    if (d.size() != dists.front().size())
      throw std::invalid_argument(std::string(what) + ": class counts differ");
  ProbDist acc = dists.front();
  for (const auto& d : dists.subspan(1)) {
    acc = biased_conflate(acc, d);
    if (fold_count) ++*fold_count;
  }
  return acc;
}

std::vector<std::string> resolve_order(const PredictionBundle& bundle, const FusionPlan& plan) {
  if (plan.modality_order.empty()) return bundle.modalities;
  for (const auto& m : bundle.modalities)
    if (std::find(plan.modality_order.begin(), plan.modality_order.end(), m) ==
        plan.modality_order.end())
      throw std::invalid_argument("fusion plan does not list modality '" + m + "'");
  std::vector<std::string> order;
  for (const auto& m : plan.modality_order)
    if (std::find(bundle.modalities.begin(), bundle.modalities.end(), m) != bundle.modalities.end())
      order.push_back(m);
  return order;
}

}  // namespace

ProbDist cross_fuse(std::span<const ProbDist> dists, int* fold_count) {
  return fold(dists, fold_count, "cross_fuse");
}

ProbDist self_fuse(std::span<const ProbDist> dists, int* fold_count) {
  return fold(dists, fold_count, "self_fuse");
}

ProbDist average_fuse(std::span<const ProbDist> dists) {
  if (dists.empty()) throw std::invalid_argument("average_fuse: no distributions");
  ProbDist acc = ProbDist::Zero(dists.front().size());
  for (const auto& d : dists) {
    if (d.size() != acc.size()) throw std::invalid_argument("average_fuse: class counts differ");
    acc += d;
  }
  return acc / acc.sum();
}

ProbDist multi_tier_fuse(const PredictionBundle& bundle, const FusionPlan& plan,
                         FusionTrace* trace) {
  FusionTrace local;
  FusionTrace& tr = trace ? *trace : local;
  tr = FusionTrace{};
  tr.modality_order = resolve_order(bundle, plan);

  // Gather per-modality streams in fold order.
  std::vector<const std::vector<ProbDist>*> frame_streams;
  std::vector<ProbDist> video_level;
  Eigen::Index classes = -1;
  auto check_classes = [&classes](const ProbDist& d) {
    if (classes < 0) classes = d.size();
    if (d.size() != classes) throw std::invalid_argument("bundle mixes class counts");
  };
  for (const auto& m : tr.modality_order) {
    if (auto it = bundle.frame_preds.find(m); it != bundle.frame_preds.end() && !it->second.empty()) {
      if (!frame_streams.empty() && frame_streams.front()->size() != it->second.size())
        throw std::invalid_argument("bundle modalities have different key-frame counts");
      for (const auto& d : it->second) check_classes(d);
      frame_streams.push_back(&it->second);
    }
    if (auto it = bundle.video_preds.find(m); it != bundle.video_preds.end()) {
      check_classes(it->second);
      video_level.push_back(it->second);
    }
  }
  if (frame_streams.empty() && video_level.empty())
    throw std::invalid_argument("bundle '" + bundle.video_id + "' has no predictions");

  std::optional<ProbDist> from_frames;
  if (!frame_streams.empty()) {
    const std::size_t n_frames = frame_streams.front()->size();
    if (plan.frame_tiers == FrameTierOrder::CrossThenSelf) {
      std::vector<ProbDist> per_frame;
      per_frame.reserve(n_frames);
      std::vector<ProbDist> across(frame_streams.size());
      for (std::size_t k = 0; k < n_frames; ++k) {
        for (std::size_t m = 0; m < frame_streams.size(); ++m) across[m] = (*frame_streams[m])[k];
        per_frame.push_back(cross_fuse(across, &tr.cross_fusions));
      }
      from_frames = self_fuse(per_frame, &tr.self_fusions);
    } else {
      std::vector<ProbDist> per_modality;
      for (const auto* stream : frame_streams)
        per_modality.push_back(self_fuse(*stream, &tr.self_fusions));
      from_frames = cross_fuse(per_modality, &tr.cross_fusions);
    }
  }

  std::optional<ProbDist> from_video;
  if (!video_level.empty()) from_video = cross_fuse(video_level, &tr.cross_fusions);

  if (from_frames && from_video) {
    ++tr.final_fusions;
    return biased_conflate(*from_frames, *from_video);
  }
  return from_frames ? *from_frames : *from_video;
}

AccuracyReport evaluate_accuracy(std::span<const std::pair<int, int>> pairs, int num_classes) {
  if (pairs.empty()) throw std::invalid_argument("evaluate_accuracy: no predictions");
  int classes = num_classes;
  for (const auto& [pred, truth] : pairs) {
    if (pred < 0 || truth < 0) throw std::invalid_argument("evaluate_accuracy: negative class");
    if (num_classes > 0 && (pred >= num_classes || truth >= num_classes))
      throw std::invalid_argument("evaluate_accuracy: class index out of range");
    classes = std::max({classes, pred + 1, truth + 1});
  }

  AccuracyReport r;
  r.support.assign(classes, 0);
  r.correct.assign(classes, 0);
  r.confusion.assign(classes, std::vector<int>(classes, 0));
  int hits = 0;
  for (const auto& [pred, truth] : pairs) {
    ++r.support[truth];
    ++r.confusion[truth][pred];
    if (pred == truth) {
      ++r.correct[truth];
      ++hits;
    }
  }
  r.overall_acc = 100.0 * hits / static_cast<double>(pairs.size());
  double recall_sum = 0.0;
  int present = 0;
  for (int c = 0; c < classes; ++c) {
    if (r.support[c] == 0) continue;
    recall_sum += 100.0 * r.correct[c] / r.support[c];
    ++present;
  }
  r.macro_acc = recall_sum / present;
  return r;
}

}  // namespace vidfuse
