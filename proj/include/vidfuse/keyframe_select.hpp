#pragma once

#include "vidfuse/motion_features.hpp"

#include <Eigen/Dense>

#include <span>
#include <utility>
#include <vector>

namespace vidfuse {

/// Complete graph over the frames left after redundancy reduction. Node
/// timestamps are the original frame indices; edge weights are temporal
/// disparities (symmetric, zero diagonal).
struct FrameGraph {
  std::vector<int> timestamps;
  Eigen::MatrixXd weights;

  Eigen::Index size() const { return static_cast<Eigen::Index>(timestamps.size()); }
};

struct ChosenFrame {
  int frame_index = 0;
  int node = 0;
  bool padded = false;
};

struct SelectionResult {
  std::vector<std::pair<int, int>> chosen_edges;  // node pairs, in selection order
  std::vector<ChosenFrame> chosen;                // ascending frame index
  int d_low = 0;

  bool padded() const;
  std::vector<int> frame_indices() const;
};

/// floor(N / (2 n_kf - 1)): minimum timestamp gap between two key-frames.
int compute_d_low(int total_frames, int n_kf);

/// Validates a hand-built graph (sizes, symmetry, non-negative weights,
/// zero diagonal, strictly increasing timestamps); throws on violation.
void validate_frame_graph(const FrameGraph& graph);

FrameGraph build_frame_graph(std::span<const MotionHistogram> nodes);

/// Greedy distinctive-frame selection under timestamp-gap viability.
///
/// Runs ceil(n_kf/2) iterations. Each picks the heaviest viable edge; an edge
/// (i, j) is viable iff |t_i - t_j| > d_low and every terminal is more than
/// d_low away from every node chosen so far. Edges found non-viable stay
/// excluded. Ties prefer the smaller earlier timestamp, then the smaller later
/// one. For odd n_kf the final iteration keeps only the terminal farther from
/// the chosen set. Short results are padded with max-min-gap frames.
SelectionResult select_keyframes(const FrameGraph& graph, int n_kf, int total_frames);

}  // namespace vidfuse
