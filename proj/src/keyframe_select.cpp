#include "vidfuse/keyframe_select.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace vidfuse {

bool SelectionResult::padded() const {
  return std::any_of(chosen.begin(), chosen.end(), [](const ChosenFrame& c) { return c.padded; });
}

std::vector<int> SelectionResult::frame_indices() const {
  std::vector<int> out;
  out.reserve(chosen.size());
  for (const auto& c : chosen) out.push_back(c.frame_index);
  return out;
}

int compute_d_low(int total_frames, int n_kf) {
  if (n_kf < 2) throw std::invalid_argument("compute_d_low: n_kf must be >= 2");
  if (total_frames < 1) throw std::invalid_argument("compute_d_low: need at least one frame");
  return total_frames / (2 * n_kf - 1);
}

void validate_frame_graph(const FrameGraph& graph) {
  const Eigen::Index n = graph.size();
  if (graph.weights.rows() != n || graph.weights.cols() != n)
    throw std::invalid_argument("frame graph: weight matrix does not match node count");
  for (Eigen::Index i = 1; i < n; ++i)
    if (graph.timestamps[i] <= graph.timestamps[i - 1])
      throw std::invalid_argument("frame graph: timestamps must be strictly increasing");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (graph.weights(i, i) != 0.0)
      throw std::invalid_argument("frame graph: non-zero diagonal weight");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double w = graph.weights(i, j);
      if (!(w >= 0.0) || w != graph.weights(j, i))
        throw std::invalid_argument("frame graph: weights must be symmetric and non-negative");
    }
  }
}

FrameGraph build_frame_graph(std::span<const MotionHistogram> nodes) {
  if (nodes.size() < 2) throw std::invalid_argument("build_frame_graph: need at least two nodes");
  const auto n = static_cast<Eigen::Index>(nodes.size());
  FrameGraph g;
  g.timestamps.reserve(nodes.size());
  for (const auto& h : nodes) g.timestamps.push_back(h.frame_index);
  g.weights = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      g.weights(i, j) = g.weights(j, i) = temporal_disparity(nodes[i], nodes[j]);
  validate_frame_graph(g);
  return g;
}

namespace {

struct Edge {
  int a;  // a < b, so t[a] < t[b]
  int b;
  bool excluded = false;
};

// Smallest |t[node] - t[c]| over the chosen set; +inf when nothing is chosen.
long min_gap(const std::vector<int>& t, const std::vector<int>& chosen, int node) {
  long best = std::numeric_limits<long>::max();
  for (int c : chosen) best = std::min(best, std::labs(static_cast<long>(t[node]) - t[c]));
  return best;
}

}  // namespace

SelectionResult select_keyframes(const FrameGraph& graph, int n_kf, int total_frames) {
  validate_frame_graph(graph);
  SelectionResult result;
  result.d_low = compute_d_low(total_frames, n_kf);
  const long d_low = result.d_low;
  const auto& t = graph.timestamps;
  const int n = static_cast<int>(graph.size());

  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j});

  std::vector<int> chosen;
  const int iterations = (n_kf + 1) / 2;
  for (int iter = 0; iter < iterations; ++iter) {
    Edge* best = nullptr;
    for (auto& e : edges) {
      if (e.excluded) continue;
      const bool viable = (t[e.b] - t[e.a]) > d_low && min_gap(t, chosen, e.a) > d_low &&
                          min_gap(t, chosen, e.b) > d_low;
      if (!viable) {
        e.excluded = true;
        continue;
      }
      // Edges are enumerated in (t[a], t[b]) order, so strict > keeps the tie-break.
      if (best == nullptr || graph.weights(e.a, e.b) > graph.weights(best->a, best->b)) best = &e;
    }
    if (best == nullptr) break;

    result.chosen_edges.emplace_back(best->a, best->b);
    best->excluded = true;
    const bool single_terminal = (n_kf % 2 == 1) && iter == iterations - 1;
    if (single_terminal) {
      const long gap_a = min_gap(t, chosen, best->a);
      const long gap_b = min_gap(t, chosen, best->b);
      chosen.push_back(gap_b > gap_a ? best->b : best->a);
    } else {
      chosen.push_back(best->a);
      chosen.push_back(best->b);
    }
  }

  std::vector<bool> is_padded(chosen.size(), false);
  while (static_cast<int>(chosen.size()) < n_kf) {
    int pick = -1;
    long pick_gap = -1;
    for (int node = 0; node < n; ++node) {
      if (std::find(chosen.begin(), chosen.end(), node) != chosen.end()) continue;
      const long gap = min_gap(t, chosen, node);
      if (gap > pick_gap) {
        pick = node;
        pick_gap = gap;
      }
    }
    if (pick < 0) break;
    chosen.push_back(pick);
    is_padded.push_back(true);
  }

  for (std::size_t i = 0; i < chosen.size(); ++i)
    result.chosen.push_back({t[chosen[i]], chosen[i], is_padded[i]});
  std::sort(result.chosen.begin(), result.chosen.end(),
            [](const ChosenFrame& x, const ChosenFrame& y) { return x.frame_index < y.frame_index; });
  return result;
}

}  // namespace vidfuse
