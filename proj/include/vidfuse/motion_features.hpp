#pragma once

#include "vidfuse/optical_flow.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <vector>

namespace vidfuse {

struct HistogramConfig {
  int mag_bins = 16;
  int ang_bins = 16;
  double mag_cap = 20.0;  // px/frame; larger magnitudes saturate into the last bin
};

/// Concatenated magnitude and angle histograms describing one frame's motion.
/// Each half is normalised on its own; `ang` is all-zero when the flow is zero.
struct MotionHistogram {
  Eigen::VectorXd mag;
  Eigen::VectorXd ang;
  int frame_index = 0;
};

/// Disparities td(k -> k+1) plus the redundancy threshold mean - sample_std.
struct DisparitySeries {
  std::vector<double> values;
  double mean = 0.0;
  double sample_std = 0.0;
  double threshold = 0.0;
};

MotionHistogram motion_histogram(const FlowField<double>& flow, const HistogramConfig& config = {},
                                 int frame_index = 0);

/// l1 distance over the concatenated bins; lies in [0, 4] for normalised inputs.
double temporal_disparity(const MotionHistogram& a, const MotionHistogram& b);

/// Requires at least two disparities (the variance uses an n-1 denominator).
DisparitySeries redundancy_threshold(std::span<const double> disparities);

/// Disparities between consecutive histograms of an ordered sequence.
std::vector<double> consecutive_disparities(std::span<const MotionHistogram> histograms);

/// Anchor-based greedy scan: the first frame is kept and anchors; frame k is
/// dropped iff disparity(anchor, k) < threshold, otherwise kept as the new
/// anchor. Returns the kept frame indices in ascending order.
std::vector<int> reduce_redundancy(std::span<const MotionHistogram> histograms, double threshold);

/// CSV rows: index,mag_0..mag_{B-1},ang_0..ang_{B-1}
void write_histogram_csv(std::ostream& out, std::span<const MotionHistogram> histograms);

/// CSV rows: k,td  (td between frame k and k+1)
void write_disparity_csv(std::ostream& out, std::span<const MotionHistogram> histograms,
                         const DisparitySeries& series);

}  // namespace vidfuse
