#include "vidfuse/motion_features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace vidfuse {

namespace {

constexpr double kZeroMagnitude = 1e-9;

int bin_of(double value, double upper, int bins) {
  const int b = static_cast<int>(std::floor(value / (upper / bins)));
  return std::clamp(b, 0, bins - 1);
}

void check_same_layout(const MotionHistogram& a, const MotionHistogram& b) {
  if (a.mag.size() != b.mag.size() || a.ang.size() != b.ang.size())
    throw std::invalid_argument("temporal_disparity: histogram bin counts differ");
}

}  // namespace

MotionHistogram motion_histogram(const FlowField<double>& flow, const HistogramConfig& config,
                                 int frame_index) {
  if (config.mag_bins < 1 || config.ang_bins < 1 || !(config.mag_cap > 0.0))
    throw std::invalid_argument("motion_histogram: bin counts and mag_cap must be positive");
  if (flow.u.rows() != flow.v.rows() || flow.u.cols() != flow.v.cols())
    throw std::invalid_argument("motion_histogram: u and v shapes differ");

  constexpr double two_pi = 2.0 * std::numbers::pi;
  MotionHistogram h{Eigen::VectorXd::Zero(config.mag_bins), Eigen::VectorXd::Zero(config.ang_bins),
                    frame_index};
  for (Eigen::Index r = 0; r < flow.u.rows(); ++r) {
    for (Eigen::Index c = 0; c < flow.u.cols(); ++c) {
      const double u = flow.u(r, c), v = flow.v(r, c);
      if (!std::isfinite(u) || !std::isfinite(v))
        throw std::invalid_argument("motion_histogram: flow contains NaN/Inf");
      const double m = std::hypot(u, v);
      if (m < kZeroMagnitude) {
        h.mag(0) += 1.0;
        continue;
      }
      h.mag(bin_of(std::min(m, config.mag_cap), config.mag_cap, config.mag_bins)) += 1.0;
      double theta = std::atan2(v, u);
      if (theta < 0.0) theta += two_pi;
      if (theta >= two_pi) theta = 0.0;
      h.ang(bin_of(theta, two_pi, config.ang_bins)) += 1.0;
    }
  }
  if (const double n = h.mag.sum(); n > 0.0) h.mag /= n;
  if (const double n = h.ang.sum(); n > 0.0) h.ang /= n;
  return h;
}

double temporal_disparity(const MotionHistogram& a, const MotionHistogram& b) {
  check_same_layout(a, b);
  return (a.mag - b.mag).lpNorm<1>() + (a.ang - b.ang).lpNorm<1>();
}

DisparitySeries redundancy_threshold(std::span<const double> disparities) {
  if (disparities.size() < 2)
    throw std::invalid_argument("redundancy_threshold: need at least two disparities");
  const Eigen::Map<const Eigen::ArrayXd> td(disparities.data(),
                                            static_cast<Eigen::Index>(disparities.size()));
  DisparitySeries s;
  s.values.assign(disparities.begin(), disparities.end());
  s.mean = td.mean();
  s.sample_std = std::sqrt((td - s.mean).square().sum() / static_cast<double>(td.size() - 1));
  s.threshold = s.mean - s.sample_std;
  return s;
}

std::vector<double> consecutive_disparities(std::span<const MotionHistogram> histograms) {
  std::vector<double> out;
  for (std::size_t k = 1; k < histograms.size(); ++k)
    out.push_back(temporal_disparity(histograms[k - 1], histograms[k]));
  return out;
}

std::vector<int> reduce_redundancy(std::span<const MotionHistogram> histograms, double threshold) {
  if (histograms.empty()) throw std::invalid_argument("reduce_redundancy: no histograms");
  std::vector<int> kept{histograms.front().frame_index};
  const MotionHistogram* anchor = &histograms.front();
  for (const auto& h : histograms.subspan(1)) {
    if (h.frame_index <= anchor->frame_index)
      throw std::invalid_argument("reduce_redundancy: histograms must be ordered by frame index");
    if (temporal_disparity(*anchor, h) < threshold) continue;
    kept.push_back(h.frame_index);
    anchor = &h;
  }
  return kept;
}

void write_histogram_csv(std::ostream& out, std::span<const MotionHistogram> histograms) {
  if (histograms.empty()) return;
  out << "index";
  for (Eigen::Index i = 0; i < histograms.front().mag.size(); ++i) out << ",mag_" << i;
  for (Eigen::Index i = 0; i < histograms.front().ang.size(); ++i) out << ",ang_" << i;
  out << '\n';
  const auto old_precision = out.precision(17);
  for (const auto& h : histograms) {
    out << h.frame_index;
    for (double x : h.mag) out << ',' << x;
    for (double x : h.ang) out << ',' << x;
    out << '\n';
  }
  out.precision(old_precision);
}

void write_disparity_csv(std::ostream& out, std::span<const MotionHistogram> histograms,
                         const DisparitySeries& series) {
  if (series.values.size() + 1 != histograms.size())
    throw std::invalid_argument("write_disparity_csv: series does not match histograms");
  out << "k,td\n";
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < series.values.size(); ++i)
    out << histograms[i].frame_index << ',' << series.values[i] << '\n';
  out.precision(old_precision);
}

}  // namespace vidfuse
