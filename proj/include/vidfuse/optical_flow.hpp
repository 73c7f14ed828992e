#pragma once

#include "vidfuse/types.hpp"

#include <cmath>
#include <stdexcept>

namespace vidfuse {

/// Dense displacement field between two consecutive frames, in pixels/frame.
template <typename Scalar = double>
struct FlowField {
  Grid<Scalar> u;
  Grid<Scalar> v;

  Eigen::Index rows() const { return u.rows(); }
  Eigen::Index cols() const { return u.cols(); }
};

struct HornSchunckParams {
  double alpha = 1.0;     // smoothness weight
  int iterations = 100;   // maximum Jacobi sweeps
  double epsilon = 1e-4;  // stop once mean squared update drops below this
};

namespace detail {

// (H+1)x(W+1) copy with the last row and column replicated.
template <typename Scalar>
Grid<Scalar> replicate_far_edges(const Grid<Scalar>& img) {
  const Eigen::Index h = img.rows(), w = img.cols();
  Grid<Scalar> out(h + 1, w + 1);
  out.topLeftCorner(h, w) = img;
  out.row(h).head(w) = img.row(h - 1);
  out.col(w) = out.col(w - 1);
  return out;
}

// Sum of the 8 neighbours (edge weight 1/6, corner weight 1/12); outside pixels are zero.
template <typename Scalar>
Grid<Scalar> weighted_neighbour_sum(const Grid<Scalar>& f) {
  const Eigen::Index h = f.rows(), w = f.cols();
  Grid<Scalar> pad = Grid<Scalar>::Zero(h + 2, w + 2);
  pad.block(1, 1, h, w) = f;
  const Scalar edge = Scalar(1) / Scalar(6);
  const Scalar corner = Scalar(1) / Scalar(12);
  return edge * (pad.block(0, 1, h, w) + pad.block(2, 1, h, w) + pad.block(1, 0, h, w) +
                 pad.block(1, 2, h, w)) +
         corner * (pad.block(0, 0, h, w) + pad.block(0, 2, h, w) + pad.block(2, 0, h, w) +
                   pad.block(2, 2, h, w));
}

inline void check_flow_inputs(const Frame& prev, const Frame& next,
                              const HornSchunckParams& params) {
  if (prev.height() != next.height() || prev.width() != next.width())
    throw std::invalid_argument("compute_dense_flow: frame dimensions differ");
  if (prev.height() < 2 || prev.width() < 2)
    throw std::invalid_argument("compute_dense_flow: frames must be at least 2x2");
  if (!(params.alpha > 0.0)) throw std::invalid_argument("compute_dense_flow: alpha must be > 0");
  if (params.iterations < 1)
    throw std::invalid_argument("compute_dense_flow: iterations must be >= 1");
  if (!(params.epsilon >= 0.0))
    throw std::invalid_argument("compute_dense_flow: epsilon must be >= 0");
}

}  // namespace detail

/// Horn-Schunck optical flow from `prev` to `next`.
///
/// Brightness derivatives use the 2x2x2 cube stencil (forward differences
/// averaged over both frames) with edge replication. The smoothness term is
/// the 8-neighbour weighted average, renormalised over in-bounds neighbours.
/// Flow starts at zero and is updated by Jacobi sweeps until `iterations`
/// sweeps have run or the mean of (du^2 + dv^2) falls below `epsilon`.
template <typename Scalar = double>
FlowField<Scalar> compute_dense_flow(const Frame& prev, const Frame& next,
                                     const HornSchunckParams& params = {}) {
  detail::check_flow_inputs(prev, next, params);
  const Eigen::Index h = prev.height(), w = prev.width();

  const Grid<Scalar> p1 = detail::replicate_far_edges<Scalar>(prev.pixels.template cast<Scalar>());
  const Grid<Scalar> p2 = detail::replicate_far_edges<Scalar>(next.pixels.template cast<Scalar>());
  auto at = [h, w](const Grid<Scalar>& p, Eigen::Index dr, Eigen::Index dc) {
    return p.block(dr, dc, h, w);
  };

  const Scalar quarter(0.25);
  const Grid<Scalar> ex = quarter * ((at(p1, 0, 1) - at(p1, 0, 0)) + (at(p1, 1, 1) - at(p1, 1, 0)) +
                                     (at(p2, 0, 1) - at(p2, 0, 0)) + (at(p2, 1, 1) - at(p2, 1, 0)));
  const Grid<Scalar> ey = quarter * ((at(p1, 1, 0) - at(p1, 0, 0)) + (at(p1, 1, 1) - at(p1, 0, 1)) +
                                     (at(p2, 1, 0) - at(p2, 0, 0)) + (at(p2, 1, 1) - at(p2, 0, 1)));
  const Grid<Scalar> et = quarter * ((at(p2, 0, 0) - at(p1, 0, 0)) + (at(p2, 1, 0) - at(p1, 1, 0)) +
                                     (at(p2, 0, 1) - at(p1, 0, 1)) + (at(p2, 1, 1) - at(p1, 1, 1)));

  const Grid<Scalar> inv_weight =
      detail::weighted_neighbour_sum<Scalar>(Grid<Scalar>::Ones(h, w)).inverse();
  const Scalar alpha = static_cast<Scalar>(params.alpha);
  const Grid<Scalar> denom = alpha * alpha + ex.square() + ey.square();

  FlowField<Scalar> flow{Grid<Scalar>::Zero(h, w), Grid<Scalar>::Zero(h, w)};
  const Scalar tol = static_cast<Scalar>(params.epsilon);
  for (int it = 0; it < params.iterations; ++it) {
    const Grid<Scalar> u_avg = detail::weighted_neighbour_sum(flow.u) * inv_weight;
    const Grid<Scalar> v_avg = detail::weighted_neighbour_sum(flow.v) * inv_weight;
    const Grid<Scalar> t = (ex * u_avg + ey * v_avg + et) / denom;
    Grid<Scalar> u_next = u_avg - ex * t;
    Grid<Scalar> v_next = v_avg - ey * t;
    const Scalar msu = ((u_next - flow.u).square() + (v_next - flow.v).square()).mean();
    flow.u = std::move(u_next);
    flow.v = std::move(v_next);
    if (msu < tol) break;
  }
  return flow;
}

/// Per-pixel flow magnitude scaled so the frame maximum maps to 255
/// (half-values rounded away from zero). All-zero flow gives an all-zero image.
template <typename Scalar>
ByteImage magnitude_image(const FlowField<Scalar>& flow) {
  if (flow.u.rows() != flow.v.rows() || flow.u.cols() != flow.v.cols())
    throw std::invalid_argument("magnitude_image: u and v shapes differ");
  if (!flow.u.allFinite() || !flow.v.allFinite())
    throw std::invalid_argument("magnitude_image: flow contains NaN/Inf");
  const Grid<double> mag =
      (flow.u.template cast<double>().square() + flow.v.template cast<double>().square()).sqrt();
  if (mag.size() == 0) return ByteImage(mag.rows(), mag.cols());
  const double peak = mag.maxCoeff();
  if (peak == 0.0) return ByteImage::Zero(mag.rows(), mag.cols());
  return (mag / peak * 255.0).round().min(255.0).template cast<std::uint8_t>();
}

}  // namespace vidfuse
