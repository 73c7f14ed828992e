#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vidfuse {

/// L-class probability vector.
template <typename Scalar>
using ProbVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using ProbDist = ProbVector<double>;

inline constexpr double kSmoothing = 1e-12;
inline constexpr double kDistanceTie = 1e-12;

/// Throws std::invalid_argument unless `p` has L >= 2 finite, non-negative
/// entries summing to 1 within `tol`.
template <typename Derived>
void check_prob_dist(const Eigen::MatrixBase<Derived>& p, double tol = 1e-9) {
  if (p.size() < 2) throw std::invalid_argument("probability vector needs at least 2 classes");
  if (!p.allFinite()) throw std::invalid_argument("probability vector contains NaN/Inf");
  if ((p.array() < 0).any()) throw std::invalid_argument("probability vector has negative entries");
  if (std::abs(static_cast<double>(p.sum()) - 1.0) > tol)
    throw std::invalid_argument("probability vector does not sum to 1");
}

/// Adds kSmoothing to every entry and renormalises, so products and square
/// roots never see exact zeros.
template <typename Derived>
ProbVector<typename Derived::Scalar> smoothed(const Eigen::MatrixBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  ProbVector<Scalar> q = p.array() + Scalar(kSmoothing);
  return q / q.sum();
}

namespace detail {
template <typename A, typename B>
void check_same_length(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                       const char* what) {
  if (a.size() != b.size()) throw std::invalid_argument(std::string(what) + ": class counts differ");
}
}  // namespace detail

/// Normalised elementwise product of two distributions (on smoothed inputs).
template <typename A, typename B>
ProbVector<typename A::Scalar> conflate(const Eigen::MatrixBase<A>& p1,
                                        const Eigen::MatrixBase<B>& p2) {
  detail::check_same_length(p1, p2, "conflate");
  ProbVector<typename A::Scalar> prod = smoothed(p1).cwiseProduct(smoothed(p2));
  return prod / prod.sum();
}

/// -ln sum_i sqrt(p_i q_i), clamped at 0 against rounding.
template <typename A, typename B>
typename A::Scalar bhattacharyya_distance(const Eigen::MatrixBase<A>& p,
                                          const Eigen::MatrixBase<B>& q) {
  using Scalar = typename A::Scalar;
  detail::check_same_length(p, q, "bhattacharyya_distance");
  const Scalar coefficient = smoothed(p).cwiseProduct(smoothed(q)).cwiseSqrt().sum();
  return std::max(Scalar(0), -std::log(coefficient));
}

template <typename Scalar>
struct BiasedConflation {
  ProbVector<Scalar> dist;
  Scalar beta;         // weight on the nearer input, in [0, 1]
  int nearer;          // 1 or 2; 0 when the distances tie
};

/// Conflation pulled toward whichever input is nearer (Bhattacharyya) to the
/// conflated result: normalize((1 - beta) Pc + beta P_near), with
/// beta = (d_far - d_near) / (d_far + d_near). Tied distances give beta = 0.
template <typename A, typename B>
BiasedConflation<typename A::Scalar> biased_conflate_detail(const Eigen::MatrixBase<A>& p1,
                                                            const Eigen::MatrixBase<B>& p2) {
  using Scalar = typename A::Scalar;
  detail::check_same_length(p1, p2, "biased_conflate");
  ProbVector<Scalar> pc = conflate(p1, p2);
  const Scalar d1 = bhattacharyya_distance(pc, p1);
  const Scalar d2 = bhattacharyya_distance(pc, p2);
  if (std::abs(d1 - d2) <= Scalar(kDistanceTie)) return {std::move(pc), Scalar(0), 0};

  const bool first_nearer = d1 < d2;
  const Scalar near = first_nearer ? d1 : d2;
  const Scalar far = first_nearer ? d2 : d1;
  const Scalar beta = (far + near > 0) ? (far - near) / (far + near) : Scalar(0);
  ProbVector<Scalar> mix = (Scalar(1) - beta) * pc;
  if (first_nearer)
    mix += beta * p1;
  else
    mix += beta * p2;
  return {mix / mix.sum(), beta, first_nearer ? 1 : 2};
}

template <typename A, typename B>
ProbVector<typename A::Scalar> biased_conflate(const Eigen::MatrixBase<A>& p1,
                                               const Eigen::MatrixBase<B>& p2) {
  return biased_conflate_detail(p1, p2).dist;
}

/// Lowest index among the maxima.
template <typename Derived>
int predict_class(const Eigen::MatrixBase<Derived>& p) {
  if (p.size() == 0) throw std::invalid_argument("predict_class: empty distribution");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < p.size(); ++i)
    if (p(i) > p(best)) best = i;
  return static_cast<int>(best);
}

}  // namespace vidfuse
