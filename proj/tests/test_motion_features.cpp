#include "vidfuse/motion_features.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace vidfuse;

namespace {

FlowField<double> uniform_flow(int rows, int cols, double u, double v) {
  return {Grid<double>::Constant(rows, cols, u), Grid<double>::Constant(rows, cols, v)};
}

MotionHistogram hist(std::vector<double> mag, std::vector<double> ang, int index = 0) {
  return {Eigen::Map<Eigen::VectorXd>(mag.data(), static_cast<Eigen::Index>(mag.size())),
          Eigen::Map<Eigen::VectorXd>(ang.data(), static_cast<Eigen::Index>(ang.size())), index};
}

MotionHistogram random_hist(std::mt19937_64& rng, int bins, int index = 0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MotionHistogram h{Eigen::VectorXd(bins), Eigen::VectorXd(bins), index};
  for (int i = 0; i < bins; ++i) {
    h.mag(i) = u(rng);
    h.ang(i) = u(rng);
  }
  h.mag /= h.mag.sum();
  h.ang /= h.ang.sum();
  return h;
}

}  // namespace

TEST_CASE("motion histogram binning") {
  const HistogramConfig eight{8, 8, 8.0};

  SUBCASE("zero flow") {
    const auto h = motion_histogram(uniform_flow(5, 5, 0, 0), eight);
    CHECK(h.mag(0) == 1.0);
    CHECK(h.mag.tail(7).isZero());
    CHECK(h.ang.isZero());
  }
  SUBCASE("uniform rightward flow") {
    const auto h = motion_histogram(uniform_flow(5, 5, 1, 0), eight);
    CHECK(h.mag(1) == 1.0);
    CHECK(h.ang(0) == 1.0);
    CHECK(h.mag.sum() == doctest::Approx(1.0));
  }
  SUBCASE("left half right, right half down-axis") {
    FlowField<double> f = uniform_flow(4, 6, 0, 0);
    f.u.leftCols(3) = 1.0;
    f.v.rightCols(3) = 1.0;
    const auto h = motion_histogram(f, eight);
    CHECK(h.ang(0) == doctest::Approx(0.5));
    CHECK(h.ang(2) == doctest::Approx(0.5));
    CHECK(h.ang.sum() == doctest::Approx(1.0));
  }
  SUBCASE("magnitude at the cap lands in the last bin, beyond it saturates") {
    CHECK(motion_histogram(uniform_flow(3, 3, 8, 0), eight).mag(7) == 1.0);
    CHECK(motion_histogram(uniform_flow(3, 3, 0, -50), eight).mag(7) == 1.0);
  }
  SUBCASE("negative angles wrap into [0, 2pi)") {
    const auto h = motion_histogram(uniform_flow(3, 3, 0, -1), eight);
    CHECK(h.ang(6) == 1.0);  // 3pi/2
  }
  SUBCASE("random fields stay normalised") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 3.0);
    for (int trial = 0; trial < 30; ++trial) {
      FlowField<double> f = uniform_flow(7, 9, 0, 0);
      for (Eigen::Index i = 0; i < f.u.size(); ++i) {
        f.u.data()[i] = n(rng);
        f.v.data()[i] = n(rng);
      }
      const auto h = motion_histogram(f, {5, 7, 4.0});
      CHECK(std::abs(h.mag.sum() - 1.0) < 1e-9);
      CHECK(std::abs(h.ang.sum() - 1.0) < 1e-9);
      CHECK((h.mag.array() >= 0).all());
    }
  }
  SUBCASE("bad config") {
    CHECK_THROWS_AS(motion_histogram(uniform_flow(2, 2, 0, 0), {0, 8, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(motion_histogram(uniform_flow(2, 2, 0, 0), {8, 0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(motion_histogram(uniform_flow(2, 2, 0, 0), {8, 8, 0.0}), std::invalid_argument);
  }
}

TEST_CASE("temporal disparity") {
  const auto a = hist({0.5, 0.5}, {1, 0});
  const auto b = hist({0.25, 0.75}, {0.5, 0.5});
  CHECK(temporal_disparity(a, a) == 0.0);
  CHECK(temporal_disparity(a, b) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(temporal_disparity(hist({1, 0}, {1, 0}), hist({0, 1}, {0, 1})) == 4.0);
  CHECK_THROWS_AS(temporal_disparity(a, hist({1, 0, 0}, {1, 0})), std::invalid_argument);
}

TEST_CASE("temporal disparity is a metric on random histograms") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const auto x = random_hist(rng, 6), y = random_hist(rng, 6), z = random_hist(rng, 6);
    const double xy = temporal_disparity(x, y);
    CHECK(xy >= 0.0);
    CHECK(temporal_disparity(x, x) == 0.0);
    CHECK(std::abs(xy - temporal_disparity(y, x)) <= 1e-12);
    CHECK(xy <= temporal_disparity(x, z) + temporal_disparity(z, y) + 1e-12);
    CHECK(xy <= 4.0 + 1e-12);
  }
}

TEST_CASE("redundancy threshold") {
  SUBCASE("constant series") {
    const std::vector<double> s{2, 2, 2};
    const auto d = redundancy_threshold(s);
    CHECK(d.mean == 2.0);
    CHECK(d.sample_std == 0.0);
    CHECK(d.threshold == 2.0);
  }
  SUBCASE("1..4") {
    const std::vector<double> s{1, 2, 3, 4};
    const auto d = redundancy_threshold(s);
    CHECK(d.mean == 2.5);
    CHECK(std::abs(d.sample_std - std::sqrt(5.0 / 3.0)) <= 1e-12);
    CHECK(std::abs(d.threshold - (2.5 - std::sqrt(5.0 / 3.0))) <= 1e-12);
  }
  SUBCASE("negative threshold") {
    const std::vector<double> s{0, 0, 10, 10};
    const auto d = redundancy_threshold(s);
    CHECK(d.mean == 5.0);
    CHECK(std::abs(d.sample_std - std::sqrt(100.0 / 3.0)) <= 1e-12);
    CHECK(d.threshold < 0.0);
  }
  SUBCASE("too short") {
    const std::vector<double> s{1};
    CHECK_THROWS_AS(redundancy_threshold(s), std::invalid_argument);
    CHECK_THROWS_AS(redundancy_threshold({}), std::invalid_argument);
  }
  SUBCASE("matches an independent mean/std") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    std::uniform_int_distribution<int> len(2, 60);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> s(static_cast<std::size_t>(len(rng)));
      for (double& x : s) x = u(rng);
      const auto d = redundancy_threshold(s);
      const auto ref = oracle::welford(s);
      CHECK(std::abs(d.mean - ref.mean) <= 1e-12);
      CHECK(std::abs(d.sample_std - ref.std) <= 1e-12);
      CHECK(d.threshold == d.mean - d.sample_std);
      CHECK(d.values == s);
    }
  }
}

TEST_CASE("reduce redundancy") {
  SUBCASE("identical histograms and non-positive threshold keep everything") {
    std::vector<MotionHistogram> hs;
    for (int k = 1; k <= 5; ++k) hs.push_back(hist({1, 0}, {0, 1}, k));
    CHECK(reduce_redundancy(hs, 0.0) == std::vector<int>{1, 2, 3, 4, 5});
    CHECK(reduce_redundancy(hs, -1.0) == std::vector<int>{1, 2, 3, 4, 5});
    CHECK(reduce_redundancy(hs, 0.1) == std::vector<int>{1});
  }
  SUBCASE("frame close to the anchor is dropped") {
    // d(1,2) = 0.1, d(1,3) = 2.0
    const std::vector<MotionHistogram> hs{hist({1, 0}, {1, 0}, 1), hist({0.95, 0.05}, {1, 0}, 2),
                                          hist({0, 1}, {1, 0}, 3)};
    CHECK(temporal_disparity(hs[0], hs[1]) == doctest::Approx(0.1));
    CHECK(reduce_redundancy(hs, 0.5) == std::vector<int>{1, 3});
  }
  SUBCASE("anchor moves to the last kept frame") {
    // d(1,2) = 0.6 -> keep 2. d(1,3) = 0.4 but d(2,3) = 0.6, so 3 is kept too.
    const std::vector<MotionHistogram> hs{hist({1, 0, 0}, {1, 0}, 1), hist({0.7, 0.3, 0}, {1, 0}, 2),
                                          hist({0.8, 0, 0.2}, {1, 0}, 3)};
    CHECK(temporal_disparity(hs[0], hs[1]) == doctest::Approx(0.6));
    CHECK(temporal_disparity(hs[0], hs[2]) == doctest::Approx(0.4));
    CHECK(temporal_disparity(hs[1], hs[2]) == doctest::Approx(0.6));
    CHECK(reduce_redundancy(hs, 0.5) == std::vector<int>{1, 2, 3});
    // Same layout, but frame 3 sits next to frame 2: it is judged against 2.
    const std::vector<MotionHistogram> near{hs[0], hs[1], hist({0.7, 0.2, 0.1}, {1, 0}, 3)};
    CHECK(reduce_redundancy(near, 0.5) == std::vector<int>{1, 2});
  }
  SUBCASE("kept frames are increasing and pairwise far enough (random)") {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<MotionHistogram> hs;
      for (int k = 1; k <= 25; ++k) hs.push_back(random_hist(rng, 4, k));
      const double threshold = std::uniform_real_distribution<double>(-0.5, 2.0)(rng);
      const auto kept = reduce_redundancy(hs, threshold);
      REQUIRE(!kept.empty());
      CHECK(kept.front() == 1);
      for (std::size_t i = 1; i < kept.size(); ++i) {
        CHECK(kept[i] > kept[i - 1]);
        CHECK(temporal_disparity(hs[kept[i - 1] - 1], hs[kept[i] - 1]) >= threshold);
      }
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(reduce_redundancy({}, 0.0), std::invalid_argument);
    const std::vector<MotionHistogram> unordered{hist({1, 0}, {1, 0}, 2), hist({0, 1}, {1, 0}, 1)};
    CHECK_THROWS_AS(reduce_redundancy(unordered, 0.0), std::invalid_argument);
  }
}

TEST_CASE("CSV export") {
  const std::vector<MotionHistogram> hs{hist({1, 0}, {0, 0}, 1), hist({0.5, 0.5}, {1, 0}, 2),
                                        hist({0, 1}, {0, 1}, 3)};
  std::ostringstream h;
  write_histogram_csv(h, hs);
  CHECK(h.str() == "index,mag_0,mag_1,ang_0,ang_1\n1,1,0,0,0\n2,0.5,0.5,1,0\n3,0,1,0,1\n");

  const auto series = redundancy_threshold(consecutive_disparities(hs));
  std::ostringstream d;
  write_disparity_csv(d, hs, series);
  CHECK(d.str() == "k,td\n1,2\n2,3\n");
}
