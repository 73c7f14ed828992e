#pragma once

// Synthetic inputs shared by the unit and acceptance suites.

#include "vidfuse/conflation.hpp"
#include "vidfuse/types.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace vidfuse::testing {

inline Frame make_frame(const Grid<double>& values, int index = 1) {
  return {values.round().max(0.0).min(255.0).cast<std::uint8_t>(), index};
}

/// 128 + 50 sin(2 pi x / period) + 50 cos(2 pi y / period), shifted right by `shift` px.
inline Frame sinusoid_frame(int size, double period, int shift, int index = 1) {
  Grid<double> g(size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const int xs = ((x - shift) % size + size) % size;  // circular shift
      g(y, x) = 128.0 + 50.0 * std::sin(2.0 * std::numbers::pi * xs / period) +
                50.0 * std::cos(2.0 * std::numbers::pi * y / period);
    }
  return make_frame(g, index);
}

inline Frame random_frame(std::mt19937_64& rng, int rows, int cols, int index = 1) {
  std::uniform_int_distribution<int> px(0, 255);
  ByteImage img(rows, cols);
  for (Eigen::Index i = 0; i < img.size(); ++i) img.data()[i] = static_cast<std::uint8_t>(px(rng));
  return {img, index};
}

/// 3x3 box-blurred noise: texture with usable spatial gradients.
inline Grid<double> smooth_texture(std::mt19937_64& rng, int rows, int cols) {
  std::uniform_real_distribution<double> u(0.0, 255.0);
  Grid<double> noise(rows, cols);
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise.data()[i] = u(rng);
  Grid<double> out = Grid<double>::Zero(rows, cols);
  for (int y = 0; y < rows; ++y)
    for (int x = 0; x < cols; ++x) {
      double s = 0.0;
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int yy = y + dy, xx = x + dx;
          if (yy < 0 || yy >= rows || xx < 0 || xx >= cols) continue;
          s += noise(yy, xx);
          ++n;
        }
      out(y, x) = s / n;
    }
  return out;
}

/// Video whose first half is a frozen scene and whose second half has a
/// textured block wandering over the background with changing velocity.
inline std::vector<Frame> static_then_active_video(int n_frames, int size = 48,
                                                   std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  const Grid<double> background = smooth_texture(rng, size, size);
  const int block = size / 4;
  const Grid<double> patch = smooth_texture(rng, block, block) * 0.5 + 127.0;
  std::uniform_int_distribution<int> step(-3, 3);

  std::vector<Frame> frames;
  int bx = size / 2 - block / 2, by = size / 2 - block / 2, vx = 0, vy = 0;
  for (int k = 1; k <= n_frames; ++k) {
    if (k > n_frames / 2) {
      if ((k - n_frames / 2) % 4 == 1) {
        do {
          vx = step(rng);
          vy = step(rng);
        } while (vx == 0 && vy == 0);
      }
      bx += vx;
      by += vy;
      if (bx < 0 || bx + block > size) {
        vx = -vx;
        bx = std::clamp(bx, 0, size - block);
      }
      if (by < 0 || by + block > size) {
        vy = -vy;
        by = std::clamp(by, 0, size - block);
      }
    }
    Grid<double> img = background;
    img.block(by, bx, block, block) = patch;
    frames.push_back(make_frame(img, k));
  }
  return frames;
}

inline ProbDist random_dist(std::mt19937_64& rng, int classes) {
  std::gamma_distribution<double> g(0.7, 1.0);
  ProbDist p(classes);
  for (int i = 0; i < classes; ++i) p(i) = g(rng) + 1e-6;
  return p / p.sum();
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("vidfuse_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace vidfuse::testing
