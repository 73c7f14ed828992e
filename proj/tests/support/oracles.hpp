#pragma once

// Reference implementations used only by tests. They re-derive results from
// the definitions with plain containers and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

namespace vidfuse::oracle {

// ---- mean / sample standard deviation (Welford) --------------------------

struct MeanStd {
  double mean;
  double std;
};

inline MeanStd welford(const std::vector<double>& xs) {
  double mean = 0.0, m2 = 0.0;
  long n = 0;
  for (double x : xs) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  return {mean, std::sqrt(m2 / static_cast<double>(n - 1))};
}

// ---- greedy key-frame selection, re-simulated -----------------------------

struct GreedyOutcome {
  std::vector<std::pair<int, int>> edges;
  std::vector<int> organic;  // nodes picked by edges, in pick order
  std::vector<int> padded;   // nodes added by padding, in pick order
};

inline GreedyOutcome greedy_keyframes(const std::vector<int>& t,
                                      const std::vector<std::vector<double>>& w, int n_kf,
                                      int total_frames) {
  const long d_low = total_frames / (2 * n_kf - 1);
  const int n = static_cast<int>(t.size());
  GreedyOutcome out;
  std::set<std::pair<int, int>> dead;
  auto gap = [&](int a, int b) { return std::labs(static_cast<long>(t[a]) - t[b]); };
  auto far_from_all = [&](int x) {
    for (int c : out.organic)
      if (gap(x, c) <= d_low) return false;
    return true;
  };

  const int rounds = n_kf / 2 + n_kf % 2;
  for (int round = 0; round < rounds; ++round) {
    // (weight desc, earlier timestamp asc, later timestamp asc)
    std::vector<std::tuple<double, int, int, int, int>> viable;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (t[i] >= t[j] || dead.count({i, j})) continue;
        if (gap(i, j) > d_low && far_from_all(i) && far_from_all(j))
          viable.emplace_back(-w[i][j], t[i], t[j], i, j);
        else
          dead.insert({i, j});
      }
    if (viable.empty()) break;
    std::sort(viable.begin(), viable.end());
    const auto [neg_w, ti, tj, i, j] = viable.front();
    out.edges.emplace_back(i, j);
    dead.insert({i, j});
    if (n_kf % 2 == 1 && round == rounds - 1) {
      auto nearest = [&](int x) {
        long m = 1L << 60;
        for (int c : out.organic) m = std::min(m, gap(x, c));
        return m;
      };
      out.organic.push_back(nearest(j) > nearest(i) ? j : i);
    } else {
      out.organic.push_back(i);
      out.organic.push_back(j);
    }
  }

  std::vector<int> all = out.organic;
  while (static_cast<int>(all.size()) < n_kf) {
    int best = -1;
    long best_gap = -1;
    for (int x = 0; x < n; ++x) {
      if (std::find(all.begin(), all.end(), x) != all.end()) continue;
      long m = 1L << 60;
      for (int c : all) m = std::min(m, gap(x, c));
      if (m > best_gap || (m == best_gap && t[x] < t[best])) {
        best = x;
        best_gap = m;
      }
    }
    if (best < 0) break;
    all.push_back(best);
    out.padded.push_back(best);
  }
  return out;
}

// ---- biased conflation and the default fusion DAG ------------------------

using Dist = std::vector<double>;

inline Dist smooth(const Dist& p) {
  Dist q(p.size());
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (q[i] = p[i] + 1e-12);
  for (double& x : q) x /= s;
  return q;
}

inline Dist conflate(const Dist& a, const Dist& b) {
  const Dist sa = smooth(a), sb = smooth(b);
  Dist out(a.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (out[i] = sa[i] * sb[i]);
  for (double& x : out) x /= s;
  return out;
}

inline double bhattacharyya(const Dist& a, const Dist& b) {
  const Dist sa = smooth(a), sb = smooth(b);
  double bc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) bc += std::sqrt(sa[i] * sb[i]);
  return std::max(0.0, -std::log(bc));
}

inline Dist biased(const Dist& a, const Dist& b) {
  const Dist pc = conflate(a, b);
  const double d1 = bhattacharyya(pc, a), d2 = bhattacharyya(pc, b);
  if (std::abs(d1 - d2) <= 1e-12) return pc;
  const Dist& near = d1 < d2 ? a : b;
  const double lo = std::min(d1, d2), hi = std::max(d1, d2);
  const double beta = hi + lo > 0 ? (hi - lo) / (hi + lo) : 0.0;
  Dist out(a.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (out[i] = (1 - beta) * pc[i] + beta * near[i]);
  for (double& x : out) x /= s;
  return out;
}

inline Dist fold(const std::vector<Dist>& ds) {
  Dist acc = ds.front();
  for (std::size_t i = 1; i < ds.size(); ++i) acc = biased(acc, ds[i]);
  return acc;
}

/// frames[m][k] per modality m and key-frame k; videos[m] per modality.
inline Dist fusion_dag(const std::vector<std::vector<Dist>>& frames, const std::vector<Dist>& videos) {
  std::vector<Dist> tier1;
  for (std::size_t k = 0; k < frames.front().size(); ++k) {
    std::vector<Dist> across;
    for (const auto& m : frames) across.push_back(m[k]);
    tier1.push_back(fold(across));
  }
  return biased(fold(tier1), fold(videos));
}

}  // namespace vidfuse::oracle
