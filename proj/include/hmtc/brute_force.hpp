#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hmtc/hmt.hpp"

namespace hmtc {

// Exact posteriors by full enumeration of K^n state assignments. Oracle for
// upward_downward on small forests; guarded against combinatorial blow-up.
inline Posteriors brute_force_posteriors(const QuadForest& forest, const HmtModel& model) {
  forest.validate();
  model.validate();
  const int K = model.K;
  const int J = forest.depth();
  if (model.depth != J) throw std::invalid_argument("brute_force: depth mismatch");

  // Flatten nodes scale by scale; record parent index and coefficient.
  struct Node {
    int t;        // 1-based internal time
    long parent;  // flat index, -1 for roots
    double w;
  };
  std::vector<Node> nodes;
  std::vector<long> scale_base(J);
  for (int t = 1; t <= J; ++t) {
    scale_base[t - 1] = static_cast<long>(nodes.size());
    const Grid& g = forest.scales[t - 1];
    for (int r = 0; r < g.rows(); ++r)
      for (int c = 0; c < g.cols(); ++c) {
        long parent = -1;
        if (t > 1)
          parent = scale_base[t - 2] +
                   static_cast<long>(r / 2) * forest.scales[t - 2].cols() + (c / 2);
        nodes.push_back({t, parent, g.at(r, c)});
      }
  }
  const size_t n = nodes.size();
  double combos = 1.0;
  for (size_t i = 0; i < n; ++i) {
    combos *= K;
    if (combos > 1e7)
      throw std::invalid_argument("brute_force_posteriors: K^n exceeds 1e7");
  }
  // Per-node log terms, so the enumeration below only adds table entries.
  // log_term[i][parent_state][state] = log transition (or root) + log emission.
  std::vector<double> log_term(n * static_cast<size_t>(K) * K);
  for (size_t i = 0; i < n; ++i) {
    const Node& nd = nodes[i];
    for (int pk = 0; pk < K; ++pk)
      for (int k = 0; k < K; ++k) {
        const double s2 = model.sigma2(nd.t, k);
        const double em = -0.5 * (std::log(2.0 * M_PI * s2) + nd.w * nd.w / s2);
        const double tr = nd.parent < 0 ? std::log(model.root_dist[k])
                                        : std::log(model.a(nd.t, pk, k));
        log_term[(i * K + pk) * K + k] = tr + em;
      }
  }

  // Depth-first enumeration of all K^n assignments with running partial sums.
  // Nodes are in scale order, so each parent's state is fixed before its
  // children are visited.
  std::vector<int> s(n, 0);

  // Pass 1: max log joint for stable exponentiation.
  double mx = -std::numeric_limits<double>::infinity();
  auto scan = [&](auto&& self, size_t i, double lp) -> void {
    if (i == n) {
      mx = std::max(mx, lp);
      return;
    }
    const int pk = nodes[i].parent < 0 ? 0 : s[nodes[i].parent];
    for (int k = 0; k < K; ++k) {
      s[i] = k;
      self(self, i + 1, lp + log_term[(i * K + pk) * K + k]);
    }
  };
  scan(scan, 0, 0.0);

  Posteriors post;
  post.K = K;
  post.gamma.resize(J);
  post.xi.resize(J - 1);
  for (int t = 1; t <= J; ++t) {
    post.gamma[t - 1].assign(forest.scales[t - 1].size() * K, 0.0);
    if (t >= 2)
      post.xi[t - 2].assign(forest.scales[t - 1].size() * static_cast<size_t>(K) * K, 0.0);
  }

  // Pass 2: accumulate marginals. The branch total returned by the recursion
  // is exactly the mass of all assignments extending the current prefix, so
  // gamma/xi pick it up at each level without a per-leaf scatter.
  auto accumulate = [&](auto&& self, size_t i, double lp) -> double {
    if (i == n) return std::exp(lp - mx);
    const Node& nd = nodes[i];
    const int pk = nd.parent < 0 ? 0 : s[nd.parent];
    const size_t local = i - scale_base[nd.t - 1];
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
      s[i] = k;
      const double mass = self(self, i + 1, lp + log_term[(i * K + pk) * K + k]);
      post.gamma[nd.t - 1][local * K + k] += mass;
      if (nd.parent >= 0)
        post.xi[nd.t - 2][local * K * K + static_cast<size_t>(pk) * K + k] += mass;
      total += mass;
    }
    return total;
  };
  std::fill(s.begin(), s.end(), 0);
  const double z = accumulate(accumulate, 0, 0.0);
  for (auto& g : post.gamma)
    for (auto& v : g) v /= z;
  for (auto& x : post.xi)
    for (auto& v : x) v /= z;
  post.log_likelihood = mx + std::log(z);
  return post;
}

}  // namespace hmtc
