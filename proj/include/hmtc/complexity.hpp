#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmtc/filters.hpp"
#include "hmtc/hmt.hpp"

namespace hmtc {

// -sum p log2 p, with 0 log 0 = 0. Accepts any length->=1 distribution.
inline double shannon_entropy(const std::vector<double>& p) {
  double s = 0.0;
  for (double x : p) {
    if (x < -1e-12) throw std::invalid_argument("shannon_entropy: negative entry");
    s += x;
  }
  if (std::abs(s - 1.0) > 1e-9)
    throw std::invalid_argument("shannon_entropy: does not sum to 1");
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log2(x);
  return h;
}

namespace detail {
inline double entropy_bits(const double* p, size_t n) {
  double h = 0.0;
  for (size_t i = 0; i < n; ++i)
    if (p[i] > 0.0) h -= p[i] * std::log2(p[i]);
  return h;
}
}  // namespace detail

// Per-node entropy of the posterior state distribution, by scale.
struct LocalComplexityMap {
  int K = 0;
  std::vector<std::vector<double>> by_scale;  // by_scale[t-1][node], bits
};

inline LocalComplexityMap local_complexity(const Posteriors& post) {
  LocalComplexityMap map;
  map.K = post.K;
  map.by_scale.resize(post.gamma.size());
  for (size_t t = 0; t < post.gamma.size(); ++t) {
    const auto& g = post.gamma[t];
    const size_t n = g.size() / post.K;
    map.by_scale[t].resize(n);
    for (size_t v = 0; v < n; ++v)
      map.by_scale[t][v] = detail::entropy_bits(g.data() + v * post.K, post.K);
  }
  return map;
}

// curve[t-1] = mean local complexity at internal time t over all nodes of the
// three orientation maps.
inline std::vector<double> scale_curve(const LocalComplexityMap& h,
                                       const LocalComplexityMap& v,
                                       const LocalComplexityMap& d) {
  const size_t J = h.by_scale.size();
  if (v.by_scale.size() != J || d.by_scale.size() != J)
    throw std::invalid_argument("scale_curve: scale count mismatch");
  std::vector<double> curve(J, 0.0);
  for (size_t t = 0; t < J; ++t) {
    double sum = 0.0;
    size_t n = 0;
    for (const auto* m : {&h, &v, &d}) {
      for (double x : m->by_scale[t]) sum += x;
      n += m->by_scale[t].size();
    }
    if (n == 0) throw std::invalid_argument("scale_curve: empty scale");
    curve[t] = sum / static_cast<double>(n);
  }
  return curve;
}

// Length (in steps) of the longest run with curve[t+1] > curve[t] + eps.
inline int self_org_span(const std::vector<double>& curve, double eps = 1e-9) {
  if (curve.empty()) throw std::invalid_argument("self_org_span: empty curve");
  if (eps < 0.0) throw std::invalid_argument("self_org_span: negative eps");
  int best = 0, run = 0;
  for (size_t t = 0; t + 1 < curve.size(); ++t) {
    if (curve[t + 1] > curve[t] + eps)
      ++run;
    else
      run = 0;
    best = std::max(best, run);
  }
  return best;
}

// Per-node-normalized joint entropy of the hidden tree given the observed
// coefficients, in bits per node. Exact via the chain rule on the
// conditional Markov tree:
//   H = [ sum_roots H(gamma(root))
//       + sum_edges ( H(xi(u,v)) - H(gamma(u)) ) ] / node_count
inline double orientational_complexity(const Posteriors& post) {
  const int K = post.K;
  double total = 0.0;
  size_t nodes = 0;
  {
    const auto& g0 = post.gamma[0];
    const size_t n = g0.size() / K;
    nodes += n;
    for (size_t v = 0; v < n; ++v) total += detail::entropy_bits(g0.data() + v * K, K);
  }
  for (size_t t = 1; t < post.gamma.size(); ++t) {
    const auto& xi = post.xi[t - 1];
    const size_t n = post.gamma[t].size() / K;
    nodes += n;
    // Each child edge contributes H(S_child | S_parent, W) = H(joint) minus
    // the parent marginal entropy, recovered from the xi row sums.
    for (size_t v = 0; v < n; ++v) {
      const double* j = xi.data() + v * K * K;
      std::vector<double> pu(K, 0.0);
      for (int i = 0; i < K; ++i)
        for (int k = 0; k < K; ++k) pu[i] += j[i * K + k];
      total += detail::entropy_bits(j, static_cast<size_t>(K) * K) -
               detail::entropy_bits(pu.data(), K);
    }
  }
  return nodes ? total / static_cast<double>(nodes) : 0.0;
}

// Model-based (prior) tree entropy per node, ignoring the observations.
// Secondary diagnostic alongside the posterior-based measure.
inline double prior_complexity(const HmtModel& model, const ForestShape& shape) {
  model.validate();
  const int K = model.K;
  std::vector<double> mu = model.root_dist;
  double total = 0.0;
  size_t nodes = 0;
  size_t count = static_cast<size_t>(shape.root_rows) * shape.root_cols;
  total += count * detail::entropy_bits(mu.data(), K);
  nodes += count;
  for (int t = 2; t <= shape.depth; ++t) {
    count *= 4;
    nodes += count;
    double cond = 0.0;
    for (int i = 0; i < K; ++i) {
      std::vector<double> row(K);
      for (int j = 0; j < K; ++j) row[j] = model.a(t, i, j);
      cond += mu[i] * detail::entropy_bits(row.data(), K);
    }
    total += count * cond;
    std::vector<double> nxt(K, 0.0);
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < K; ++j) nxt[j] += mu[i] * model.a(t, i, j);
    mu = nxt;
  }
  return total / static_cast<double>(nodes);
}

struct ComplexitySummary {
  double horizontal = 0.0;
  double vertical = 0.0;
  double diagonal = 0.0;
  double global = 0.0;                  // mean of the three
  std::vector<double> per_scale_curve;  // length J, t=1 coarsest
  int self_org_span = 0;                // steps
  double prior_global = 0.0;            // diagnostic: model-based entropy mean
  int K = 2;
  bool degenerate = false;
};

// Combine the three orientation posteriors of one analysis unit.
inline ComplexitySummary summarize(const Posteriors& h, const Posteriors& v,
                                   const Posteriors& d, double span_eps = 1e-9) {
  if (h.K != v.K || h.K != d.K || h.gamma.size() != v.gamma.size() ||
      h.gamma.size() != d.gamma.size())
    throw std::invalid_argument("summarize: mismatched posteriors");
  ComplexitySummary s;
  s.K = h.K;
  s.horizontal = orientational_complexity(h);
  s.vertical = orientational_complexity(v);
  s.diagonal = orientational_complexity(d);
  s.global = (s.horizontal + s.vertical + s.diagonal) / 3.0;
  s.per_scale_curve = scale_curve(local_complexity(h), local_complexity(v),
                                  local_complexity(d));
  s.self_org_span = self_org_span(s.per_scale_curve, span_eps);
  return s;
}

// Argmax of global complexity; ties broken by menu order.
inline std::string select_optimal_wavelet(const std::map<std::string, double>& globals) {
  if (globals.empty()) throw std::invalid_argument("select_optimal_wavelet: empty map");
  std::string best;
  double best_v = 0.0;
  for (std::string_view name : wavelet_menu()) {
    auto it = globals.find(std::string(name));
    if (it == globals.end()) continue;
    if (best.empty() || it->second > best_v) {
      best = it->first;
      best_v = it->second;
    }
  }
  if (best.empty())
    throw std::invalid_argument("select_optimal_wavelet: no menu wavelet present");
  return best;
}

}  // namespace hmtc
