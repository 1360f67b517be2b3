#pragma once

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "hmtc/brute_force.hpp"
#include "hmtc/hmt.hpp"

namespace hmtc {

// Random small-tree fixtures shared by the oracle selftest and the test suite.
namespace selftest {

inline HmtModel random_model(int K, int depth, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  HmtModel m;
  m.K = K;
  m.depth = depth;
  m.root_dist.resize(K);
  double s = 0.0;
  for (int k = 0; k < K; ++k) s += (m.root_dist[k] = u(rng));
  for (int k = 0; k < K; ++k) m.root_dist[k] /= s;
  m.trans.assign(depth - 1, std::vector<double>(static_cast<size_t>(K) * K));
  for (auto& A : m.trans)
    for (int i = 0; i < K; ++i) {
      double rs = 0.0;
      for (int j = 0; j < K; ++j) rs += (A[i * K + j] = u(rng));
      for (int j = 0; j < K; ++j) A[i * K + j] /= rs;
    }
  m.var.assign(depth, std::vector<double>(K));
  for (auto& v : m.var)
    for (int k = 0; k < K; ++k) v[k] = 0.25 + 4.0 * u(rng);
  return m;
}

inline QuadForest random_forest(int depth, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.5);
  QuadForest f;
  for (int t = 1; t <= depth; ++t) {
    Grid g(1 << (t - 1), 1 << (t - 1));
    for (auto& v : g.values()) v = n(rng);
    f.scales.push_back(std::move(g));
  }
  return f;
}

inline double max_abs_diff(const Posteriors& a, const Posteriors& b) {
  double m = std::abs(a.log_likelihood - b.log_likelihood);
  for (size_t t = 0; t < a.gamma.size(); ++t)
    for (size_t i = 0; i < a.gamma[t].size(); ++i)
      m = std::max(m, std::abs(a.gamma[t][i] - b.gamma[t][i]));
  for (size_t t = 0; t < a.xi.size(); ++t)
    for (size_t i = 0; i < a.xi[t].size(); ++i)
      m = std::max(m, std::abs(a.xi[t][i] - b.xi[t][i]));
  return m;
}

struct Result {
  bool ok = true;
  std::string log;
};

// Upward-downward vs. full enumeration on 1-, 5- and 21-node trees.
inline Result oracle_suite(int trials = 50, double tol = 1e-10) {
  Result res;
  std::ostringstream log;
  std::mt19937_64 rng(20240901);
  for (int depth : {1, 2, 3}) {
    double worst = 0.0;
    for (int i = 0; i < trials; ++i) {
      const HmtModel m = random_model(2, depth, rng);
      const QuadForest f = random_forest(depth, rng);
      worst = std::max(worst, max_abs_diff(upward_downward(f, m),
                                           brute_force_posteriors(f, m)));
    }
    const int nodes = depth == 1 ? 1 : (depth == 2 ? 5 : 21);
    log << "  " << nodes << "-node trees, " << trials << " trials: max deviation "
        << worst << (worst < tol ? " (ok)" : " (FAIL)") << "\n";
    if (!(worst < tol)) res.ok = false;
  }
  res.log = log.str();
  return res;
}

}  // namespace selftest
}  // namespace hmtc
