#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "hmtc/forest.hpp"

namespace hmtc {

constexpr double kZeroCoeffTol = 1e-9;   // |w| below this everywhere => degenerate scale
constexpr double kVarFloorAbs = 1e-12;
constexpr double kVarFloorRel = 1e-8;    // times per-scale empirical variance

// Hidden Markov quad-tree model with within-scale tying. States are kept
// ordered by increasing finest-scale variance (state 0 = low-variance "yin").
struct HmtModel {
  int K = 2;
  int depth = 0;                                // J
  std::vector<double> root_dist;                // K
  std::vector<std::vector<double>> trans;       // trans[t-2]: K*K row-major, child time t in 2..J
  std::vector<std::vector<double>> var;         // var[t-1][k], t in 1..J
  Orientation orientation = Orientation::H;

  double a(int child_time, int i, int j) const { return trans[child_time - 2][i * K + j]; }
  double& a(int child_time, int i, int j) { return trans[child_time - 2][i * K + j]; }
  double sigma2(int t, int k) const { return var[t - 1][k]; }

  void validate() const {
    if (K < 2 || K > 5) throw std::invalid_argument("HmtModel: K must be in 2..5");
    if (depth < 1 || static_cast<int>(var.size()) != depth ||
        static_cast<int>(trans.size()) != depth - 1 ||
        static_cast<int>(root_dist.size()) != K)
      throw std::invalid_argument("HmtModel: inconsistent dimensions");
    auto check_dist = [this](const double* p) {
      double s = 0.0;
      for (int k = 0; k < K; ++k) {
        if (p[k] < 0.0) throw std::invalid_argument("HmtModel: negative probability");
        s += p[k];
      }
      if (std::abs(s - 1.0) > 1e-12)
        throw std::invalid_argument("HmtModel: distribution does not sum to 1");
    };
    check_dist(root_dist.data());
    for (const auto& A : trans)
      for (int i = 0; i < K; ++i) check_dist(A.data() + static_cast<size_t>(i) * K);
    for (const auto& v : var)
      for (double s2 : v)
        if (!(s2 > 0.0)) throw std::invalid_argument("HmtModel: non-positive variance");
  }

  void permute_states(const std::vector<int>& perm) {
    std::vector<double> pi(K);
    for (int k = 0; k < K; ++k) pi[k] = root_dist[perm[k]];
    root_dist = pi;
    for (auto& A : trans) {
      std::vector<double> B(static_cast<size_t>(K) * K);
      for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j) B[i * K + j] = A[perm[i] * K + perm[j]];
      A = B;
    }
    for (auto& v : var) {
      std::vector<double> w(K);
      for (int k = 0; k < K; ++k) w[k] = v[perm[k]];
      v = w;
    }
  }

  // Order states by increasing variance at the finest scale.
  void sort_states() {
    std::vector<int> perm(K);
    std::iota(perm.begin(), perm.end(), 0);
    const auto& fine = var.back();
    std::stable_sort(perm.begin(), perm.end(),
                     [&fine](int a, int b) { return fine[a] < fine[b]; });
    permute_states(perm);
  }
};

// Smoothed posteriors for one forest under one model.
struct Posteriors {
  int K = 0;
  // gamma[t-1]: per-node state distribution, node-major (node index r*cols+c).
  std::vector<std::vector<double>> gamma;
  // xi[t-2]: per-node joint P(S_parent, S_child | W), parent-state-major.
  std::vector<std::vector<double>> xi;
  double log_likelihood = 0.0;
};

struct FitDiagnostics {
  int iterations = 0;
  std::vector<double> loglik_trace;
  bool converged = false;
  std::vector<int> degenerate_scales;  // 1-based internal times
  bool degenerate_forest = false;      // all scales degenerate: zero-complexity sentinel
};

struct EmConfig {
  int max_iter = 200;
  double rel_tol = 1e-6;
  uint64_t seed = 0;
};

namespace detail {

inline std::vector<double> empirical_scale_variance(const QuadForest& f) {
  std::vector<double> out(f.depth());
  for (int t = 0; t < f.depth(); ++t) {
    const auto& g = f.scales[t];
    double s = 0.0;
    for (double w : g.values()) s += w * w;
    out[t] = g.size() ? s / static_cast<double>(g.size()) : 0.0;
  }
  return out;
}

inline bool scale_degenerate(const Grid& g) {
  for (double w : g.values())
    if (std::abs(w) >= kZeroCoeffTol) return false;
  return true;
}

inline double var_floor(double empirical_var) {
  return std::max(kVarFloorAbs, kVarFloorRel * empirical_var);
}

}  // namespace detail

// Deterministic initialization: uniform root distribution, diagonally
// dominant transitions, per-scale variance ladder spanning 0.2x..2.0x the
// empirical coefficient variance. The seed is carried for provenance only;
// no randomness is drawn here.
inline HmtModel init_params(const QuadForest& forest, int K, uint64_t seed = 0) {
  (void)seed;
  forest.validate();
  if (K < 2 || K > 5) throw std::invalid_argument("init_params: K must be in 2..5");
  const int J = forest.depth();
  const auto emp = detail::empirical_scale_variance(forest);
  bool any_live = false;
  for (int t = 0; t < J; ++t)
    if (!detail::scale_degenerate(forest.scales[t])) any_live = true;
  if (!any_live) throw std::invalid_argument("init_params: all scales degenerate");

  HmtModel m;
  m.K = K;
  m.depth = J;
  m.orientation = forest.orientation;
  m.root_dist.assign(K, 1.0 / K);
  const double diag = (K == 2) ? 0.7 : 0.5 + 0.5 / K;
  const double off = (1.0 - diag) / (K - 1);
  m.trans.assign(J - 1, std::vector<double>(static_cast<size_t>(K) * K, off));
  for (auto& A : m.trans)
    for (int i = 0; i < K; ++i) A[static_cast<size_t>(i) * K + i] = diag;
  m.var.assign(J, std::vector<double>(K));
  const double ratio = std::pow(10.0, 1.0 / (K - 1));  // 0.2x .. 2.0x geometric ladder
  for (int t = 0; t < J; ++t) {
    const double base = emp[t] > 0.0 ? emp[t] : 1.0;
    double f = 0.2;
    for (int k = 0; k < K; ++k) {
      m.var[t][k] = std::max(base * f, detail::var_floor(emp[t]));
      f *= ratio;
    }
  }
  return m;
}

// Exact smoothing by a scaled upward-downward pass. Per-node conditional
// scaling keeps every intermediate in [0,1]; log-scale constants accumulate
// into the likelihood, so forests of any depth stay finite.
inline Posteriors upward_downward(const QuadForest& forest, const HmtModel& model) {
  forest.validate();
  model.validate();
  const int J = forest.depth();
  if (model.depth != J) throw std::invalid_argument("upward_downward: depth mismatch");
  const int K = model.K;
  constexpr double kTiny = 1e-300;

  Posteriors post;
  post.K = K;
  post.gamma.resize(J);
  post.xi.resize(J - 1);

  // beta[t]: scaled P(subtree coeffs | state), per node. msg[t] (t>=2):
  // message to the parent, msg_v(i) = sum_j A(t)[i,j] beta_v(j).
  std::vector<std::vector<double>> beta(J), msg(J);
  double log_scale = 0.0;

  for (int t = J; t >= 1; --t) {
    const Grid& g = forest.scales[t - 1];
    const int rows = g.rows(), cols = g.cols();
    const size_t n = g.size();
    beta[t - 1].assign(n * K, 0.0);
    if (t >= 2) msg[t - 1].assign(n * K, 0.0);
    std::vector<double> ell(K);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double w = g.at(r, c);
        if (!std::isfinite(w))
          throw std::invalid_argument("upward_downward: non-finite coefficient");
        const size_t v = static_cast<size_t>(r) * cols + c;
        for (int k = 0; k < K; ++k) {
          const double s2 = model.sigma2(t, k);
          ell[k] = -0.5 * (std::log(2.0 * M_PI * s2) + w * w / s2);
        }
        if (t < J) {
          const auto& cm = msg[t];
          const int ccols = forest.scales[t].cols();
          for (int dr = 0; dr < 2; ++dr)
            for (int dc = 0; dc < 2; ++dc) {
              const size_t ch = static_cast<size_t>(2 * r + dr) * ccols + (2 * c + dc);
              for (int k = 0; k < K; ++k) ell[k] += std::log(std::max(cm[ch * K + k], kTiny));
            }
        }
        const double mx = *std::max_element(ell.begin(), ell.end());
        double s = 0.0;
        for (int k = 0; k < K; ++k) {
          const double b = std::exp(ell[k] - mx);
          beta[t - 1][v * K + k] = b;
          s += b;
        }
        for (int k = 0; k < K; ++k) beta[t - 1][v * K + k] /= s;
        log_scale += mx + std::log(s);
        if (t >= 2) {
          for (int i = 0; i < K; ++i) {
            double acc = 0.0;
            for (int j = 0; j < K; ++j) acc += model.a(t, i, j) * beta[t - 1][v * K + j];
            msg[t - 1][v * K + i] = acc;
          }
        }
      }
    }
  }

  // Root term and downward pass.
  double ll = log_scale;
  {
    const size_t n = forest.scales[0].size();
    post.gamma[0].assign(n * K, 0.0);
    for (size_t v = 0; v < n; ++v) {
      double s = 0.0;
      for (int k = 0; k < K; ++k) {
        const double p = model.root_dist[k] * beta[0][v * K + k];
        post.gamma[0][v * K + k] = p;
        s += p;
      }
      ll += std::log(std::max(s, kTiny));
      for (int k = 0; k < K; ++k) post.gamma[0][v * K + k] /= s;
    }
  }
  for (int t = 2; t <= J; ++t) {
    const Grid& g = forest.scales[t - 1];
    const int rows = g.rows(), cols = g.cols();
    const int pcols = forest.scales[t - 2].cols();
    post.gamma[t - 1].assign(g.size() * K, 0.0);
    post.xi[t - 2].assign(g.size() * static_cast<size_t>(K) * K, 0.0);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const size_t v = static_cast<size_t>(r) * cols + c;
        const size_t u = static_cast<size_t>(r / 2) * pcols + (c / 2);
        double* xi = post.xi[t - 2].data() + v * K * K;
        double* gv = post.gamma[t - 1].data() + v * K;
        const double* gu = post.gamma[t - 2].data() + u * K;
        const double* bv = beta[t - 1].data() + v * K;
        const double* mv = msg[t - 1].data() + v * K;
        for (int i = 0; i < K; ++i) {
          const double denom = std::max(mv[i], kTiny);
          for (int j = 0; j < K; ++j) {
            const double x = gu[i] * model.a(t, i, j) * bv[j] / denom;
            xi[i * K + j] = x;
            gv[j] += x;
          }
        }
      }
    }
  }
  post.log_likelihood = ll;
  return post;
}

inline double log_likelihood(const QuadForest& forest, const HmtModel& model) {
  return upward_downward(forest, model).log_likelihood;
}

// EM with within-scale tying. The E-step is upward_downward; the M-step
// pools statistics over all nodes of a scale (and all roots).
inline std::pair<HmtModel, FitDiagnostics> em_fit(const QuadForest& forest, int K,
                                                  const EmConfig& cfg = {}) {
  forest.validate();
  const int J = forest.depth();
  FitDiagnostics diag;
  const auto emp = detail::empirical_scale_variance(forest);
  std::vector<bool> degen(J);
  for (int t = 0; t < J; ++t) {
    degen[t] = detail::scale_degenerate(forest.scales[t]);
    if (degen[t]) diag.degenerate_scales.push_back(t + 1);
  }
  if (static_cast<int>(diag.degenerate_scales.size()) == J) {
    // Zero-complexity sentinel: no information to fit.
    diag.degenerate_forest = true;
    HmtModel m;
    m.K = K;
    m.depth = J;
    m.orientation = forest.orientation;
    m.root_dist.assign(K, 1.0 / K);
    const double diagv = (K == 2) ? 0.7 : 0.5 + 0.5 / K;
    const double off = (1.0 - diagv) / (K - 1);
    m.trans.assign(J - 1, std::vector<double>(static_cast<size_t>(K) * K, off));
    for (auto& A : m.trans)
      for (int i = 0; i < K; ++i) A[static_cast<size_t>(i) * K + i] = diagv;
    m.var.assign(J, std::vector<double>(K, kVarFloorAbs));
    return {m, diag};
  }

  HmtModel model = init_params(forest, K, cfg.seed);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < cfg.max_iter; ++it) {
    Posteriors post = upward_downward(forest, model);
    diag.loglik_trace.push_back(post.log_likelihood);
    diag.iterations = it + 1;
    if (it > 0) {
      const double rel = std::abs(post.log_likelihood - prev_ll) /
                         std::max(std::abs(prev_ll), 1e-300);
      if (rel < cfg.rel_tol) {
        diag.converged = true;
        break;
      }
    }
    prev_ll = post.log_likelihood;

    // M-step.
    {
      const size_t n = forest.scales[0].size();
      std::vector<double> pi(K, 0.0);
      for (size_t v = 0; v < n; ++v)
        for (int k = 0; k < K; ++k) pi[k] += post.gamma[0][v * K + k];
      for (int k = 0; k < K; ++k) model.root_dist[k] = pi[k] / static_cast<double>(n);
    }
    for (int t = 2; t <= J; ++t) {
      const auto& xi = post.xi[t - 2];
      const size_t n = forest.scales[t - 1].size();
      std::vector<double> acc(static_cast<size_t>(K) * K, 0.0);
      for (size_t v = 0; v < n; ++v)
        for (int i = 0; i < K; ++i)
          for (int j = 0; j < K; ++j) acc[i * K + j] += xi[v * K * K + i * K + j];
      for (int i = 0; i < K; ++i) {
        double row = 0.0;
        for (int j = 0; j < K; ++j) row += acc[i * K + j];
        if (row > 0.0)
          for (int j = 0; j < K; ++j) model.a(t, i, j) = acc[i * K + j] / row;
      }
    }
    for (int t = 1; t <= J; ++t) {
      if (degen[t - 1]) continue;  // pinned at the floor, excluded from fitting
      const Grid& g = forest.scales[t - 1];
      const auto& gam = post.gamma[t - 1];
      const double floor_t = detail::var_floor(emp[t - 1]);
      for (int k = 0; k < K; ++k) {
        double num = 0.0, den = 0.0;
        for (size_t v = 0; v < g.size(); ++v) {
          const double w = g.values()[v];
          num += gam[v * K + k] * w * w;
          den += gam[v * K + k];
        }
        if (den > 0.0) model.var[t - 1][k] = std::max(num / den, floor_t);
      }
    }
  }
  model.sort_states();
  return {model, diag};
}

namespace detail {

// mt19937_64-driven standard normal; hand-rolled Box-Muller so that draws are
// identical across standard library implementations.
class NormalSampler {
public:
  explicit NormalSampler(uint64_t seed) : rng_(seed) {}
  double operator()() {
    if (have_) {
      have_ = false;
      return cached_;
    }
    double u1 = uniform01(), u2 = uniform01();
    while (u1 <= 1e-300) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    cached_ = r * std::sin(2.0 * M_PI * u2);
    have_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }
  int categorical(const double* p, int k) {
    const double u = uniform01();
    double acc = 0.0;
    for (int i = 0; i < k; ++i) {
      acc += p[i];
      if (u < acc) return i;
    }
    return k - 1;
  }

private:
  double uniform01() {
    return (rng_() >> 11) * (1.0 / 9007199254740992.0);  // 53-bit mantissa
  }
  std::mt19937_64 rng_;
  bool have_ = false;
  double cached_ = 0.0;
};

}  // namespace detail

// Ancestral sampling from the model on the given shape.
inline QuadForest simulate(const HmtModel& model, const ForestShape& shape, uint64_t seed) {
  model.validate();
  if (shape.depth != model.depth) throw std::invalid_argument("simulate: depth mismatch");
  detail::NormalSampler rng(seed);
  const int K = model.K;
  QuadForest f;
  f.orientation = model.orientation;
  std::vector<std::vector<int>> states(shape.depth);
  for (int t = 1; t <= shape.depth; ++t) {
    const int rows = shape.root_rows << (t - 1);
    const int cols = shape.root_cols << (t - 1);
    Grid g(rows, cols);
    states[t - 1].resize(static_cast<size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const size_t v = static_cast<size_t>(r) * cols + c;
        int s;
        if (t == 1) {
          s = rng.categorical(model.root_dist.data(), K);
        } else {
          const int ps = states[t - 2][static_cast<size_t>(r / 2) * (cols / 2) + (c / 2)];
          s = rng.categorical(model.trans[t - 2].data() + static_cast<size_t>(ps) * K, K);
        }
        states[t - 1][v] = s;
        g.at(r, c) = std::sqrt(model.sigma2(t, s)) * rng();
      }
    }
    f.scales.push_back(std::move(g));
  }
  return f;
}

}  // namespace hmtc
