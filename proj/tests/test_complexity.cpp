#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hmtc/complexity.hpp"
#include "hmtc/selftest.hpp"

using namespace hmtc;

namespace {

// Exhaustive H(S | W) in bits per node, enumerating every state assignment.
double joint_entropy_per_node(const QuadForest& f, const HmtModel& m) {
  struct Node {
    int t;
    double w;
    int parent;
  };
  std::vector<Node> nodes;
  std::vector<size_t> base(f.depth());
  for (int t = 1; t <= f.depth(); ++t) {
    base[t - 1] = nodes.size();
    const Grid& g = f.scales[t - 1];
    for (int r = 0; r < g.rows(); ++r)
      for (int c = 0; c < g.cols(); ++c) {
        int parent = -1;
        if (t > 1)
          parent = static_cast<int>(base[t - 2]) +
                   (r / 2) * f.scales[t - 2].cols() + c / 2;
        nodes.push_back({t, g.at(r, c), parent});
      }
  }
  const int K = m.K;
  const size_t n = nodes.size();
  size_t total = 1;
  for (size_t i = 0; i < n; ++i) total *= K;
  std::vector<double> logp(total);
  std::vector<int> s(n);
  double mx = -std::numeric_limits<double>::infinity();
  for (size_t code = 0; code < total; ++code) {
    size_t rem = code;
    for (size_t i = 0; i < n; ++i) {
      s[i] = static_cast<int>(rem % K);
      rem /= K;
    }
    double lp = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const auto& nd = nodes[i];
      lp += nd.parent < 0 ? std::log(m.root_dist[s[i]])
                          : std::log(m.a(nd.t, s[nd.parent], s[i]));
      const double s2 = m.sigma2(nd.t, s[i]);
      lp += -0.5 * (std::log(2 * M_PI * s2) + nd.w * nd.w / s2);
    }
    logp[code] = lp;
    mx = std::max(mx, lp);
  }
  double z = 0.0;
  for (double lp : logp) z += std::exp(lp - mx);
  double h = 0.0;
  for (double lp : logp) {
    const double p = std::exp(lp - mx) / z;
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h / static_cast<double>(n);
}

// Quadratic-time span oracle: check every contiguous window directly.
int span_oracle(const std::vector<double>& curve, double eps) {
  int best = 0;
  const int n = static_cast<int>(curve.size());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      bool rising = true;
      for (int t = a; t < b; ++t)
        if (!(curve[t + 1] > curve[t] + eps)) rising = false;
      if (rising) best = std::max(best, b - a);
    }
  return best;
}

}  // namespace

TEST_CASE("shannon_entropy reference values") {
  CHECK(shannon_entropy({0.5, 0.5}) == Catch::Approx(1.0).margin(1e-12));
  CHECK(shannon_entropy({1.0, 0.0}) == Catch::Approx(0.0).margin(1e-12));
  CHECK(shannon_entropy({0.9, 0.1}) == Catch::Approx(0.46900).margin(5e-5));
  CHECK(shannon_entropy({0.25, 0.25, 0.25, 0.25}) == Catch::Approx(2.0).margin(1e-12));
  CHECK_THROWS_AS(shannon_entropy({0.7, 0.7}), std::invalid_argument);
  CHECK_THROWS_AS(shannon_entropy({1.3, -0.3}), std::invalid_argument);
}

TEST_CASE("local complexity is per-node posterior entropy") {
  std::mt19937_64 rng(7);
  const HmtModel m = selftest::random_model(2, 2, rng);
  const QuadForest f = selftest::random_forest(2, rng);
  const Posteriors p = upward_downward(f, m);
  const LocalComplexityMap map = local_complexity(p);
  REQUIRE(map.by_scale.size() == 2);
  REQUIRE(map.by_scale[0].size() == 1);
  REQUIRE(map.by_scale[1].size() == 4);
  for (size_t t = 0; t < 2; ++t)
    for (size_t v = 0; v < map.by_scale[t].size(); ++v) {
      const std::vector<double> g(p.gamma[t].begin() + v * 2,
                                  p.gamma[t].begin() + v * 2 + 2);
      CHECK(map.by_scale[t][v] == Catch::Approx(shannon_entropy(g)).margin(1e-9));
      CHECK(map.by_scale[t][v] >= 0.0);
      CHECK(map.by_scale[t][v] <= 1.0 + 1e-12);
    }
}

TEST_CASE("scale_curve averages the three orientation maps") {
  LocalComplexityMap h, v, d;
  h.K = v.K = d.K = 2;
  h.by_scale = {{0.2}, {0.4, 0.4, 0.4, 0.4}};
  v.by_scale = {{0.5}, {0.1, 0.1, 0.1, 0.1}};
  d.by_scale = {{0.8}, {0.7, 0.7, 0.7, 0.7}};
  const auto curve = scale_curve(h, v, d);
  REQUIRE(curve.size() == 2);
  CHECK(curve[0] == Catch::Approx(0.5).margin(1e-12));
  CHECK(curve[1] == Catch::Approx(0.4).margin(1e-12));
  LocalComplexityMap bad = d;
  bad.by_scale.pop_back();
  CHECK_THROWS_AS(scale_curve(h, v, bad), std::invalid_argument);
}

TEST_CASE("self_org_span reference curves") {
  CHECK(self_org_span({0.1, 0.2, 0.3, 0.25, 0.3}) == 2);
  CHECK(self_org_span({1, 2, 3, 4, 5, 6, 7, 8, 9}) == 8);
  CHECK(self_org_span({9, 8, 7, 6, 5, 4, 3, 2, 1}) == 0);
  CHECK(self_org_span({0.5}) == 0);
  CHECK(self_org_span({0.5, 0.5 + 5e-10}) == 0);  // below eps
  CHECK(self_org_span({0.5, 0.5 + 5e-10}, 1e-10) == 1);
  CHECK_THROWS_AS(self_org_span({}), std::invalid_argument);
  CHECK_THROWS_AS(self_org_span({1.0, 2.0}, -1.0), std::invalid_argument);
}

TEST_CASE("self_org_span agrees with a quadratic oracle") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> curve(2 + rng() % 12);
    for (auto& x : curve) x = u(rng);
    if (trial % 3 == 0)  // quantize to force plateaus and ties
      for (auto& x : curve) x = std::round(x * 4.0) / 4.0;
    REQUIRE(self_org_span(curve) == span_oracle(curve, 1e-9));
  }
}

TEST_CASE("orientational complexity equals exhaustive joint entropy") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int depth = 1 + static_cast<int>(rng() % 2);  // 1 or 5 nodes
    const HmtModel m = selftest::random_model(2, depth, rng);
    const QuadForest f = selftest::random_forest(depth, rng);
    const Posteriors p = upward_downward(f, m);
    CHECK(orientational_complexity(p) ==
          Catch::Approx(joint_entropy_per_node(f, m)).margin(1e-9));
  }
}

TEST_CASE("orientational complexity bounds and extremes") {
  std::mt19937_64 rng(27);
  // equal variances + uniform dynamics: posterior is iid uniform -> log2 K
  for (int K : {2, 3}) {
    HmtModel m = selftest::random_model(K, 3, rng);
    m.root_dist.assign(K, 1.0 / K);
    for (auto& A : m.trans) A.assign(static_cast<size_t>(K) * K, 1.0 / K);
    for (auto& v : m.var) v.assign(K, 1.3);
    const QuadForest f = selftest::random_forest(3, rng);
    CHECK(orientational_complexity(upward_downward(f, m)) ==
          Catch::Approx(std::log2(static_cast<double>(K))).margin(1e-9));
  }
  // deterministic root + identity transitions: zero entropy
  HmtModel m = selftest::random_model(2, 3, rng);
  m.root_dist = {1.0, 0.0};
  for (auto& A : m.trans) A = {1.0, 0.0, 0.0, 1.0};
  const QuadForest f = selftest::random_forest(3, rng);
  CHECK(orientational_complexity(upward_downward(f, m)) ==
        Catch::Approx(0.0).margin(1e-9));
  // general case: within [0, log2 K]
  for (int trial = 0; trial < 10; ++trial) {
    const HmtModel rm = selftest::random_model(3, 3, rng);
    const QuadForest rf = selftest::random_forest(3, rng);
    const double h = orientational_complexity(upward_downward(rf, rm));
    CHECK(h >= -1e-12);
    CHECK(h <= std::log2(3.0) + 1e-12);
  }
}

TEST_CASE("orientational complexity is invariant under state relabeling") {
  std::mt19937_64 rng(37);
  const QuadForest f = selftest::random_forest(3, rng);
  for (int trial = 0; trial < 5; ++trial) {
    HmtModel m = selftest::random_model(3, 3, rng);
    const double h = orientational_complexity(upward_downward(f, m));
    m.permute_states({1, 2, 0});
    CHECK(orientational_complexity(upward_downward(f, m)) ==
          Catch::Approx(h).margin(1e-12));
  }
}

TEST_CASE("prior complexity closed forms") {
  HmtModel m;
  m.K = 2;
  m.depth = 2;
  m.root_dist = {0.5, 0.5};
  m.trans = {{0.5, 0.5, 0.5, 0.5}};
  m.var = {{1.0, 2.0}, {1.0, 2.0}};
  CHECK(prior_complexity(m, {2, 1, 1}) == Catch::Approx(1.0).margin(1e-12));
  m.root_dist = {1.0, 0.0};
  m.trans = {{1.0, 0.0, 0.0, 1.0}};
  CHECK(prior_complexity(m, {2, 1, 1}) == Catch::Approx(0.0).margin(1e-12));
  // root H(0.9, 0.1) only; 4 children are deterministic given the parent
  m.root_dist = {0.9, 0.1};
  CHECK(prior_complexity(m, {2, 1, 1}) ==
        Catch::Approx(shannon_entropy({0.9, 0.1}) / 5.0).margin(1e-12));
}

TEST_CASE("summarize combines orientations") {
  std::mt19937_64 rng(47);
  const HmtModel m = selftest::random_model(2, 3, rng);
  const Posteriors h = upward_downward(selftest::random_forest(3, rng), m);
  const Posteriors v = upward_downward(selftest::random_forest(3, rng), m);
  const Posteriors d = upward_downward(selftest::random_forest(3, rng), m);
  const ComplexitySummary s = summarize(h, v, d);
  CHECK(s.horizontal == Catch::Approx(orientational_complexity(h)).margin(1e-12));
  CHECK(s.vertical == Catch::Approx(orientational_complexity(v)).margin(1e-12));
  CHECK(s.diagonal == Catch::Approx(orientational_complexity(d)).margin(1e-12));
  CHECK(s.global ==
        Catch::Approx((s.horizontal + s.vertical + s.diagonal) / 3.0).margin(1e-12));
  REQUIRE(s.per_scale_curve.size() == 3);
  CHECK(s.self_org_span == self_org_span(s.per_scale_curve));
}

TEST_CASE("published per-orientation values average to the published global") {
  // dmey analysis of the red channel: H/V/D -> global
  const double g = (0.8992 + 0.7845 + 0.6459) / 3.0;
  CHECK(g == Catch::Approx(0.7765).margin(5e-4));
}

TEST_CASE("select_optimal_wavelet on published tables") {
  const std::map<std::string, double> red = {
      {"haar", 0.7765}, {"db2", 0.6258},     {"sym3", 0.6763},
      {"coif1", 0.7435}, {"bior1.3", 0.7644}, {"rbior1.3", 0.7921},
      {"dmey", 0.8134}};
  CHECK(select_optimal_wavelet(red) == "dmey");
  const std::map<std::string, double> blue = {
      {"haar", 0.1845}, {"db2", 0.2804},     {"sym3", 0.3186},
      {"coif1", 0.2612}, {"bior1.3", 0.1950}, {"rbior1.3", 0.2225},
      {"dmey", 0.2780}};
  CHECK(select_optimal_wavelet(blue) == "sym3");
}

TEST_CASE("select_optimal_wavelet tie-break and errors") {
  std::map<std::string, double> tied;
  for (auto name : wavelet_menu()) tied[std::string(name)] = 0.5;
  CHECK(select_optimal_wavelet(tied) == "haar");  // menu order wins ties
  CHECK(select_optimal_wavelet({{"db2", 0.1}, {"sym3", 0.1}}) == "db2");
  CHECK_THROWS_AS(select_optimal_wavelet({}), std::invalid_argument);
  CHECK_THROWS_AS(select_optimal_wavelet({{"sym9", 0.9}}), std::invalid_argument);
}
