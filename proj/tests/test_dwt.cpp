#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hmtc/dwt.hpp"

using namespace hmtc;

namespace {

ChannelPlane random_plane(int rows, int cols, uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  ChannelPlane p;
  p.values = Grid(rows, cols);
  for (auto& v : p.values.values()) v = u(rng);
  return p;
}

double max_abs_err(const Grid& a, const Grid& b) {
  REQUIRE(a.same_shape(b));
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

}  // namespace

TEST_CASE("constant plane has zero detail at every level") {
  ChannelPlane p;
  p.values = Grid(64, 64, 42.0);
  for (const auto name : wavelet_menu()) {
    const WaveletPyramid pyr = decompose(p, filter_bank(std::string(name)), 4);
    for (const auto& sb : pyr.details)
      for (const Grid* g : {&sb.h, &sb.v, &sb.d})
        for (double v : g->values()) CHECK(std::abs(v) < 1e-10);
  }
}

TEST_CASE("haar 2x2 hand evaluation") {
  // [[a,b],[c,d]]
  const double a = 7.0, b = 3.0, c = -2.0, d = 10.0;
  ChannelPlane p;
  p.values = Grid(2, 2);
  p.values.at(0, 0) = a;
  p.values.at(0, 1) = b;
  p.values.at(1, 0) = c;
  p.values.at(1, 1) = d;
  const WaveletPyramid pyr = decompose(p, filter_bank("haar"), 1);
  CHECK(pyr.approx.at(0, 0) == Catch::Approx((a + b + c + d) / 2).margin(1e-12));
  CHECK(pyr.details[0].h.at(0, 0) == Catch::Approx((a + b - c - d) / 2).margin(1e-12));
  CHECK(pyr.details[0].v.at(0, 0) == Catch::Approx((a - b + c - d) / 2).margin(1e-12));
  CHECK(pyr.details[0].d.at(0, 0) == Catch::Approx((a - b - c + d) / 2).margin(1e-12));
}

TEST_CASE("perfect reconstruction for every family") {
  int seed = 100;
  for (const auto name : wavelet_menu()) {
    const FilterBank fb = filter_bank(std::string(name));
    for (int trial = 0; trial < 5; ++trial) {
      const ChannelPlane p = random_plane(64, 64, seed++);
      const WaveletPyramid pyr = decompose(p, fb, 3);
      const ChannelPlane back = reconstruct(pyr, fb);
      CHECK(max_abs_err(p.values, back.values) < fb.tolerance());
    }
  }
}

TEST_CASE("deep decomposition still reconstructs (subbands down to 1x1)") {
  for (const auto name : wavelet_menu()) {
    const FilterBank fb = filter_bank(std::string(name));
    const ChannelPlane p = random_plane(64, 64, 9001);
    const WaveletPyramid pyr = decompose(p, fb, 6);
    REQUIRE(pyr.approx.rows() == 1);
    CHECK(max_abs_err(p.values, reconstruct(pyr, fb).values) < fb.tolerance());
  }
}

TEST_CASE("zeroed details reconstruct the lowpass approximation only") {
  const FilterBank fb = filter_bank("haar");
  const ChannelPlane p = random_plane(16, 16, 4);
  WaveletPyramid pyr = decompose(p, fb, 1);
  pyr.details[0].h = Grid(8, 8, 0.0);
  pyr.details[0].v = Grid(8, 8, 0.0);
  pyr.details[0].d = Grid(8, 8, 0.0);
  const ChannelPlane back = reconstruct(pyr, fb);
  // Haar synthesis of the approximation alone replicates each coarse value
  // over its 2x2 block (divided by 2).
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c)
      CHECK(back.values.at(r, c) ==
            Catch::Approx(pyr.approx.at(r / 2, c / 2) / 2.0).margin(1e-12));
}

TEST_CASE("energy preservation for orthogonal families") {
  for (const char* name : {"haar", "db2", "sym3", "coif1", "dmey"}) {
    const FilterBank fb = filter_bank(name);
    const ChannelPlane p = random_plane(32, 32, 77);
    const WaveletPyramid pyr = decompose(p, fb, 3);
    double ein = 0.0, eout = 0.0;
    for (double v : p.values.values()) ein += v * v;
    for (const auto& sb : pyr.details)
      for (const Grid* g : {&sb.h, &sb.v, &sb.d})
        for (double v : g->values()) eout += v * v;
    for (double v : pyr.approx.values()) eout += v * v;
    CHECK(eout == Catch::Approx(ein).epsilon(1e-6));
  }
}

TEST_CASE("subband dims halve per level") {
  const ChannelPlane p = random_plane(64, 32, 5);
  const WaveletPyramid pyr = decompose(p, filter_bank("db2"), 3);
  for (int j = 1; j <= 3; ++j) {
    CHECK(pyr.details[j - 1].h.rows() == 64 >> j);
    CHECK(pyr.details[j - 1].h.cols() == 32 >> j);
  }
  CHECK(pyr.approx.rows() == 8);
  CHECK(pyr.approx.cols() == 4);
}

TEST_CASE("decompose rejects non-dyadic dims") {
  ChannelPlane p;
  p.values = Grid(48, 48);
  CHECK_THROWS_AS(decompose(p, filter_bank("haar"), 5), std::invalid_argument);
}

TEST_CASE("reconstruct rejects mismatched subbands") {
  const ChannelPlane p = random_plane(16, 16, 6);
  WaveletPyramid pyr = decompose(p, filter_bank("haar"), 2);
  pyr.details[0].v = Grid(4, 4, 0.0);
  CHECK_THROWS_AS(reconstruct(pyr, filter_bank("haar")), std::invalid_argument);
}
