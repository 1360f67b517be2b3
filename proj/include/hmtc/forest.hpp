#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hmtc/dwt.hpp"
#include "hmtc/grid.hpp"

namespace hmtc {

// One orientation's detail coefficients arranged coarsest-first along the
// internal-time axis. Scale t (1-based) holds the level-(J+1-t) subband;
// node (t, r, c) has children (t+1, 2r+dr, 2c+dc), dr,dc in {0,1}.
struct QuadForest {
  Orientation orientation = Orientation::H;
  std::vector<Grid> scales;  // scales[t-1], t = 1..J

  int depth() const { return static_cast<int>(scales.size()); }
  int root_count() const { return scales.empty() ? 0 : static_cast<int>(scales[0].size()); }

  size_t node_count() const {
    size_t n = 0;
    for (const auto& g : scales) n += g.size();
    return n;
  }

  void validate() const {
    if (scales.empty()) throw std::invalid_argument("QuadForest: empty");
    for (int t = 1; t < depth(); ++t) {
      if (scales[t].rows() != 2 * scales[t - 1].rows() ||
          scales[t].cols() != 2 * scales[t - 1].cols())
        throw std::invalid_argument("QuadForest: scale dims not dyadic");
    }
  }
};

inline QuadForest build_forest(const WaveletPyramid& pyr, Orientation orientation) {
  QuadForest f;
  f.orientation = orientation;
  f.scales.reserve(pyr.levels);
  for (int level = pyr.levels; level >= 1; --level)
    f.scales.push_back(pyr.details[level - 1][orientation]);
  f.validate();
  return f;
}

// Shape-only description of a forest, for simulation.
struct ForestShape {
  int depth = 0;
  int root_rows = 1;
  int root_cols = 1;
};

inline ForestShape shape_of(const QuadForest& f) {
  return {f.depth(), f.scales[0].rows(), f.scales[0].cols()};
}

}  // namespace hmtc
