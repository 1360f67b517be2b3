#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "hmtc/hmt.hpp"
#include "hmtc/image.hpp"

namespace hmtc {

// Deterministic synthetic fixtures for tests and demos.

inline RgbImage checkerboard_image(int size, int cell = 1) {
  RgbImage img;
  img.width = img.height = size;
  img.pixels.assign(static_cast<size_t>(3) * size * size, 0);
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c) {
      const uint8_t v = (((r / cell) + (c / cell)) % 2) ? 255 : 0;
      for (int ch = 0; ch < 3; ++ch) img.at(r, c, ch) = v;
    }
  return img;
}

namespace detail {

// Value-noise octave stack: random grids at dyadic resolutions, bilinearly
// upsampled and summed with decaying amplitude. Gives texture at every scale.
inline Grid multiscale_noise(int size, uint64_t seed) {
  Grid out(size, size, 0.0);
  NormalSampler rng(seed);
  double amp = 1.0;
  for (int res = 2; res <= size; res *= 2) {
    Grid coarse(res, res);
    for (auto& v : coarse.values()) v = rng();
    const double step = static_cast<double>(res) / size;
    for (int r = 0; r < size; ++r) {
      const double fr = r * step;
      const int r0 = std::min(static_cast<int>(fr), res - 1);
      const int r1 = std::min(r0 + 1, res - 1);
      const double wr = fr - r0;
      for (int c = 0; c < size; ++c) {
        const double fc = c * step;
        const int c0 = std::min(static_cast<int>(fc), res - 1);
        const int c1 = std::min(c0 + 1, res - 1);
        const double wc = fc - c0;
        const double v = (1 - wr) * ((1 - wc) * coarse.at(r0, c0) + wc * coarse.at(r0, c1)) +
                         wr * ((1 - wc) * coarse.at(r1, c0) + wc * coarse.at(r1, c1));
        out.at(r, c) += amp * v;
      }
    }
    amp *= 0.62;
  }
  return out;
}

}  // namespace detail

// Textured synthetic image with structure at all dyadic scales; deterministic
// in (size, seed).
inline RgbImage textured_image(int size, uint64_t seed = 7) {
  RgbImage img;
  img.width = img.height = size;
  img.pixels.assign(static_cast<size_t>(3) * size * size, 0);
  for (int ch = 0; ch < 3; ++ch) {
    const Grid noise = detail::multiscale_noise(size, seed * 1000003 + ch);
    double lo = noise.at(0, 0), hi = lo;
    for (double v : noise.values()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    for (int r = 0; r < size; ++r)
      for (int c = 0; c < size; ++c) {
        const double base = 127.5 + 60.0 * std::sin(2.0 * M_PI * (r + 2.0 * c) /
                                                    (size / (3.0 + ch)));
        const double tex = 180.0 * (noise.at(r, c) - lo) / span - 90.0;
        img.at(r, c, ch) = static_cast<uint8_t>(
            std::clamp(std::lround(0.5 * base + 0.5 * (127.5 + tex)), 0l, 255l));
      }
  }
  return img;
}

}  // namespace hmtc
