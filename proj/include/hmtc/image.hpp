#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmtc/grid.hpp"

namespace hmtc {

enum class Channel : int { R = 0, G = 1, B = 2 };

inline char channel_tag(Channel c) {
  switch (c) {
    case Channel::R: return 'R';
    case Channel::G: return 'G';
    case Channel::B: return 'B';
  }
  throw std::invalid_argument("bad channel");
}

// 8-bit-per-channel RGB raster, row-major, interleaved.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // size = 3 * width * height, order R,G,B

  bool valid() const {
    return width >= 1 && height >= 1 &&
           pixels.size() == static_cast<size_t>(3) * width * height;
  }
  uint8_t at(int row, int col, int ch) const {
    return pixels[(static_cast<size_t>(row) * width + col) * 3 + ch];
  }
  uint8_t& at(int row, int col, int ch) {
    return pixels[(static_cast<size_t>(row) * width + col) * 3 + ch];
  }
};

// One color channel as real intensities in [0, 255].
struct ChannelPlane {
  Grid values;
  Channel channel = Channel::R;

  int width() const { return values.cols(); }
  int height() const { return values.rows(); }
};

struct PatchGrid {
  int patch_size = 0;
  std::vector<std::pair<int, int>> origins;  // (row, col), row-major order
  bool overlap_flag = false;
};

inline std::array<ChannelPlane, 3> split_channels(const RgbImage& img) {
  if (!img.valid()) throw std::invalid_argument("split_channels: invalid image");
  std::array<ChannelPlane, 3> out;
  for (int ch = 0; ch < 3; ++ch) {
    out[ch].channel = static_cast<Channel>(ch);
    out[ch].values = Grid(img.height, img.width);
    for (int r = 0; r < img.height; ++r)
      for (int c = 0; c < img.width; ++c)
        out[ch].values.at(r, c) = static_cast<double>(img.at(r, c, ch));
  }
  return out;
}

inline RgbImage recombine_channels(const std::array<ChannelPlane, 3>& planes) {
  RgbImage img;
  img.height = planes[0].height();
  img.width = planes[0].width();
  img.pixels.resize(static_cast<size_t>(3) * img.width * img.height);
  for (int ch = 0; ch < 3; ++ch) {
    if (planes[ch].height() != img.height || planes[ch].width() != img.width)
      throw std::invalid_argument("recombine_channels: shape mismatch");
    for (int r = 0; r < img.height; ++r)
      for (int c = 0; c < img.width; ++c)
        img.at(r, c, ch) = static_cast<uint8_t>(std::lround(planes[ch].values.at(r, c)));
  }
  return img;
}

// Center-crop so both dimensions are divisible by 2^levels. The extra
// row/column of an odd remainder is dropped from the bottom/right.
inline ChannelPlane crop_to_dyadic(const ChannelPlane& plane, int levels) {
  if (levels < 1 || levels > 30) throw std::invalid_argument("crop_to_dyadic: bad level count");
  const int m = 1 << levels;
  const int h = plane.height(), w = plane.width();
  if (h < m || w < m)
    throw std::invalid_argument("crop_to_dyadic: plane smaller than 2^levels (" +
                                std::to_string(m) + ")");
  const int ch = (h / m) * m;
  const int cw = (w / m) * m;
  const int r0 = (h - ch) / 2;
  const int c0 = (w - cw) / 2;
  ChannelPlane out;
  out.channel = plane.channel;
  out.values = Grid(ch, cw);
  for (int r = 0; r < ch; ++r)
    for (int c = 0; c < cw; ++c)
      out.values.at(r, c) = plane.values.at(r0 + r, c0 + c);
  return out;
}

inline std::pair<int, int> dyadic_crop_offset(int height, int width, int levels) {
  const int m = 1 << levels;
  return {(height - (height / m) * m) / 2, (width - (width / m) * m) / 2};
}

namespace detail {
inline std::vector<int> patch_starts(int dim, int size) {
  std::vector<int> s;
  for (int o = 0; o + size < dim; o += size) s.push_back(o);
  s.push_back(dim - size);  // clamped last origin, may overlap the previous one
  return s;
}
}  // namespace detail

// Stride = patch_size, with the last row/column clamped to the boundary.
inline PatchGrid plan_patches(const ChannelPlane& plane, int patch_size) {
  if (patch_size < 1) throw std::invalid_argument("plan_patches: bad patch size");
  const int h = plane.height(), w = plane.width();
  if (h < patch_size || w < patch_size)
    throw std::invalid_argument("plan_patches: plane smaller than patch size");
  PatchGrid g;
  g.patch_size = patch_size;
  const auto rows = detail::patch_starts(h, patch_size);
  const auto cols = detail::patch_starts(w, patch_size);
  for (int r : rows)
    for (int c : cols) g.origins.emplace_back(r, c);
  g.overlap_flag = (h % patch_size != 0) || (w % patch_size != 0);
  return g;
}

inline ChannelPlane extract_patch(const ChannelPlane& plane, int row0, int col0, int size) {
  if (row0 < 0 || col0 < 0 || row0 + size > plane.height() || col0 + size > plane.width())
    throw std::invalid_argument("extract_patch: out of bounds");
  ChannelPlane out;
  out.channel = plane.channel;
  out.values = Grid(size, size);
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c)
      out.values.at(r, c) = plane.values.at(row0 + r, col0 + c);
  return out;
}

}  // namespace hmtc
