#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmtc/filters.hpp"
#include "hmtc/grid.hpp"
#include "hmtc/image.hpp"

namespace hmtc {

enum class Orientation : int { H = 0, V = 1, D = 2 };

inline char orientation_tag(Orientation o) {
  switch (o) {
    case Orientation::H: return 'H';
    case Orientation::V: return 'V';
    case Orientation::D: return 'D';
  }
  throw std::invalid_argument("bad orientation");
}

constexpr std::array<Orientation, 3> kOrientations = {Orientation::H, Orientation::V,
                                                      Orientation::D};

struct SubbandSet {
  Grid h, v, d;  // detail subbands of one level
  const Grid& operator[](Orientation o) const {
    switch (o) {
      case Orientation::H: return h;
      case Orientation::V: return v;
      case Orientation::D: return d;
    }
    throw std::invalid_argument("bad orientation");
  }
};

// J-level separable 2D DWT output. details[0] is the finest level (level 1).
struct WaveletPyramid {
  int levels = 0;
  std::vector<SubbandSet> details;
  Grid approx;
  std::string wavelet_name;
  int source_rows = 0;
  int source_cols = 0;
};

namespace detail {

// lo[n] = sum_k h0[k] x[(2n + k) mod N], same for hi. Periodic extension.
inline void analyze_periodic(const double* x, int n, const FilterBank& fb, double* lo,
                             double* hi) {
  const auto& h0 = fb.analysis_lowpass;
  const auto& h1 = fb.analysis_highpass;
  const int l0 = static_cast<int>(h0.size());
  const int l1 = static_cast<int>(h1.size());
  const int m = n / 2;
  for (int i = 0; i < m; ++i) {
    double a = 0.0, d = 0.0;
    int idx = 2 * i;
    for (int k = 0; k < l0; ++k) {
      a += h0[k] * x[idx];
      if (++idx == n) idx = 0;
    }
    idx = 2 * i;
    for (int k = 0; k < l1; ++k) {
      d += h1[k] * x[idx];
      if (++idx == n) idx = 0;
    }
    lo[i] = a;
    hi[i] = d;
  }
}

// Adjoint-style synthesis with the time-reversed synthesis filters:
//   x[(2n + k) mod N] += lo[n] f0[L-1-k] + hi[n] f1[L-1-k]
inline void synthesize_periodic(const double* lo, const double* hi, int m,
                                const FilterBank& fb, double* x) {
  const auto& f0 = fb.synthesis_lowpass;
  const auto& f1 = fb.synthesis_highpass;
  const int l0 = static_cast<int>(f0.size());
  const int l1 = static_cast<int>(f1.size());
  const int n = 2 * m;
  for (int i = 0; i < n; ++i) x[i] = 0.0;
  for (int i = 0; i < m; ++i) {
    int idx = 2 * i;
    for (int k = 0; k < l0; ++k) {
      x[idx] += lo[i] * f0[l0 - 1 - k];
      if (++idx == n) idx = 0;
    }
    idx = 2 * i;
    for (int k = 0; k < l1; ++k) {
      x[idx] += hi[i] * f1[l1 - 1 - k];
      if (++idx == n) idx = 0;
    }
  }
}

// One separable analysis level: rows first (horizontal direction), then
// columns. Row-lowpass + column-highpass is the horizontal detail.
inline void analyze2d(const Grid& in, const FilterBank& fb, Grid& ll, SubbandSet& sb) {
  const int rows = in.rows(), cols = in.cols();
  if (rows % 2 || cols % 2) throw std::invalid_argument("analyze2d: odd dims");
  const int hc = cols / 2, hr = rows / 2;
  Grid rl(rows, hc), rh(rows, hc);
  std::vector<double> buf_lo(hc), buf_hi(hc);
  for (int r = 0; r < rows; ++r) {
    analyze_periodic(in.data() + static_cast<size_t>(r) * cols, cols, fb, buf_lo.data(),
                     buf_hi.data());
    for (int c = 0; c < hc; ++c) {
      rl.at(r, c) = buf_lo[c];
      rh.at(r, c) = buf_hi[c];
    }
  }
  ll = Grid(hr, hc);
  sb.h = Grid(hr, hc);
  sb.v = Grid(hr, hc);
  sb.d = Grid(hr, hc);
  std::vector<double> col(rows), clo(hr), chi(hr);
  for (int c = 0; c < hc; ++c) {
    for (int r = 0; r < rows; ++r) col[r] = rl.at(r, c);
    analyze_periodic(col.data(), rows, fb, clo.data(), chi.data());
    for (int r = 0; r < hr; ++r) {
      ll.at(r, c) = clo[r];
      sb.h.at(r, c) = chi[r];
    }
    for (int r = 0; r < rows; ++r) col[r] = rh.at(r, c);
    analyze_periodic(col.data(), rows, fb, clo.data(), chi.data());
    for (int r = 0; r < hr; ++r) {
      sb.v.at(r, c) = clo[r];
      sb.d.at(r, c) = chi[r];
    }
  }
}

inline Grid synthesize2d(const Grid& ll, const SubbandSet& sb, const FilterBank& fb) {
  const int hr = ll.rows(), hc = ll.cols();
  if (!ll.same_shape(sb.h) || !ll.same_shape(sb.v) || !ll.same_shape(sb.d))
    throw std::invalid_argument("synthesize2d: subband shape mismatch");
  const int rows = 2 * hr, cols = 2 * hc;
  Grid rl(rows, hc), rh(rows, hc);
  std::vector<double> clo(hr), chi(hr), col(rows);
  for (int c = 0; c < hc; ++c) {
    for (int r = 0; r < hr; ++r) {
      clo[r] = ll.at(r, c);
      chi[r] = sb.h.at(r, c);
    }
    synthesize_periodic(clo.data(), chi.data(), hr, fb, col.data());
    for (int r = 0; r < rows; ++r) rl.at(r, c) = col[r];
    for (int r = 0; r < hr; ++r) {
      clo[r] = sb.v.at(r, c);
      chi[r] = sb.d.at(r, c);
    }
    synthesize_periodic(clo.data(), chi.data(), hr, fb, col.data());
    for (int r = 0; r < rows; ++r) rh.at(r, c) = col[r];
  }
  Grid out(rows, cols);
  std::vector<double> row(cols);
  std::vector<double> lo(hc), hi(hc);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < hc; ++c) {
      lo[c] = rl.at(r, c);
      hi[c] = rh.at(r, c);
    }
    synthesize_periodic(lo.data(), hi.data(), hc, fb, row.data());
    for (int c = 0; c < cols; ++c) out.at(r, c) = row[c];
  }
  return out;
}

}  // namespace detail

inline WaveletPyramid decompose(const ChannelPlane& plane, const FilterBank& fb, int levels) {
  if (levels < 1) throw std::invalid_argument("decompose: levels must be >= 1");
  const int rows = plane.height(), cols = plane.width();
  const int m = 1 << levels;
  if (rows % m || cols % m)
    throw std::invalid_argument("decompose: dims not divisible by 2^" +
                                std::to_string(levels));
  WaveletPyramid pyr;
  pyr.levels = levels;
  pyr.wavelet_name = fb.name;
  pyr.source_rows = rows;
  pyr.source_cols = cols;
  pyr.details.resize(levels);
  Grid cur = plane.values;
  for (int j = 0; j < levels; ++j) {
    Grid ll;
    detail::analyze2d(cur, fb, ll, pyr.details[j]);
    cur = std::move(ll);
  }
  pyr.approx = std::move(cur);
  return pyr;
}

inline ChannelPlane reconstruct(const WaveletPyramid& pyr, const FilterBank& fb) {
  if (pyr.levels < 1 || static_cast<int>(pyr.details.size()) != pyr.levels)
    throw std::invalid_argument("reconstruct: malformed pyramid");
  Grid cur = pyr.approx;
  for (int j = pyr.levels - 1; j >= 0; --j)
    cur = detail::synthesize2d(cur, pyr.details[j], fb);
  if (cur.rows() != pyr.source_rows || cur.cols() != pyr.source_cols)
    throw std::invalid_argument("reconstruct: dimension mismatch");
  ChannelPlane out;
  out.values = std::move(cur);
  return out;
}

}  // namespace hmtc
