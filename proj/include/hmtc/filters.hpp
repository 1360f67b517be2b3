#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hmtc {

// Two-channel analysis/synthesis bank. Analysis is correlation-style:
//   lo[n] = sum_k analysis_lowpass[k] * x[(2n + k) mod N]
// Synthesis applies the time-reversed synthesis filters (the adjoint of the
// analysis pass), so for orthogonal banks synthesis == reversed analysis.
struct FilterBank {
  std::string name;
  std::vector<double> analysis_lowpass;
  std::vector<double> analysis_highpass;
  std::vector<double> synthesis_lowpass;
  std::vector<double> synthesis_highpass;
  bool orthogonal = false;

  // Round-trip tolerance under periodic extension.
  double tolerance() const { return orthogonal ? 1e-8 : 1e-6; }
};

inline const std::array<std::string_view, 7>& wavelet_menu() {
  static const std::array<std::string_view, 7> menu = {
      "haar", "db2", "sym3", "coif1", "bior1.3", "rbior1.3", "dmey"};
  return menu;
}

namespace detail {

inline std::vector<double> reversed(std::vector<double> v) {
  std::reverse(v.begin(), v.end());
  return v;
}

// g[k] = (-1)^k h[L-1-k]
inline std::vector<double> qmf(const std::vector<double>& h) {
  const size_t L = h.size();
  std::vector<double> g(L);
  for (size_t k = 0; k < L; ++k) g[k] = ((k % 2) ? -1.0 : 1.0) * h[L - 1 - k];
  return g;
}

inline FilterBank orthogonal_bank(std::string name, std::vector<double> lo) {
  FilterBank fb;
  fb.name = std::move(name);
  fb.analysis_lowpass = lo;
  fb.analysis_highpass = qmf(lo);
  fb.synthesis_lowpass = reversed(fb.analysis_lowpass);
  fb.synthesis_highpass = reversed(fb.analysis_highpass);
  fb.orthogonal = true;
  return fb;
}

// Coefficient tables. Orthogonal families satisfy sum h = sqrt(2),
// sum h^2 = 1 and shift-by-2 orthogonality to machine precision.
inline const std::vector<double>& haar_lo() {
  static const std::vector<double> v = {7.07106781186547573e-01, 7.07106781186547573e-01};
  return v;
}

inline const std::vector<double>& db2_lo() {
  static const std::vector<double> v = {
      4.82962913144534160e-01, 8.36516303737807800e-01,
      2.24143868042013420e-01, -1.29409522551260400e-01};
  return v;
}

// sym3 coincides with db3 (least-asymmetric selection is nontrivial only
// from order 4 upward).
inline const std::vector<double>& sym3_lo() {
  static const std::vector<double> v = {
      3.32670552950082850e-01, 8.06891509311093200e-01,  4.59877502118491540e-01,
      -1.35011020010255060e-01, -8.54412738820266880e-02, 3.52262918857095500e-02};
  return v;
}

inline const std::vector<double>& coif1_lo() {
  static const std::vector<double> v = {
      -1.56557281357919895e-02, -7.27326195125264641e-02, 3.84864846864857779e-01,
      8.52572020211600390e-01,  3.37897662457481818e-01,  -7.27326195125264641e-02};
  return v;
}

// 62-tap FIR approximation of the discrete Meyer scaling filter, obtained by
// frequency sampling of the Meyer conjugate mirror filter and projection onto
// the exact orthonormality constraints.
inline const std::vector<double>& dmey_lo() {
  static const std::vector<double> v = {
      -1.52226986840093541e-06, -1.21648098135085424e-06, -1.49913210741609125e-06,
      1.70850352093858756e-06, 9.83225665446983432e-06, 1.47463961512130170e-05,
      -2.10168354154571525e-05, -3.25962769154458529e-05, 3.37911397484195105e-05,
      6.73591187966580339e-05, -1.39117841326981779e-05, -2.09499178094721629e-05,
      -7.70758375256264236e-05, -2.47279267966437331e-04, 3.00077003515301108e-04,
      9.87518764128075431e-04, -9.68296653341318872e-04, -2.70084805091380491e-03,
      2.56592325786053448e-03, 5.87288335581678290e-03, -6.41426606559343526e-03,
      -1.09180505924740181e-02, 1.48890555863722199e-02, 1.74922784652432120e-02,
      -3.22545870595488254e-02, -2.43175012488942403e-02, 6.37181787491001711e-02,
      3.05963942380100551e-02, -1.32664076582504842e-01, -3.50653744330918574e-02,
      4.44108862832746976e-01, 7.43735050456356239e-01, 4.44113081497498341e-01,
      -3.50658259607813036e-02, -1.32690507081262066e-01, 3.05925123355643216e-02,
      6.36711953186288593e-02, -2.43260608816918134e-02, -3.20235636454369380e-02,
      1.74867900601482981e-02, 1.53632973858032398e-02, -1.09166152457696643e-02,
      -6.37892088791475707e-03, 5.86355040143685460e-03, 2.24021634513561991e-03,
      -2.71698873444616018e-03, -5.38641488085486600e-04, 9.48837647021536943e-04,
      1.96449176208576771e-04, -2.60742642274160023e-04, -6.08432286105321297e-05,
      -4.39772114168715474e-05, 1.59863910079290680e-04, 4.95539717882377282e-05,
      -2.11001818568925609e-04, 8.80055871411621006e-05, 3.53525880315762954e-05,
      -5.04381719280570104e-05, 2.82761114962249910e-05, -1.46295220068376528e-05,
      -6.94160241549092731e-06, 8.68652478543034121e-06};
  return v;
}

inline FilterBank bior13_bank() {
  const double s = std::sqrt(2.0);
  const double c = s / 2.0;
  FilterBank fb;
  fb.name = "bior1.3";
  fb.analysis_lowpass = {-s / 16, s / 16, s / 2, s / 2, s / 16, -s / 16};
  fb.analysis_highpass = {0.0, 0.0, c, -c, 0.0, 0.0};
  fb.synthesis_lowpass = {0.0, 0.0, c, c, 0.0, 0.0};
  fb.synthesis_highpass = {s / 16, s / 16, -s / 2, s / 2, -s / 16, -s / 16};
  fb.orthogonal = false;
  return fb;
}

// bior1.3 with analysis and synthesis roles swapped.
inline FilterBank rbior13_bank() {
  const double s = std::sqrt(2.0);
  const double c = s / 2.0;
  FilterBank fb;
  fb.name = "rbior1.3";
  fb.analysis_lowpass = {0.0, 0.0, c, c, 0.0, 0.0};
  fb.analysis_highpass = {-s / 16, -s / 16, s / 2, -s / 2, s / 16, s / 16};
  fb.synthesis_lowpass = {-s / 16, s / 16, s / 2, s / 2, s / 16, -s / 16};
  fb.synthesis_highpass = {0.0, 0.0, -c, c, 0.0, 0.0};
  fb.orthogonal = false;
  return fb;
}

}  // namespace detail

inline FilterBank filter_bank(std::string_view name) {
  using namespace detail;
  if (name == "haar") return orthogonal_bank("haar", haar_lo());
  if (name == "db2") return orthogonal_bank("db2", db2_lo());
  if (name == "sym3") return orthogonal_bank("sym3", sym3_lo());
  if (name == "coif1") return orthogonal_bank("coif1", coif1_lo());
  if (name == "dmey") return orthogonal_bank("dmey", dmey_lo());
  if (name == "bior1.3") return bior13_bank();
  if (name == "rbior1.3" || name == "rbio1.3") return rbior13_bank();
  throw std::invalid_argument("filter_bank: unknown wavelet '" + std::string(name) + "'");
}

}  // namespace hmtc
