#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hmtc/complexity.hpp"
#include "hmtc/dwt.hpp"
#include "hmtc/forest.hpp"
#include "hmtc/hmt.hpp"
#include "hmtc/image.hpp"
#include "hmtc/image_io.hpp"

namespace hmtc {

inline constexpr const char* kSpecVersion = "1.0";

enum class AnalysisMode { Whole, Patch };

struct RunConfig {
  std::vector<std::string> images;                 // one or two paths
  std::vector<Channel> channels = {Channel::R, Channel::G, Channel::B};
  std::vector<std::string> wavelets =
      {"haar", "db2", "sym3", "coif1", "bior1.3", "rbior1.3", "dmey"};
  int states = 2;
  int levels = 9;
  AnalysisMode mode = AnalysisMode::Whole;
  int patch_size = 512;
  EmConfig em;
  std::string out_dir = "hmtc-out";
  std::vector<std::string> formats = {"json", "csv", "md", "svg"};

  void validate() const {
    if (images.empty() || images.size() > 2)
      throw std::invalid_argument("RunConfig: need one or two images");
    if (channels.empty()) throw std::invalid_argument("RunConfig: no channels");
    if (wavelets.empty()) throw std::invalid_argument("RunConfig: no wavelets");
    if (states < 2 || states > 5) throw std::invalid_argument("RunConfig: states in 2..5");
    if (levels < 1) throw std::invalid_argument("RunConfig: levels >= 1");
    if (mode == AnalysisMode::Patch && patch_size % (1 << levels) != 0)
      throw std::invalid_argument("RunConfig: patch size must be divisible by 2^levels");
  }
};

struct CellDiagnostics {
  int iterations = 0;
  bool converged = false;
  std::vector<int> degenerate_scales;
  bool degenerate_forest = false;
  double final_loglik = 0.0;
};

// One (channel, wavelet, unit) analysis cell of one image.
struct CellResult {
  Channel channel = Channel::R;
  std::string wavelet;
  int unit_index = 0;
  int origin_row = 0, origin_col = 0;
  int unit_rows = 0, unit_cols = 0;
  ComplexitySummary summary;
  std::array<nlohmann::ordered_json, 3> models;   // H, V, D
  std::array<CellDiagnostics, 3> diagnostics;     // H, V, D
  std::string error;                              // nonempty => cell failed
};

struct ImageReport {
  std::string path;
  int width = 0, height = 0;           // as decoded
  int crop_row0 = 0, crop_col0 = 0;    // whole mode: centered dyadic crop
  int unit_count = 1;
  std::vector<CellResult> cells;       // channel-major, then wavelet, then unit
};

struct AnalysisReport {
  RunConfig config;
  std::vector<ImageReport> images;
};

struct ChannelVerdict {
  Channel channel = Channel::R;
  std::string optimal_a, optimal_b;
  double global_a = 0.0, global_b = 0.0;
  int winner = 0;  // 0 = tie, 1 = candidate A, 2 = candidate B
  double margin = 0.0;
  std::string notes;
};

struct Verdict {
  std::vector<ChannelVerdict> channels;
  int overall = 0;
  std::string rule = "channel-majority";
};

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::ordered_json model_to_json(const HmtModel& m, const std::string& wavelet,
                                            uint64_t seed) {
  nlohmann::ordered_json j;
  j["K"] = m.K;
  j["levels"] = m.depth;
  j["orientation"] = std::string(1, orientation_tag(m.orientation));
  j["wavelet"] = wavelet;
  j["seed"] = seed;
  j["variance_floor"] = {{"absolute", kVarFloorAbs}, {"relative", kVarFloorRel}};
  j["root_dist"] = m.root_dist;
  nlohmann::ordered_json trans = nlohmann::ordered_json::array();
  for (int t = 2; t <= m.depth; ++t) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (int i = 0; i < m.K; ++i) {
      std::vector<double> row(m.K);
      for (int k = 0; k < m.K; ++k) row[k] = m.a(t, i, k);
      rows.push_back(row);
    }
    trans.push_back({{"child_time", t}, {"matrix", rows}});
  }
  j["transitions"] = trans;
  nlohmann::ordered_json vars = nlohmann::ordered_json::array();
  for (int t = 1; t <= m.depth; ++t)
    vars.push_back({{"time", t}, {"sigma2", m.var[t - 1]}});
  j["variances"] = vars;
  return j;
}

inline HmtModel model_from_json(const nlohmann::ordered_json& j) {
  HmtModel m;
  m.K = j.at("K").get<int>();
  m.depth = j.at("levels").get<int>();
  const std::string o = j.at("orientation").get<std::string>();
  m.orientation = o == "H" ? Orientation::H : (o == "V" ? Orientation::V : Orientation::D);
  m.root_dist = j.at("root_dist").get<std::vector<double>>();
  m.trans.resize(m.depth - 1);
  for (const auto& e : j.at("transitions")) {
    const int t = e.at("child_time").get<int>();
    auto rows = e.at("matrix").get<std::vector<std::vector<double>>>();
    std::vector<double> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    m.trans[t - 2] = std::move(flat);
  }
  m.var.resize(m.depth);
  for (const auto& e : j.at("variances"))
    m.var[e.at("time").get<int>() - 1] = e.at("sigma2").get<std::vector<double>>();
  m.validate();
  return m;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace detail {

struct CellJob {
  const ChannelPlane* plane = nullptr;
  ChannelPlane patch;  // owns data in patch mode
  Channel channel;
  std::string wavelet;
  int unit_index = 0;
  int origin_row = 0, origin_col = 0;
  int levels = 0;
  int states = 2;
  EmConfig em;
};

inline CellResult run_cell(const CellJob& job) {
  CellResult cell;
  cell.channel = job.channel;
  cell.wavelet = job.wavelet;
  cell.unit_index = job.unit_index;
  cell.origin_row = job.origin_row;
  cell.origin_col = job.origin_col;
  const ChannelPlane& plane = job.patch.values.empty() ? *job.plane : job.patch;
  cell.unit_rows = plane.height();
  cell.unit_cols = plane.width();
  try {
    const FilterBank fb = filter_bank(job.wavelet);
    const WaveletPyramid pyr = decompose(plane, fb, job.levels);
    std::array<Posteriors, 3> posts;
    bool any_degenerate = false;
    for (int o = 0; o < 3; ++o) {
      QuadForest forest = build_forest(pyr, kOrientations[o]);
      auto [model, diag] = em_fit(forest, job.states, job.em);
      cell.models[o] = model_to_json(model, job.wavelet, job.em.seed);
      cell.diagnostics[o].iterations = diag.iterations;
      cell.diagnostics[o].converged = diag.converged;
      cell.diagnostics[o].degenerate_scales = diag.degenerate_scales;
      cell.diagnostics[o].degenerate_forest = diag.degenerate_forest;
      if (diag.degenerate_forest) {
        any_degenerate = true;
        continue;
      }
      posts[o] = upward_downward(forest, model);
      cell.diagnostics[o].final_loglik = posts[o].log_likelihood;
      cell.summary.prior_global +=
          prior_complexity(model, shape_of(forest)) / 3.0;
    }
    if (any_degenerate) {
      // Zero-complexity convention for degenerate units.
      cell.summary = ComplexitySummary{};
      cell.summary.K = job.states;
      cell.summary.degenerate = true;
      cell.summary.per_scale_curve.assign(job.levels, 0.0);
    } else {
      const double prior = cell.summary.prior_global;
      cell.summary = summarize(posts[0], posts[1], posts[2]);
      cell.summary.prior_global = prior;
    }
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  return cell;
}

}  // namespace detail

inline AnalysisReport run_analysis(const RunConfig& cfg) {
  cfg.validate();
  AnalysisReport report;
  report.config = cfg;
  for (const auto& path : cfg.images) {
    ImageReport ir;
    ir.path = path;
    const RgbImage img = load_image(path);
    ir.width = img.width;
    ir.height = img.height;
    const auto planes = split_channels(img);

    // Units: the whole (dyadically cropped) plane, or the overlapping patches.
    std::vector<std::pair<int, int>> origins;
    std::array<ChannelPlane, 3> cropped;
    if (cfg.mode == AnalysisMode::Whole) {
      for (int ch = 0; ch < 3; ++ch) cropped[ch] = crop_to_dyadic(planes[ch], cfg.levels);
      auto [r0, c0] = dyadic_crop_offset(img.height, img.width, cfg.levels);
      ir.crop_row0 = r0;
      ir.crop_col0 = c0;
      origins.emplace_back(r0, c0);
    } else {
      const PatchGrid pg = plan_patches(planes[0], cfg.patch_size);
      origins = pg.origins;
    }
    ir.unit_count = static_cast<int>(origins.size());

    std::vector<detail::CellJob> jobs;
    for (Channel ch : cfg.channels) {
      const int ci = static_cast<int>(ch);
      for (const auto& wavelet : cfg.wavelets) {
        for (size_t u = 0; u < origins.size(); ++u) {
          detail::CellJob job;
          job.channel = ch;
          job.wavelet = wavelet;
          job.unit_index = static_cast<int>(u);
          job.origin_row = origins[u].first;
          job.origin_col = origins[u].second;
          job.levels = cfg.levels;
          job.states = cfg.states;
          job.em = cfg.em;
          if (cfg.mode == AnalysisMode::Whole)
            job.plane = &cropped[ci];
          else
            job.patch = extract_patch(planes[ci], origins[u].first, origins[u].second,
                                      cfg.patch_size);
          jobs.push_back(std::move(job));
        }
      }
    }

    // Parallel fan-out over independent cells; results land in job order, so
    // the assembled report is identical regardless of thread scheduling.
    ir.cells.resize(jobs.size());
    const unsigned workers =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(jobs.size()));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        for (size_t i = w; i < jobs.size(); i += workers)
          ir.cells[i] = detail::run_cell(jobs[i]);
      });
    }
    for (auto& th : pool) th.join();
    report.images.push_back(std::move(ir));
  }
  bool any_ok = false;
  for (const auto& ir : report.images)
    for (const auto& c : ir.cells)
      if (c.error.empty()) any_ok = true;
  if (!any_ok) throw std::runtime_error("run_analysis: every cell failed");
  return report;
}

// ---------------------------------------------------------------------------
// Report JSON

inline nlohmann::ordered_json report_to_json(const AnalysisReport& rep) {
  nlohmann::ordered_json j;
  j["spec_version"] = kSpecVersion;
  j["conventions"] = {
      {"boundary_rule", "periodic"},
      {"orientation", "row-lowpass+column-highpass=horizontal"},
      {"entropy", "posterior joint entropy per node, bits"},
      {"crop", "centered, remainder dropped bottom/right"},
  };
  {
    const auto& c = rep.config;
    nlohmann::ordered_json cfg;
    cfg["images"] = c.images;
    std::string chs;
    for (Channel ch : c.channels) chs += channel_tag(ch);
    cfg["channels"] = chs;
    cfg["wavelets"] = c.wavelets;
    cfg["states"] = c.states;
    cfg["levels"] = c.levels;
    cfg["mode"] = c.mode == AnalysisMode::Whole ? "whole" : "patch";
    cfg["patch_size"] = c.patch_size;
    cfg["em"] = {{"max_iter", c.em.max_iter}, {"rel_tol", c.em.rel_tol}, {"seed", c.em.seed}};
    j["config"] = cfg;
  }
  nlohmann::ordered_json images = nlohmann::ordered_json::array();
  for (const auto& ir : rep.images) {
    nlohmann::ordered_json ji;
    ji["path"] = ir.path;
    ji["width"] = ir.width;
    ji["height"] = ir.height;
    ji["crop_origin"] = {ir.crop_row0, ir.crop_col0};
    ji["unit_count"] = ir.unit_count;
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const auto& c : ir.cells) {
      nlohmann::ordered_json jc;
      jc["channel"] = std::string(1, channel_tag(c.channel));
      jc["wavelet"] = c.wavelet;
      jc["unit"] = c.unit_index;
      jc["origin"] = {c.origin_row, c.origin_col};
      jc["dims"] = {c.unit_rows, c.unit_cols};
      if (!c.error.empty()) {
        jc["error"] = c.error;
      } else {
        const auto& s = c.summary;
        jc["complexity"] = {{"horizontal", s.horizontal}, {"vertical", s.vertical},
                            {"diagonal", s.diagonal},     {"global", s.global},
                            {"prior_global", s.prior_global}};
        jc["per_scale_curve"] = s.per_scale_curve;
        jc["self_org_span"] = s.self_org_span;
        jc["degenerate"] = s.degenerate;
        nlohmann::ordered_json diags = nlohmann::ordered_json::array();
        for (int o = 0; o < 3; ++o) {
          const auto& d = c.diagnostics[o];
          diags.push_back({{"orientation", std::string(1, orientation_tag(kOrientations[o]))},
                           {"iterations", d.iterations},
                           {"converged", d.converged},
                           {"degenerate_scales", d.degenerate_scales},
                           {"degenerate_forest", d.degenerate_forest},
                           {"final_loglik", d.final_loglik}});
        }
        jc["diagnostics"] = diags;
        jc["models"] = {c.models[0], c.models[1], c.models[2]};
      }
      cells.push_back(std::move(jc));
    }
    ji["cells"] = std::move(cells);
    images.push_back(std::move(ji));
  }
  j["images"] = std::move(images);
  return j;
}

// ---------------------------------------------------------------------------
// Verdict

namespace detail {

// Mean global complexity per wavelet across units (one unit in whole mode).
inline std::map<std::string, double> channel_globals(const ImageReport& ir, Channel ch) {
  std::map<std::string, double> sum;
  std::map<std::string, int> cnt;
  for (const auto& c : ir.cells) {
    if (c.channel != ch || !c.error.empty()) continue;
    sum[c.wavelet] += c.summary.global;
    cnt[c.wavelet] += 1;
  }
  std::map<std::string, double> out;
  for (auto& [w, s] : sum) out[w] = s / cnt[w];
  return out;
}

inline std::string orientation_consistency_note(const ImageReport& ir, Channel ch) {
  // Whether one wavelet is optimal for all orientations and the global.
  std::map<std::string, std::array<double, 4>> vals;  // g, d, h, v
  for (const auto& c : ir.cells) {
    if (c.channel != ch || !c.error.empty() || c.unit_index != 0) continue;
    vals[c.wavelet] = {c.summary.global, c.summary.diagonal, c.summary.horizontal,
                       c.summary.vertical};
  }
  if (vals.empty()) return "no data";
  std::array<std::string, 4> best;
  std::array<double, 4> bv;
  for (int i = 0; i < 4; ++i) {
    best[i].clear();
    for (std::string_view name : wavelet_menu()) {
      auto it = vals.find(std::string(name));
      if (it == vals.end()) continue;
      if (best[i].empty() || it->second[i] > bv[i]) {
        best[i] = it->first;
        bv[i] = it->second[i];
      }
    }
  }
  const bool same = best[0] == best[1] && best[0] == best[2] && best[0] == best[3];
  return same ? "optimal wavelet consistent across orientations (" + best[0] + ")"
              : "optimal wavelet varies by orientation (global " + best[0] + ", diagonal " +
                    best[1] + ", horizontal " + best[2] + ", vertical " + best[3] + ")";
}

}  // namespace detail

inline Verdict compare(const AnalysisReport& a, const AnalysisReport& b) {
  if (a.images.size() != 1 || b.images.size() != 1)
    throw std::invalid_argument("compare: each report must cover one image");
  const auto& ca = a.config;
  const auto& cb = b.config;
  if (ca.channels != cb.channels || ca.wavelets != cb.wavelets || ca.states != cb.states ||
      ca.levels != cb.levels || ca.mode != cb.mode)
    throw std::invalid_argument("compare: reports have different config shapes");
  Verdict v;
  int wins_a = 0, wins_b = 0;
  for (Channel ch : ca.channels) {
    ChannelVerdict cv;
    cv.channel = ch;
    const auto ga = detail::channel_globals(a.images[0], ch);
    const auto gb = detail::channel_globals(b.images[0], ch);
    if (ga.empty() || gb.empty())
      throw std::invalid_argument("compare: channel without successful cells");
    cv.optimal_a = select_optimal_wavelet(ga);
    cv.optimal_b = select_optimal_wavelet(gb);
    cv.global_a = ga.at(cv.optimal_a);
    cv.global_b = gb.at(cv.optimal_b);
    cv.margin = std::abs(cv.global_a - cv.global_b);
    if (cv.global_a > cv.global_b)
      cv.winner = 1;
    else if (cv.global_b > cv.global_a)
      cv.winner = 2;
    cv.notes = "A: " + detail::orientation_consistency_note(a.images[0], ch) +
               "; B: " + detail::orientation_consistency_note(b.images[0], ch);
    if (cv.winner == 1) ++wins_a;
    if (cv.winner == 2) ++wins_b;
    v.channels.push_back(std::move(cv));
  }
  v.overall = wins_a > wins_b ? 1 : (wins_b > wins_a ? 2 : 0);
  return v;
}

inline nlohmann::ordered_json verdict_to_json(const Verdict& v) {
  nlohmann::ordered_json j;
  j["spec_version"] = kSpecVersion;
  j["rule"] = v.rule;
  j["note"] = "reports complexity ordering only; makes no authorship claim";
  nlohmann::ordered_json chans = nlohmann::ordered_json::array();
  for (const auto& c : v.channels) {
    chans.push_back({{"channel", std::string(1, channel_tag(c.channel))},
                     {"optimal_a", c.optimal_a},
                     {"optimal_b", c.optimal_b},
                     {"global_a", c.global_a},
                     {"global_b", c.global_b},
                     {"winner", c.winner == 0 ? "tie" : (c.winner == 1 ? "A" : "B")},
                     {"margin", c.margin},
                     {"notes", c.notes}});
  }
  j["channels"] = std::move(chans);
  j["overall"] = v.overall == 0 ? "tie" : (v.overall == 1 ? "A" : "B");
  return j;
}

// ---------------------------------------------------------------------------
// Table and curve rendering

namespace detail {

inline std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

struct TableRow {
  std::string label;
  std::vector<double> values;  // one per wavelet, menu order
};

inline std::vector<TableRow> unit_rows(const ImageReport& ir, Channel ch, int unit,
                                       const std::vector<std::string>& wavelets) {
  std::vector<TableRow> rows = {{"global", {}}, {"diagonal", {}}, {"horizontal", {}},
                                {"vertical", {}}};
  for (const auto& w : wavelets) {
    const CellResult* cell = nullptr;
    for (const auto& c : ir.cells)
      if (c.channel == ch && c.unit_index == unit && c.wavelet == w && c.error.empty())
        cell = &c;
    const double g = cell ? cell->summary.global : std::nan("");
    rows[0].values.push_back(g);
    rows[1].values.push_back(cell ? cell->summary.diagonal : std::nan(""));
    rows[2].values.push_back(cell ? cell->summary.horizontal : std::nan(""));
    rows[3].values.push_back(cell ? cell->summary.vertical : std::nan(""));
  }
  return rows;
}

// Strict > with first-wins tie-break; NaN entries never win.
inline size_t row_argmax(const std::vector<double>& v) {
  size_t best = 0;
  double bv = v.empty() ? std::nan("") : v[0];
  for (size_t i = 1; i < v.size(); ++i)
    if (std::isnan(bv) || v[i] > bv) {
      best = i;
      bv = v[i];
    }
  return best;
}

}  // namespace detail

// One table per (image, channel, unit); rows are the complexity kinds,
// columns the wavelets in menu order, optimal cell bolded (md) / starred (csv).
inline std::string render_table(const AnalysisReport& rep, const std::string& format) {
  if (format != "md" && format != "csv")
    throw std::invalid_argument("render_table: format must be md or csv");
  if (rep.images.empty()) throw std::invalid_argument("render_table: empty report");
  std::ostringstream out;
  const auto& wavelets = rep.config.wavelets;
  for (const auto& ir : rep.images) {
    if (ir.cells.empty()) throw std::invalid_argument("render_table: empty report");
    for (Channel ch : rep.config.channels) {
      for (int u = 0; u < ir.unit_count; ++u) {
        const auto rows = detail::unit_rows(ir, ch, u, wavelets);
        const std::string title = ir.path + " channel " + channel_tag(ch) + " unit " +
                                  std::to_string(u);
        if (format == "md") {
          out << "### " << title << "\n\n| complexity |";
          for (const auto& w : wavelets) out << " " << w << " |";
          out << "\n|---|";
          for (size_t i = 0; i < wavelets.size(); ++i) out << "---|";
          out << "\n";
          for (const auto& row : rows) {
            const size_t best = detail::row_argmax(row.values);
            out << "| " << row.label << " |";
            for (size_t i = 0; i < row.values.size(); ++i) {
              const std::string s =
                  std::isnan(row.values[i]) ? "n/a" : detail::fmt4(row.values[i]);
              out << " " << (i == best && !std::isnan(row.values[i]) ? "**" + s + "**" : s)
                  << " |";
            }
            out << "\n";
          }
          out << "\n";
        } else {
          out << "# " << title << "\ncomplexity";
          for (const auto& w : wavelets) out << "," << w;
          out << "\n";
          for (const auto& row : rows) {
            const size_t best = detail::row_argmax(row.values);
            out << row.label;
            for (size_t i = 0; i < row.values.size(); ++i) {
              const std::string s =
                  std::isnan(row.values[i]) ? "n/a" : detail::fmt4(row.values[i]);
              out << "," << s << (i == best && !std::isnan(row.values[i]) ? "*" : "");
            }
            out << "\n";
          }
        }
      }
    }
  }
  return out.str();
}

namespace detail {

inline const std::array<const char*, 7>& curve_colors() {
  static const std::array<const char*, 7> c = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3",
                                               "#ff7f00", "#a65628", "#17becf"};
  return c;
}

inline std::string render_curve_svg(const std::vector<std::string>& wavelets,
                                    const std::vector<std::vector<double>>& curves,
                                    const std::string& title) {
  const int W = 720, H = 480, ml = 60, mr = 150, mt = 40, mb = 50;
  double ymax = 1e-12;
  size_t J = 0;
  for (const auto& c : curves) {
    J = std::max(J, c.size());
    for (double v : c) ymax = std::max(ymax, v);
  }
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\">\n<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
    << "<text x=\"" << ml << "\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
  const int pw = W - ml - mr, ph = H - mt - mb;
  s << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
    << mt + ph << "\" stroke=\"black\"/>\n<line x1=\"" << ml << "\" y1=\"" << mt
    << "\" x2=\"" << ml << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << ml + pw / 2 << "\" y=\"" << H - 12
    << "\" font-size=\"12\" text-anchor=\"middle\">internal time t</text>\n";
  s << "<text x=\"16\" y=\"" << mt + ph / 2
    << "\" font-size=\"12\" transform=\"rotate(-90 16 " << mt + ph / 2
    << ")\" text-anchor=\"middle\">mean local complexity (bits)</text>\n";
  for (size_t w = 0; w < wavelets.size(); ++w) {
    const auto& c = curves[w];
    if (c.empty()) continue;
    s << "<polyline fill=\"none\" stroke=\"" << curve_colors()[w % 7]
      << "\" stroke-width=\"1.5\" points=\"";
    for (size_t t = 0; t < c.size(); ++t) {
      const double x = ml + (J > 1 ? pw * static_cast<double>(t) / (J - 1) : 0.0);
      const double y = mt + ph - ph * (c[t] / ymax);
      s << fmt4(x) << "," << fmt4(y) << " ";
    }
    s << "\"/>\n";
    const int ly = mt + 16 + static_cast<int>(w) * 18;
    s << "<line x1=\"" << ml + pw + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << ml + pw + 34
      << "\" y2=\"" << ly - 4 << "\" stroke=\"" << curve_colors()[w % 7]
      << "\" stroke-width=\"2\"/>\n<text x=\"" << ml + pw + 40 << "\" y=\"" << ly
      << "\" font-size=\"12\">" << wavelets[w] << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace detail

// Per (image, channel, unit): a CSV of per-scale curves (one column per
// wavelet) and an SVG chart. Returns filename -> content.
inline std::map<std::string, std::string> render_curves(const AnalysisReport& rep) {
  if (rep.images.empty()) throw std::invalid_argument("render_curves: empty report");
  std::map<std::string, std::string> files;
  const auto& wavelets = rep.config.wavelets;
  for (size_t im = 0; im < rep.images.size(); ++im) {
    const auto& ir = rep.images[im];
    for (Channel ch : rep.config.channels) {
      for (int u = 0; u < ir.unit_count; ++u) {
        std::vector<std::vector<double>> curves(wavelets.size());
        size_t J = 0;
        for (size_t w = 0; w < wavelets.size(); ++w) {
          for (const auto& c : ir.cells)
            if (c.channel == ch && c.unit_index == u && c.wavelet == wavelets[w] &&
                c.error.empty())
              curves[w] = c.summary.per_scale_curve;
          J = std::max(J, curves[w].size());
        }
        std::ostringstream csv;
        csv << "t";
        for (const auto& w : wavelets) csv << "," << w;
        csv << "\n";
        for (size_t t = 0; t < J; ++t) {
          csv << (t + 1);
          for (size_t w = 0; w < wavelets.size(); ++w)
            csv << "," << (t < curves[w].size() ? detail::fmt4(curves[w][t]) : "n/a");
          csv << "\n";
        }
        const std::string stem = "curves_img" + std::to_string(im) + "_" +
                                 channel_tag(ch) + "_u" + std::to_string(u);
        files[stem + ".csv"] = csv.str();
        files[stem + ".svg"] = detail::render_curve_svg(
            wavelets, curves,
            ir.path + " channel " + channel_tag(ch) + " unit " + std::to_string(u));
      }
    }
  }
  return files;
}

// ---------------------------------------------------------------------------
// Output and manifest plumbing

inline void write_report_files(const AnalysisReport& rep, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto& formats = rep.config.formats;
  auto wants = [&](const char* f) {
    return std::find(formats.begin(), formats.end(), f) != formats.end();
  };
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    out << content;
  };
  if (wants("json")) write("report.json", report_to_json(rep).dump(2) + "\n");
  if (wants("md")) write("tables.md", render_table(rep, "md"));
  if (wants("csv")) write("tables.csv", render_table(rep, "csv"));
  if (wants("csv") || wants("svg")) {
    for (const auto& [name, content] : render_curves(rep)) {
      const bool is_svg = name.size() > 4 && name.substr(name.size() - 4) == ".svg";
      if ((is_svg && wants("svg")) || (!is_svg && wants("csv"))) write(name, content);
    }
  }
}

struct ManifestEntry {
  std::string id;
  std::string path;
  std::string role;  // candidate-A | candidate-B
};

inline std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_manifest: cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  std::vector<ManifestEntry> out;
  for (const auto& e : j.at("images"))
    out.push_back({e.at("id").get<std::string>(), e.at("path").get<std::string>(),
                   e.at("role").get<std::string>()});
  return out;
}

// Debug dump of a pyramid: flat little-endian float64 grids plus JSON index.
inline void dump_pyramid(const WaveletPyramid& pyr, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::ordered_json index;
  index["wavelet"] = pyr.wavelet_name;
  index["levels"] = pyr.levels;
  index["source_dims"] = {pyr.source_rows, pyr.source_cols};
  nlohmann::ordered_json grids = nlohmann::ordered_json::array();
  auto write_grid = [&](const Grid& g, const std::string& name, int level,
                        const std::string& kind) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    out.write(reinterpret_cast<const char*>(g.data()),
              static_cast<std::streamsize>(g.size() * sizeof(double)));
    grids.push_back({{"file", name}, {"level", level}, {"kind", kind},
                     {"rows", g.rows()}, {"cols", g.cols()}});
  };
  for (int level = 1; level <= pyr.levels; ++level) {
    const auto& sb = pyr.details[level - 1];
    write_grid(sb.h, "L" + std::to_string(level) + "_H.f64", level, "H");
    write_grid(sb.v, "L" + std::to_string(level) + "_V.f64", level, "V");
    write_grid(sb.d, "L" + std::to_string(level) + "_D.f64", level, "D");
  }
  write_grid(pyr.approx, "approx.f64", pyr.levels, "A");
  index["grids"] = std::move(grids);
  std::ofstream out(fs::path(dir) / "index.json");
  out << index.dump(2) << "\n";
}

}  // namespace hmtc
