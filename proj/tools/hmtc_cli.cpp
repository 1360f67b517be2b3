// Command-line front end: analyze one image, compare two candidates, or run
// the small-tree oracle selftest.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hmtc/fixture.hpp"
#include "hmtc/image_io.hpp"
#include "hmtc/report.hpp"
#include "hmtc/selftest.hpp"

namespace {

struct CommonFlags {
  std::string channels = "rgb";
  std::string wavelets = "all";
  int states = 2;
  int levels = 9;
  std::string mode = "whole";
  int patch_size = 512;
  uint64_t seed = 0;
  int max_iter = 200;
  double rel_tol = 1e-6;
  std::string out_dir = "hmtc-out";
  std::string formats = "json,csv,md,svg";
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--channels", f.channels, "Subset of rgb (e.g. rgb, r, gb)");
  cmd->add_option("--wavelets", f.wavelets, "all or comma list (haar,db2,...)");
  cmd->add_option("--states", f.states, "Hidden state count (2-5)");
  cmd->add_option("--levels", f.levels, "Decomposition levels");
  cmd->add_option("--mode", f.mode, "whole | patch");
  cmd->add_option("--patch-size", f.patch_size, "Patch edge in pixels");
  cmd->add_option("--seed", f.seed, "Deterministic run seed");
  cmd->add_option("--max-iter", f.max_iter, "EM iteration cap");
  cmd->add_option("--rel-tol", f.rel_tol, "EM relative log-likelihood tolerance");
  cmd->add_option("--out", f.out_dir, "Output directory");
  cmd->add_option("--format", f.formats, "Comma subset of json,csv,md,svg");
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

hmtc::RunConfig to_config(const CommonFlags& f, std::vector<std::string> images) {
  hmtc::RunConfig cfg;
  cfg.images = std::move(images);
  cfg.channels.clear();
  for (char c : f.channels) {
    switch (c) {
      case 'r': case 'R': cfg.channels.push_back(hmtc::Channel::R); break;
      case 'g': case 'G': cfg.channels.push_back(hmtc::Channel::G); break;
      case 'b': case 'B': cfg.channels.push_back(hmtc::Channel::B); break;
      default: throw CLI::ValidationError("--channels", "expects a subset of rgb");
    }
  }
  if (f.wavelets != "all") cfg.wavelets = split_csv(f.wavelets);
  for (const auto& w : cfg.wavelets) hmtc::filter_bank(w);  // validate names early
  cfg.states = f.states;
  cfg.levels = f.levels;
  if (f.mode == "whole")
    cfg.mode = hmtc::AnalysisMode::Whole;
  else if (f.mode == "patch")
    cfg.mode = hmtc::AnalysisMode::Patch;
  else
    throw CLI::ValidationError("--mode", "expects whole or patch");
  cfg.patch_size = f.patch_size;
  cfg.em.seed = f.seed;
  cfg.em.max_iter = f.max_iter;
  cfg.em.rel_tol = f.rel_tol;
  cfg.out_dir = f.out_dir;
  cfg.formats = split_csv(f.formats);
  return cfg;
}

int report_cell_errors(const hmtc::AnalysisReport& rep) {
  int failures = 0;
  for (const auto& ir : rep.images)
    for (const auto& c : ir.cells)
      if (!c.error.empty()) {
        ++failures;
        std::cerr << "cell error: " << ir.path << " " << hmtc::channel_tag(c.channel)
                  << "/" << c.wavelet << "/u" << c.unit_index << ": " << c.error << "\n";
      }
  return failures;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wavelet hidden-Markov-tree complexity analysis of images"};
  app.require_subcommand(1);

  CommonFlags fa, fc;
  std::string image_a, image_b, manifest, fixture_path, dump_dir;
  int fixture_size = 512;
  std::string fixture_kind = "textured";

  CLI::App* analyze = app.add_subcommand("analyze", "Analyze one image");
  analyze->add_option("image", image_a, "Input image (PNG/JPEG/TIFF)")->required();
  add_common(analyze, fa);
  analyze->add_option("--dump-pyramids", dump_dir,
                      "Also dump wavelet pyramids (debug) under this directory");

  CLI::App* cmp = app.add_subcommand("compare", "Compare two candidate images");
  cmp->add_option("imageA", image_a, "Candidate A");
  cmp->add_option("imageB", image_b, "Candidate B");
  cmp->add_option("--manifest", manifest,
                  "JSON manifest with candidate-A/candidate-B roles");
  add_common(cmp, fc);

  CLI::App* oracle = app.add_subcommand("oracle-selftest",
                                        "Run the small-tree brute-force suite");

  CLI::App* mkfix = app.add_subcommand("make-fixture", "Write a synthetic test image");
  mkfix->add_option("path", fixture_path, "Output PNG path")->required();
  mkfix->add_option("--size", fixture_size, "Edge length in pixels");
  mkfix->add_option("--kind", fixture_kind, "textured | checker");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*oracle) {
      const auto res = hmtc::selftest::oracle_suite();
      std::cout << "oracle selftest:\n" << res.log;
      std::cout << (res.ok ? "PASS" : "FAIL") << "\n";
      return res.ok ? 0 : 1;
    }
    if (*mkfix) {
      const hmtc::RgbImage img = fixture_kind == "checker"
                                     ? hmtc::checkerboard_image(fixture_size)
                                     : hmtc::textured_image(fixture_size);
      hmtc::save_png(img, fixture_path);
      std::cout << "wrote " << fixture_path << " (" << fixture_size << "x"
                << fixture_size << ", " << fixture_kind << ")\n";
      return 0;
    }
    if (*analyze) {
      const hmtc::RunConfig cfg = to_config(fa, {image_a});
      if (!dump_dir.empty()) {
        const hmtc::RgbImage img = hmtc::load_image(image_a);
        const auto planes = hmtc::split_channels(img);
        for (const auto& w : cfg.wavelets) {
          const auto plane = hmtc::crop_to_dyadic(planes[0], cfg.levels);
          hmtc::dump_pyramid(hmtc::decompose(plane, hmtc::filter_bank(w), cfg.levels),
                             dump_dir + "/" + w);
        }
      }
      const auto rep = hmtc::run_analysis(cfg);
      hmtc::write_report_files(rep, cfg.out_dir);
      std::cout << "report written to " << cfg.out_dir << "\n";
      return report_cell_errors(rep) == 0 ? 0 : 2;
    }
    if (*cmp) {
      if (!manifest.empty()) {
        for (const auto& e : hmtc::load_manifest(manifest)) {
          if (e.role == "candidate-A") image_a = e.path;
          if (e.role == "candidate-B") image_b = e.path;
        }
      }
      if (image_a.empty() || image_b.empty())
        throw std::runtime_error("compare: need two images (args or --manifest)");
      hmtc::RunConfig ca = to_config(fc, {image_a});
      hmtc::RunConfig cb = to_config(fc, {image_b});
      const auto ra = hmtc::run_analysis(ca);
      const auto rb = hmtc::run_analysis(cb);
      const hmtc::Verdict v = hmtc::compare(ra, rb);
      namespace fs = std::filesystem;
      fs::create_directories(ca.out_dir);
      hmtc::write_report_files(ra, ca.out_dir + "/candidate-A");
      hmtc::write_report_files(rb, ca.out_dir + "/candidate-B");
      const auto vj = hmtc::verdict_to_json(v);
      {
        std::ofstream out(fs::path(ca.out_dir) / "verdict.json", std::ios::binary);
        out << vj.dump(2) << "\n";
      }
      std::cout << vj.dump(2) << "\n";
      return (report_cell_errors(ra) + report_cell_errors(rb)) == 0 ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
