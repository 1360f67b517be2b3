#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hmtc/fixture.hpp"
#include "hmtc/image_io.hpp"

using namespace hmtc;
namespace fs = std::filesystem;

namespace {
struct TempFile {
  fs::path path;
  explicit TempFile(const char* name) : path(fs::temp_directory_path() / name) {}
  ~TempFile() { std::remove(path.c_str()); }
};
}  // namespace

TEST_CASE("PNG round-trip preserves every sample") {
  RgbImage img;
  img.width = 2;
  img.height = 2;
  img.pixels = {10, 20, 30, 0, 255, 128, 1, 2, 3, 250, 251, 252};
  TempFile f("hmtc_io_roundtrip.png");
  save_png(img, f.path.string());
  const RgbImage back = load_image(f.path.string());
  REQUIRE(back.width == 2);
  REQUIRE(back.height == 2);
  CHECK(back.pixels == img.pixels);
  CHECK(back.at(0, 0, 0) == 10);
  CHECK(back.at(0, 0, 2) == 30);
}

TEST_CASE("checkerboard fixture survives a PNG round-trip") {
  const RgbImage img = checkerboard_image(512, 4);
  TempFile f("hmtc_io_checker.png");
  save_png(img, f.path.string());
  CHECK(load_image(f.path.string()).pixels == img.pixels);
}

TEST_CASE("textured fixture is deterministic and survives a round-trip") {
  const RgbImage a = textured_image(64, 7);
  const RgbImage b = textured_image(64, 7);
  REQUIRE(a.pixels == b.pixels);
  CHECK(textured_image(64, 8).pixels != a.pixels);
  TempFile f("hmtc_io_textured.png");
  save_png(a, f.path.string());
  CHECK(load_image(f.path.string()).pixels == a.pixels);
}

TEST_CASE("decode failure names the offending path") {
  TempFile f("hmtc_io_garbage.png");
  std::ofstream(f.path) << "not a png";
  try {
    load_image(f.path.string());
    FAIL("expected runtime_error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(f.path.string()) != std::string::npos);
  }
  CHECK_THROWS_AS(load_image("/nonexistent/nowhere.png"), std::runtime_error);
}

TEST_CASE("save rejects an invalid image") {
  RgbImage bad;
  bad.width = 3;
  bad.height = 2;  // pixel buffer left empty
  CHECK_THROWS_AS(save_png(bad, "/tmp/hmtc_io_invalid.png"), std::invalid_argument);
}
