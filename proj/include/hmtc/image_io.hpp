#pragma once

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <stdexcept>
#include <string>

#include "hmtc/image.hpp"

namespace hmtc {

// Decode PNG/JPEG/TIFF to 8-bit RGB. No resampling, no color management.
inline RgbImage load_image(const std::string& path) {
  cv::Mat m = cv::imread(path, cv::IMREAD_COLOR);  // BGR, 8-bit
  if (m.empty())
    throw std::runtime_error("load_image: cannot decode '" + path + "'");
  if (m.rows < 1 || m.cols < 1)
    throw std::runtime_error("load_image: zero-area image '" + path + "'");
  RgbImage img;
  img.width = m.cols;
  img.height = m.rows;
  img.pixels.resize(static_cast<size_t>(3) * m.cols * m.rows);
  for (int r = 0; r < m.rows; ++r) {
    const cv::Vec3b* row = m.ptr<cv::Vec3b>(r);
    for (int c = 0; c < m.cols; ++c) {
      img.at(r, c, 0) = row[c][2];
      img.at(r, c, 1) = row[c][1];
      img.at(r, c, 2) = row[c][0];
    }
  }
  return img;
}

inline void save_png(const RgbImage& img, const std::string& path) {
  if (!img.valid()) throw std::invalid_argument("save_png: invalid image");
  cv::Mat m(img.height, img.width, CV_8UC3);
  for (int r = 0; r < img.height; ++r) {
    cv::Vec3b* row = m.ptr<cv::Vec3b>(r);
    for (int c = 0; c < img.width; ++c) {
      row[c][2] = img.at(r, c, 0);
      row[c][1] = img.at(r, c, 1);
      row[c][0] = img.at(r, c, 2);
    }
  }
  if (!cv::imwrite(path, m))
    throw std::runtime_error("save_png: cannot write '" + path + "'");
}

}  // namespace hmtc
