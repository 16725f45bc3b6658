// Copyright 2026 The milroot Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MILROOT_IO_HPP_
#define MILROOT_IO_HPP_

// File formats. Needs OpenCV (core, imgcodecs); link milroot_io.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "json.hpp"

#include "milroot/error.hpp"
#include "milroot/mask.hpp"
#include "milroot/postproc.hpp"
#include "milroot/raster.hpp"
#include "milroot/superpixels.hpp"

namespace milroot {

namespace fs = std::filesystem;

/// 8- or 16-bit PNG/JPEG; gray images are expanded to three bands and 16-bit
/// values are mapped onto [0, 255].
inline RasterImage read_image(const std::string& path) {
  const cv::Mat m = cv::imread(path, cv::IMREAD_COLOR | cv::IMREAD_ANYDEPTH);
  if (m.empty()) throw Error("io", "cannot read image " + path);
  const double scale = m.depth() == CV_16U ? 255.0 / 65535.0 : 1.0;
  if (m.depth() != CV_8U && m.depth() != CV_16U) throw Error("io", "unsupported depth in " + path);
  RasterImage img(m.rows, m.cols);
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) {
      for (int b = 0; b < 3; ++b) {
        // OpenCV stores BGR.
        const double v = m.depth() == CV_8U ? m.at<cv::Vec3b>(r, c)[2 - b]
                                            : m.at<cv::Vec3w>(r, c)[2 - b];
        img.at(r, c, b) = v * scale;
      }
    }
  }
  return img;
}

inline void write_png(const std::string& path, const cv::Mat& m) {
  if (!cv::imwrite(path, m)) throw Error("io", "cannot write " + path);
}

/// Rounds and clamps to 8 bits.
inline void write_image(const std::string& path, const RasterImage& img) {
  cv::Mat m(img.height(), img.width(), CV_8UC3);
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      for (int b = 0; b < 3; ++b) {
        m.at<cv::Vec3b>(r, c)[2 - b] =
            static_cast<std::uint8_t>(std::clamp(std::round(img.at(r, c, b)), 0.0, 255.0));
      }
    }
  }
  write_png(path, m);
}

/// Any nonzero pixel is root.
inline BinaryMask read_mask(const std::string& path) {
  const cv::Mat m = cv::imread(path, cv::IMREAD_GRAYSCALE);
  if (m.empty()) throw Error("io", "cannot read mask " + path);
  BinaryMask mask(m.rows, m.cols);
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) mask.at(r, c) = m.at<std::uint8_t>(r, c) != 0;
  }
  return mask;
}

inline void write_mask(const std::string& path, const BinaryMask& mask) {
  cv::Mat m(mask.height, mask.width, CV_8UC1);
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) m.at<std::uint8_t>(r, c) = mask.at(r, c) ? 255 : 0;
  }
  write_png(path, m);
}

/// Superpixel ids as a 16-bit single-channel PNG.
inline void write_label_png(const std::string& path, const SuperpixelMap& sp) {
  if (sp.count > 65536) throw Error("io", "too many superpixels for a 16-bit label image");
  cv::Mat m(sp.height, sp.width, CV_16UC1);
  for (int r = 0; r < sp.height; ++r) {
    for (int c = 0; c < sp.width; ++c) m.at<std::uint16_t>(r, c) = static_cast<std::uint16_t>(sp.label(r, c));
  }
  write_png(path, m);
}

inline SuperpixelMap read_label_png(const std::string& path) {
  const cv::Mat m = cv::imread(path, cv::IMREAD_UNCHANGED);
  if (m.empty() || m.type() != CV_16UC1) throw Error("io", "not a 16-bit label image: " + path);
  std::vector<int> labels(static_cast<std::size_t>(m.rows) * m.cols);
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) {
      labels[static_cast<std::size_t>(r) * m.cols + c] = m.at<std::uint16_t>(r, c);
    }
  }
  return SuperpixelMap::from_labels(m.rows, m.cols, std::move(labels));
}

/// Image with superpixel borders painted red.
inline void write_boundary_overlay(const std::string& path, const RasterImage& img,
                                   const SuperpixelMap& sp) {
  RasterImage out = img;
  for (int r = 0; r < sp.height; ++r) {
    for (int c = 0; c < sp.width; ++c) {
      const int id = sp.label(r, c);
      const bool edge = (c + 1 < sp.width && sp.label(r, c + 1) != id) ||
                        (r + 1 < sp.height && sp.label(r + 1, c) != id);
      if (!edge) continue;
      out.at(r, c, 0) = 255.0;
      out.at(r, c, 1) = 0.0;
      out.at(r, c, 2) = 0.0;
    }
  }
  write_image(path, out);
}

/// Gray rendering of a confidence map stretched to its own range.
inline void write_confidence_png(const std::string& path, const ConfidenceMap& map) {
  const auto [lo, hi] = std::minmax_element(map.values.begin(), map.values.end());
  const double span = *hi > *lo ? *hi - *lo : 1.0;
  cv::Mat m(map.height, map.width, CV_8UC1);
  for (int r = 0; r < map.height; ++r) {
    for (int c = 0; c < map.width; ++c) {
      m.at<std::uint8_t>(r, c) =
          static_cast<std::uint8_t>(std::lround(255.0 * (map.at(r, c) - *lo) / span));
    }
  }
  write_png(path, m);
}

// ---------------------------------------------------------------------------
// CMAP: "CMAP", version byte (1), u32 LE width, u32 LE height, then
// width*height little-endian IEEE-754 doubles in row-major order.

inline constexpr std::uint8_t kCmapVersion = 1;

namespace detail {

inline void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint32_t get_u32(const std::string& buf, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[at + i])) << (8 * i);
  return v;
}

}  // namespace detail

inline std::string encode_cmap(const ConfidenceMap& map) {
  std::string buf = "CMAP";
  buf.push_back(static_cast<char>(kCmapVersion));
  detail::put_u32(buf, static_cast<std::uint32_t>(map.width));
  detail::put_u32(buf, static_cast<std::uint32_t>(map.height));
  for (double v : map.values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
  return buf;
}

inline ConfidenceMap decode_cmap(const std::string& buf) {
  if (buf.size() < 13 || buf.compare(0, 4, "CMAP") != 0) throw Error("io", "not a CMAP file");
  if (static_cast<std::uint8_t>(buf[4]) != kCmapVersion) throw Error("io", "unsupported CMAP version");
  const auto w = detail::get_u32(buf, 5);
  const auto h = detail::get_u32(buf, 9);
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (buf.size() != 13 + 8 * n) throw Error("io", "truncated CMAP file");
  ConfidenceMap map(static_cast<int>(h), static_cast<int>(w));
  for (std::size_t p = 0; p < n; ++p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[13 + 8 * p + i])) << (8 * i);
    }
    map.values[p] = std::bit_cast<double>(bits);
  }
  return map;
}

inline std::string read_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("io", "cannot read " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("io", "cannot write " + path);
  os << text;
  if (!os) throw Error("io", "write failed for " + path);
}

inline void write_cmap(const std::string& path, const ConfidenceMap& map) {
  write_text(path, encode_cmap(map));
}

inline ConfidenceMap read_cmap(const std::string& path) { return decode_cmap(read_text(path)); }

// ---------------------------------------------------------------------------
// Manifest: [{"image": path, "label": 0|1, "mask": path|null}]. Relative
// paths resolve against the manifest's directory.

struct ManifestEntry {
  std::string image;
  int label = 0;
  std::optional<std::string> mask;
};

inline std::vector<ManifestEntry> read_manifest(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error("io", "malformed manifest " + path + ": " + e.what());
  }
  if (!j.is_array()) throw Error("io", "manifest must be a JSON array");
  const fs::path base = fs::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    const fs::path q(p);
    return (q.is_absolute() ? q : base / q).lexically_normal().string();
  };
  std::vector<ManifestEntry> out;
  for (const auto& e : j) {
    ManifestEntry m;
    try {
      m.image = resolve(e.at("image").get<std::string>());
      m.label = e.at("label").get<int>();
      if (e.contains("mask") && !e.at("mask").is_null()) {
        m.mask = resolve(e.at("mask").get<std::string>());
      }
    } catch (const nlohmann::json::exception& ex) {
      throw Error("io", std::string("bad manifest entry: ") + ex.what());
    }
    if (m.label != 0 && m.label != 1) throw Error("io", "manifest label must be 0 or 1");
    out.push_back(std::move(m));
  }
  return out;
}

inline void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json o = {{"image", e.image}, {"label", e.label}};
    o["mask"] = e.mask ? nlohmann::json(*e.mask) : nlohmann::json(nullptr);
    j.push_back(o);
  }
  write_text(path, j.dump(2) + "\n");
}

}  // namespace milroot

#endif  // MILROOT_IO_HPP_
