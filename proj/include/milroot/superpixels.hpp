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

#ifndef MILROOT_SUPERPIXELS_HPP_
#define MILROOT_SUPERPIXELS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include "milroot/error.hpp"
#include "milroot/raster.hpp"

namespace milroot {

struct Pixel {
  int row = 0;
  int col = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

struct SlicParams {
  int target_count = 1;
  double compactness = 10.0;
  int max_iters = 10;

  void validate(std::size_t pixel_count) const {
    if (target_count < 1) throw Error("superpixels", "target_count must be >= 1");
    if (static_cast<std::size_t>(target_count) > pixel_count) {
      throw Error("superpixels", "target_count exceeds pixel count");
    }
    if (!(compactness > 0.0)) throw Error("superpixels", "compactness must be > 0");
    if (max_iters < 1) throw Error("superpixels", "max_iters must be >= 1");
  }
};

/// Pipeline defaults: superpixels of roughly `superpixel_size` pixels.
inline SlicParams default_slic_params(int height, int width, double superpixel_size = 100.0) {
  SlicParams p;
  const double n = static_cast<double>(height) * width;
  p.target_count = std::max(1, static_cast<int>(std::lround(n / superpixel_size)));
  return p;
}

/// Partition of an image into superpixels with ids 0..count-1.
struct SuperpixelMap {
  int height = 0;
  int width = 0;
  int count = 0;
  std::vector<int> labels;                 // row-major, one id per pixel
  std::vector<std::vector<Pixel>> members;  // members[id] in raster order

  int label(int row, int col) const { return labels[static_cast<std::size_t>(row) * width + col]; }

  static SuperpixelMap from_labels(int height, int width, std::vector<int> labels) {
    SuperpixelMap m;
    m.height = height;
    m.width = width;
    m.labels = std::move(labels);
    m.count = m.labels.empty() ? 0 : *std::max_element(m.labels.begin(), m.labels.end()) + 1;
    m.members.assign(m.count, {});
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) m.members[m.label(r, c)].push_back({r, c});
    }
    return m;
  }
};

namespace detail {

struct SlicCenter {
  double l, a, b, row, col;
};

// Grid of nx*ny seeds closest to `target`, then closest to the image aspect;
// remaining ties prefer more columns.
inline std::pair<int, int> slic_grid(int height, int width, int target) {
  int best_nx = 1, best_ny = 1;
  double best_count = std::numeric_limits<double>::infinity();
  double best_aspect = std::numeric_limits<double>::infinity();
  for (int nx = 1; nx <= width; ++nx) {
    int ny = static_cast<int>(std::lround(static_cast<double>(target) / nx));
    ny = std::clamp(ny, 1, height);
    const double count_err = std::abs(static_cast<double>(nx) * ny - target);
    const double aspect_err =
        std::abs(std::log((static_cast<double>(width) / nx) / (static_cast<double>(height) / ny)));
    const bool better = count_err < best_count ||
                        (count_err == best_count && aspect_err < best_aspect - 1e-12) ||
                        (count_err == best_count && std::abs(aspect_err - best_aspect) <= 1e-12 &&
                         nx > best_nx);
    if (better) {
      best_nx = nx;
      best_ny = ny;
      best_count = count_err;
      best_aspect = aspect_err;
    }
  }
  return {best_nx, best_ny};
}

inline double lab_gradient(const LabImage& lab, int r, int c) {
  const int h = lab.height(), w = lab.width();
  const int r0 = std::max(r - 1, 0), r1 = std::min(r + 1, h - 1);
  const int c0 = std::max(c - 1, 0), c1 = std::min(c + 1, w - 1);
  double g = 0.0;
  for (int b = 0; b < 3; ++b) {
    const double dx = lab.at(r, c1, b) - lab.at(r, c0, b);
    const double dy = lab.at(r1, c, b) - lab.at(r0, c, b);
    g += dx * dx + dy * dy;
  }
  return g;
}

// Relabels `raw` (which may contain -1 for unreached pixels) so every
// superpixel is 4-connected. Fragments smaller than `min_size`, and all
// unreached fragments, are merged into their largest adjacent fragment.
inline std::vector<int> enforce_connectivity(int h, int w, const std::vector<int>& raw,
                                             double min_size) {
  const std::size_t n = static_cast<std::size_t>(h) * w;
  std::vector<int> frag(n, -1);
  std::vector<int> frag_raw;
  std::vector<std::size_t> frag_size;
  std::vector<std::size_t> stack;
  for (std::size_t p = 0; p < n; ++p) {
    if (frag[p] >= 0) continue;
    const int id = static_cast<int>(frag_raw.size());
    frag_raw.push_back(raw[p]);
    frag_size.push_back(0);
    frag[p] = id;
    stack.assign(1, p);
    while (!stack.empty()) {
      const std::size_t q = stack.back();
      stack.pop_back();
      ++frag_size[id];
      const int r = static_cast<int>(q / w), c = static_cast<int>(q % w);
      const int dr[4] = {-1, 1, 0, 0}, dc[4] = {0, 0, -1, 1};
      for (int k = 0; k < 4; ++k) {
        const int rr = r + dr[k], cc = c + dc[k];
        if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
        const std::size_t nq = static_cast<std::size_t>(rr) * w + cc;
        if (frag[nq] < 0 && raw[nq] == raw[p]) {
          frag[nq] = id;
          stack.push_back(nq);
        }
      }
    }
  }

  const int nf = static_cast<int>(frag_raw.size());
  std::vector<std::set<int>> adj(nf);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int f = frag[static_cast<std::size_t>(r) * w + c];
      if (c + 1 < w) {
        const int g = frag[static_cast<std::size_t>(r) * w + c + 1];
        if (g != f) adj[f].insert(g), adj[g].insert(f);
      }
      if (r + 1 < h) {
        const int g = frag[static_cast<std::size_t>(r + 1) * w + c];
        if (g != f) adj[f].insert(g), adj[g].insert(f);
      }
    }
  }

  std::vector<int> parent(nf);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (int f = 0; f < nf; ++f) {
      if (find(f) != f) continue;
      const bool orphan = frag_raw[f] < 0;
      if (!orphan && static_cast<double>(frag_size[f]) >= min_size) continue;
      int target = -1;
      for (int g : adj[f]) {
        const int rg = find(g);
        if (rg == f) continue;
        if (target < 0 || frag_size[rg] > frag_size[target] ||
            (frag_size[rg] == frag_size[target] && rg < target)) {
          target = rg;
        }
      }
      if (target < 0) continue;
      parent[f] = target;
      frag_size[target] += frag_size[f];
      for (int g : adj[f]) {
        const int rg = find(g);
        if (rg != target) adj[target].insert(rg);
      }
      adj[f].clear();
      changed = true;
    }
  }

  std::vector<int> final_id(nf, -1);
  std::vector<int> out(n);
  int next = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const int root = find(frag[p]);
    if (final_id[root] < 0) final_id[root] = next++;
    out[p] = final_id[root];
  }
  return out;
}

}  // namespace detail

/// SLIC oversegmentation in (L, a, b, row, col) space.
///
/// Seeds sit on a regular grid and move to the lowest-gradient pixel in their
/// 3x3 neighborhood when the grid step allows it. Each iteration searches a
/// 2S x 2S window per center, with S = sqrt(HW / target_count). Afterwards
/// fragments smaller than S^2 / 4 are merged so every superpixel is 4-connected.
inline SuperpixelMap slic_segment(const LabImage& lab, const SlicParams& params) {
  const int h = lab.height(), w = lab.width();
  const std::size_t n = lab.pixel_count();
  params.validate(n);
  const double step = std::sqrt(static_cast<double>(n) / params.target_count);
  const auto [nx, ny] = detail::slic_grid(h, w, params.target_count);
  const bool perturb = static_cast<double>(w) / nx >= 3.0 && static_cast<double>(h) / ny >= 3.0;

  std::vector<detail::SlicCenter> centers;
  centers.reserve(static_cast<std::size_t>(nx) * ny);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      int r = std::min(h - 1, static_cast<int>((iy + 0.5) * h / ny));
      int c = std::min(w - 1, static_cast<int>((ix + 0.5) * w / nx));
      if (perturb) {
        double best = detail::lab_gradient(lab, r, c);
        int br = r, bc = c;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int rr = r + dr, cc = c + dc;
            if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
            const double g = detail::lab_gradient(lab, rr, cc);
            if (g < best) best = g, br = rr, bc = cc;
          }
        }
        r = br, c = bc;
      }
      centers.push_back({lab.at(r, c, 0), lab.at(r, c, 1), lab.at(r, c, 2),
                         static_cast<double>(r), static_cast<double>(c)});
    }
  }

  const double spatial_weight = (params.compactness / step) * (params.compactness / step);
  std::vector<int> labels(n, -1), previous;
  std::vector<double> dist(n);
  for (int iter = 0; iter < params.max_iters; ++iter) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    std::fill(labels.begin(), labels.end(), -1);
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const auto& ce = centers[k];
      const int r0 = std::max(0, static_cast<int>(std::floor(ce.row - step)));
      const int r1 = std::min(h - 1, static_cast<int>(std::ceil(ce.row + step)));
      const int c0 = std::max(0, static_cast<int>(std::floor(ce.col - step)));
      const int c1 = std::min(w - 1, static_cast<int>(std::ceil(ce.col + step)));
      for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
          const double dl = lab.at(r, c, 0) - ce.l;
          const double da = lab.at(r, c, 1) - ce.a;
          const double db = lab.at(r, c, 2) - ce.b;
          const double dy = r - ce.row, dx = c - ce.col;
          const double d = dl * dl + da * da + db * db + spatial_weight * (dx * dx + dy * dy);
          const std::size_t p = static_cast<std::size_t>(r) * w + c;
          if (d < dist[p]) {
            dist[p] = d;
            labels[p] = static_cast<int>(k);
          }
        }
      }
    }

    std::vector<detail::SlicCenter> sums(centers.size(), {0, 0, 0, 0, 0});
    std::vector<std::size_t> counts(centers.size(), 0);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const int k = labels[static_cast<std::size_t>(r) * w + c];
        if (k < 0) continue;
        auto& s = sums[k];
        s.l += lab.at(r, c, 0), s.a += lab.at(r, c, 1), s.b += lab.at(r, c, 2);
        s.row += r, s.col += c;
        ++counts[k];
      }
    }
    for (std::size_t k = 0; k < centers.size(); ++k) {
      if (counts[k] == 0) continue;
      const double inv = 1.0 / static_cast<double>(counts[k]);
      centers[k] = {sums[k].l * inv, sums[k].a * inv, sums[k].b * inv, sums[k].row * inv,
                    sums[k].col * inv};
    }
    if (labels == previous) break;
    previous = labels;
  }

  return SuperpixelMap::from_labels(
      h, w, detail::enforce_connectivity(h, w, labels, step * step / 4.0));
}

inline SuperpixelMap slic_segment(const RasterImage& image, const SlicParams& params) {
  return slic_segment(rgb_to_lab(image), params);
}

}  // namespace milroot

#endif  // MILROOT_SUPERPIXELS_HPP_
