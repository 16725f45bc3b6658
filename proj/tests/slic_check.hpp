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

#ifndef MILROOT_TESTS_SLIC_CHECK_HPP_
#define MILROOT_TESTS_SLIC_CHECK_HPP_

#include <string>
#include <vector>

#include "milroot/superpixels.hpp"

namespace milroot::testing {

// Empty string when `m` is a partition into non-empty 4-connected regions
// with ids 0..count-1; otherwise a description of the first violation.
inline std::string partition_violation(const SuperpixelMap& m) {
  const std::size_t n = static_cast<std::size_t>(m.height) * m.width;
  if (m.labels.size() != n) return "label count";
  if (m.members.size() != static_cast<std::size_t>(m.count)) return "member lists";
  std::size_t total = 0;
  for (int id = 0; id < m.count; ++id) {
    if (m.members[id].empty()) return "empty superpixel " + std::to_string(id);
    total += m.members[id].size();
    for (const auto& p : m.members[id]) {
      if (m.label(p.row, p.col) != id) return "member list disagrees with labels";
    }
  }
  if (total != n) return "pixels covered more than once or not at all";
  for (int l : m.labels) {
    if (l < 0 || l >= m.count) return "label out of range";
  }
  // Flood fill each id from its first member; every member must be reached.
  std::vector<char> seen(n, 0);
  for (int id = 0; id < m.count; ++id) {
    std::vector<Pixel> stack = {m.members[id].front()};
    seen[static_cast<std::size_t>(stack[0].row) * m.width + stack[0].col] = 1;
    std::size_t reached = 0;
    while (!stack.empty()) {
      const Pixel p = stack.back();
      stack.pop_back();
      ++reached;
      const int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
      for (int k = 0; k < 4; ++k) {
        const int r = p.row + dr[k], c = p.col + dc[k];
        if (r < 0 || c < 0 || r >= m.height || c >= m.width) continue;
        const auto q = static_cast<std::size_t>(r) * m.width + c;
        if (seen[q] || m.labels[q] != id) continue;
        seen[q] = 1;
        stack.push_back({r, c});
      }
    }
    if (reached != m.members[id].size()) return "superpixel " + std::to_string(id) + " is not connected";
  }
  return {};
}

}  // namespace milroot::testing

#endif  // MILROOT_TESTS_SLIC_CHECK_HPP_
