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

#ifndef MILROOT_SAMPLES_HPP_
#define MILROOT_SAMPLES_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "milroot/error.hpp"

namespace milroot {

/// Dense row-major sample matrix with a fixed dimensionality.
class Samples {
 public:
  Samples() = default;
  explicit Samples(std::size_t dims) : dims_(dims) {}

  static Samples from_rows(const std::vector<std::vector<double>>& rows) {
    Samples s(rows.empty() ? 0 : rows.front().size());
    for (const auto& r : rows) s.push_back(r);
    return s;
  }

  std::size_t dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return dims_ == 0 ? 0 : data_.size() / dims_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * dims_, dims_};
  }
  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * dims_, dims_}; }

  void push_back(std::span<const double> x) {
    if (dims_ == 0 && data_.empty()) dims_ = x.size();
    if (x.size() != dims_) {
      throw Error("learners", "sample has " + std::to_string(x.size()) + " dims, expected " +
                                  std::to_string(dims_));
    }
    data_.insert(data_.end(), x.begin(), x.end());
  }

  void reserve(std::size_t n) { data_.reserve(n * dims_); }

  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const Samples&, const Samples&) = default;

 private:
  std::size_t dims_ = 0;
  std::vector<double> data_;
};

inline void check_dims(std::size_t expected, std::size_t got, const char* stage) {
  if (expected != got) {
    throw Error(stage, "dimension mismatch: model expects " + std::to_string(expected) +
                           ", input has " + std::to_string(got));
  }
}

}  // namespace milroot

#endif  // MILROOT_SAMPLES_HPP_
