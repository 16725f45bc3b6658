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

#ifndef MILROOT_MISVM_HPP_
#define MILROOT_MISVM_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "milroot/bags.hpp"
#include "milroot/rng.hpp"
#include "milroot/svm.hpp"

namespace milroot {

struct MisvmOptions {
  SmoOptions smo;
  int max_iters = 50;
};

struct MisvmResult {
  SvmModel model;
  std::vector<int> labels;  // instance labels the returned model was trained on
  int iterations = 0;
  bool converged = false;
};

/// miSVM: instance labels start at their bag label; each round trains an SVM,
/// relabels positive-bag instances by the sign of the decision value, forces
/// the top-scoring instance of any positive bag left without a positive, and
/// keeps negative-bag instances negative. Stops once labels stop changing.
inline MisvmResult misvm_train(const BagSet& bags, const MisvmOptions& opt) {
  bags.require_both_labels("mil");
  KernelCache cache(bags.instances, opt.smo.kernel, opt.smo.cache_bytes);
  std::vector<int> labels = bags.inherited_labels();
  MisvmResult result;
  for (int iter = 0; iter < opt.max_iters; ++iter) {
    SmoOptions smo = opt.smo;
    smo.seed = derive_seed(opt.smo.seed, static_cast<std::uint64_t>(iter));
    SmoResult fit = smo_train(cache, labels, smo);
    result.model = std::move(fit.model);
    result.labels = labels;
    result.iterations = iter + 1;

    std::vector<int> next = labels;
    for (std::size_t b = 0; b < bags.bag_count(); ++b) {
      if (bags.bag_labels[b] != 1) continue;
      bool any = false;
      std::size_t best = bags.members[b].front();
      for (std::size_t i : bags.members[b]) {
        next[i] = fit.train_decision[i] > 0.0 ? 1 : 0;
        any = any || next[i] == 1;
        if (fit.train_decision[i] > fit.train_decision[best]) best = i;
      }
      if (!any) next[best] = 1;
    }
    if (next == labels) {
      result.converged = true;
      break;
    }
    labels = std::move(next);
  }
  return result;
}

}  // namespace milroot

#endif  // MILROOT_MISVM_HPP_
