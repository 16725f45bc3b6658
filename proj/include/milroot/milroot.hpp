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

#ifndef MILROOT_MILROOT_HPP_
#define MILROOT_MILROOT_HPP_

// Core library. File I/O and the experiment pipeline live in io.hpp and
// pipeline.hpp, which additionally need OpenCV.

#include "milroot/ace.hpp"
#include "milroot/bags.hpp"
#include "milroot/error.hpp"
#include "milroot/eval.hpp"
#include "milroot/features.hpp"
#include "milroot/forest.hpp"
#include "milroot/mask.hpp"
#include "milroot/miforests.hpp"
#include "milroot/misvm.hpp"
#include "milroot/model.hpp"
#include "milroot/postproc.hpp"
#include "milroot/raster.hpp"
#include "milroot/rng.hpp"
#include "milroot/samples.hpp"
#include "milroot/superpixels.hpp"
#include "milroot/svm.hpp"
#include "milroot/synthgen.hpp"

#endif  // MILROOT_MILROOT_HPP_
