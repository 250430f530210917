// Copyright 2026 The xdt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace xdt {

// Deterministic generator for a tuple of stream coordinates, e.g.
// (seed, domain, period). Distinct tuples give independent streams.
std::mt19937_64 make_rng(std::initializer_list<std::uint64_t> coords);

// Stream tags so that unrelated consumers of one seed never share draws.
enum class Stream : std::uint64_t {
  kGroundTruth = 0x9e1,
  kSamples = 0x9e2,
  kMixed = 0x9e3,
  kSourceInit = 0x9e4,
  kSourceShuffle = 0x9e5,
  kTargetInit = 0x9e6,
  kTargetShuffle = 0x9e7,
  kTransferInit = 0x9e8,
  kMixedShuffle = 0x9e9,
  kProbe = 0x9ea,
};

inline std::uint64_t tag(Stream s) { return static_cast<std::uint64_t>(s); }

}  // namespace xdt
