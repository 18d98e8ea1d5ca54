// Copyright (c) 2026, The rowconv Authors. All rights reserved.
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

#pragma once

#include <random>

#include "rowconv/config.hpp"
#include "rowconv/tensor.hpp"

namespace rowconv::testing {

/// Stride-1 same-padded config with the given upper bounds.
inline ConvConfig random_same_config(std::mt19937_64& gen, std::size_t max_n, std::size_t max_hw,
                                     std::size_t max_c, std::size_t max_m) {
  static constexpr std::size_t kFilters[] = {1, 3, 5};
  const std::size_t f = kFilters[gen() % 3];
  const std::size_t h = 1 + gen() % max_hw;
  const std::size_t w = 1 + gen() % max_hw;
  const auto pad = same_padding(f, f);
  ConvConfig cfg{"rand", 1 + gen() % max_n, 1 + gen() % max_c, h, w, 1 + gen() % max_m, f, f, 1, pad.h, pad.w};
  return cfg;
}

/// Tensor of integers in [-2, 2]; products and sums stay exact in float.
inline Tensor4 small_int_tensor(Dims4 dims, std::mt19937_64& gen) {
  Tensor4 t(dims);
  for (float& v : t.data()) v = static_cast<float>(static_cast<int>(gen() % 5) - 2);
  return t;
}

}  // namespace rowconv::testing
