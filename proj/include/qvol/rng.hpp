// Copyright 2026 The qvol Authors
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

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qvol {

using Rng = std::mt19937_64;

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

/// Derives an independent stream seed from a master seed and a path of indices,
/// so that item i of a batch can be regenerated without replaying items 0..i-1.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = detail::splitmix64(master);
    for (auto p : path) s = detail::splitmix64(s ^ detail::splitmix64(p + 0x632be59bd9b4e019ULL));
    return s;
}

/// Stream tags used with derive_seed.
enum class Stream : std::uint64_t { Model = 1, Transpile = 2, Noise = 3, Approx = 4, Placement = 5 };

inline std::uint64_t derive_seed(std::uint64_t master, Stream tag, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = derive_seed(master, {static_cast<std::uint64_t>(tag)});
    for (auto p : path) s = detail::splitmix64(s ^ detail::splitmix64(p + 0x632be59bd9b4e019ULL));
    return s;
}

}  // namespace qvol
