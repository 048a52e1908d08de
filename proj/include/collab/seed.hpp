// Copyright (c) 2026 The collabtransport Authors
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

#ifndef COLLAB__SEED_HPP_
#define COLLAB__SEED_HPP_

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace collab
{

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31U);
}

/// Folds `parts` into `base` one at a time: h = splitmix64(h ^ splitmix64(part)).
constexpr std::uint64_t mix_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts)
{
  std::uint64_t h = splitmix64(base);
  for (auto p : parts) {
    h = splitmix64(h ^ splitmix64(p));
  }
  return h;
}

/// 64-bit FNV-1a, used to turn names (e.g. algorithm ids) into seed parts.
constexpr std::uint64_t fnv1a(std::string_view text)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace collab

#endif  // COLLAB__SEED_HPP_
