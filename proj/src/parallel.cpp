// Copyright 2026 The ugcrank Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ugcrank/parallel.hpp"

#include <omp.h>

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <thread>

namespace ugcrank {

int resolve_threads(std::optional<int> requested) {
  if (requested && *requested > 0) return *requested;
  if (const char* env = std::getenv("UGCRANK_THREADS")) {
    int v = 0;
    const char* end = env + std::strlen(env);
    auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec == std::errc{} && ptr == end && v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

void set_threads(int n) { omp_set_num_threads(n > 0 ? n : 1); }

int current_threads() { return omp_get_max_threads(); }

}  // namespace ugcrank
