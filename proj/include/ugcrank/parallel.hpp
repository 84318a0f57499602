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

#pragma once

#include <optional>

namespace ugcrank {

// Worker count: explicit value, else $UGCRANK_THREADS, else hardware
// concurrency. Invalid environment values are ignored.
int resolve_threads(std::optional<int> requested);

// Sets the OpenMP team size used by the parallel kernels and per-item loops.
void set_threads(int n);
int current_threads();

}  // namespace ugcrank
