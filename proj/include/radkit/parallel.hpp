/**
 * Copyright 2026 The radkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef RADKIT_PARALLEL_HPP_
#define RADKIT_PARALLEL_HPP_

namespace radkit {

/// Worker count for OpenMP kernels: RADKIT_THREADS when set to a positive
/// integer, otherwise the hardware parallelism reported by OpenMP.
int worker_count();

/// Overrides the worker count for the current process (0 restores the
/// environment/hardware default). Kernels produce bit-identical results for
/// any worker count; this exists for tests and benchmarks.
void set_worker_count(int n);

}  // namespace radkit

#endif  // RADKIT_PARALLEL_HPP_
