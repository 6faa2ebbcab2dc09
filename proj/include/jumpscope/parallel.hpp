// Copyright 2026 The jumpscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef JUMPSCOPE_PARALLEL_HPP
#define JUMPSCOPE_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace jumpscope {

/// Worker count from JUMPSCOPE_THREADS, else hardware concurrency (at least 1).
size_t default_thread_count();

/// Runs job(i) for i in [0, n) on up to `threads` workers. Jobs must write only
/// to their own outputs. The first exception thrown by any job is rethrown.
template <typename Job>
void parallel_for(size_t n, size_t threads, Job &&job) {
    threads = std::clamp<size_t>(threads, 1, std::max<size_t>(n, 1));
    if (threads == 1) {
        for (size_t i = 0; i < n; ++i) {
            job(i);
        }
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (size_t w = 0; w < threads; ++w) {
            workers.emplace_back([&] {
                for (size_t i = next++; i < n; i = next++) {
                    try {
                        job(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) {
                            error = std::current_exception();
                        }
                    }
                }
            });
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace jumpscope

#endif  // JUMPSCOPE_PARALLEL_HPP
