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

#ifndef JUMPSCOPE_RNG_HPP
#define JUMPSCOPE_RNG_HPP

#include <array>
#include <cstdint>
#include <limits>

namespace jumpscope {

/// Random streams used by the simulator. A (seed, stream) pair names an
/// independent sequence.
enum class Stream : uint32_t { MarkovPath = 0, Noise = 1 };

/// Philox4x32-10 counter-based generator. The key is derived from (seed, stream);
/// the output is a pure function of (seed, stream, counter), so every draw is
/// reproducible without carrying state between workers.
class CounterRng {
   public:
    using result_type = uint64_t;

    CounterRng(uint64_t seed, Stream stream);
    CounterRng(uint64_t seed, uint32_t stream_id);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform in (0, 1), never exactly 0 or 1.
    double uniform_open();
    /// Standard normal via Box-Muller; pairs are cached.
    double normal();

    /// Raw block for (key, counter); exposed for tests.
    static std::array<uint32_t, 4> philox(std::array<uint32_t, 4> counter, std::array<uint32_t, 2> key);

   private:
    std::array<uint32_t, 2> key_{};
    uint64_t counter_ = 0;
    std::array<uint32_t, 4> block_{};
    int used_ = 4;
    double cached_normal_ = 0;
    bool has_cached_normal_ = false;
};

}  // namespace jumpscope

#endif  // JUMPSCOPE_RNG_HPP
