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

#include "jumpscope/rng.hpp"

#include <cmath>
#include <numbers>

namespace jumpscope {

namespace {

constexpr uint32_t kMul0 = 0xD2511F53;
constexpr uint32_t kMul1 = 0xCD9E8D57;
constexpr uint32_t kWeyl0 = 0x9E3779B9;
constexpr uint32_t kWeyl1 = 0xBB67AE85;

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

std::array<uint32_t, 4> CounterRng::philox(std::array<uint32_t, 4> ctr, std::array<uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        uint64_t p0 = static_cast<uint64_t>(kMul0) * ctr[0];
        uint64_t p1 = static_cast<uint64_t>(kMul1) * ctr[2];
        uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
        uint32_t lo0 = static_cast<uint32_t>(p0);
        uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
        uint32_t lo1 = static_cast<uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

CounterRng::CounterRng(uint64_t seed, Stream stream) : CounterRng(seed, static_cast<uint32_t>(stream)) {}

CounterRng::CounterRng(uint64_t seed, uint32_t stream_id) {
    uint64_t k = splitmix64(seed ^ splitmix64(0x5EED0000ull + stream_id));
    key_ = {static_cast<uint32_t>(k), static_cast<uint32_t>(k >> 32)};
}

CounterRng::result_type CounterRng::operator()() {
    if (used_ >= 4) {
        block_ = philox(
            {static_cast<uint32_t>(counter_), static_cast<uint32_t>(counter_ >> 32), 0u, 0u}, key_);
        ++counter_;
        used_ = 0;
    }
    uint64_t lo = block_[used_];
    uint64_t hi = block_[used_ + 1];
    used_ += 2;
    return lo | (hi << 32);
}

double CounterRng::uniform_open() {
    // 53 random bits, shifted off zero by half an ulp.
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    double u1 = uniform_open();
    double u2 = uniform_open();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * std::numbers::pi * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_normal_ = true;
    return r * std::cos(theta);
}

}  // namespace jumpscope
