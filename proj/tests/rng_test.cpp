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

#include <gtest/gtest.h>

#include <cmath>

using namespace jumpscope;

TEST(rng, philox_known_answers) {
    using Block = std::array<uint32_t, 4>;
    EXPECT_EQ(CounterRng::philox({0, 0, 0, 0}, {0, 0}), (Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(
        CounterRng::philox({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
        (Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(
        CounterRng::philox({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
        (Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(rng, deterministic_per_seed_and_stream) {
    CounterRng a(42, Stream::Noise);
    CounterRng b(42, Stream::Noise);
    CounterRng c(42, Stream::MarkovPath);
    CounterRng d(43, Stream::Noise);
    int same_c = 0;
    int same_d = 0;
    for (int k = 0; k < 1000; ++k) {
        uint64_t x = a();
        ASSERT_EQ(x, b());
        same_c += x == c();
        same_d += x == d();
    }
    EXPECT_EQ(same_c, 0);
    EXPECT_EQ(same_d, 0);
}

TEST(rng, uniform_open_interval) {
    CounterRng rng(1, 0u);
    double sum = 0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
        double u = rng.uniform_open();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    // Standard error of the mean is sqrt(1/12/n) ~ 6.5e-4.
    EXPECT_NEAR(sum / n, 0.5, 4e-3);
}

TEST(rng, normal_moments) {
    CounterRng rng(7, Stream::Noise);
    const int n = 400000;
    double m1 = 0, m2 = 0, m4 = 0;
    for (int k = 0; k < n; ++k) {
        double z = rng.normal();
        m1 += z;
        m2 += z * z;
        m4 += z * z * z * z;
    }
    m1 /= n;
    m2 /= n;
    m4 /= n;
    EXPECT_NEAR(m1, 0.0, 5 / std::sqrt(n));
    EXPECT_NEAR(m2, 1.0, 5 * std::sqrt(2.0 / n));
    EXPECT_NEAR(m4, 3.0, 5 * std::sqrt(96.0 / n));
}
