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

#ifndef JUMPSCOPE_SIM_HPP
#define JUMPSCOPE_SIM_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "jumpscope/model.hpp"

namespace jumpscope {

enum class NoiseMode {
    Isotropic,  // unit-variance circular noise per quadrature
    Squeezed,   // per-state ellipses from the pointer model
    None,       // noiseless mean trajectory
};

struct TrajectorySpec {
    double duration = 0;
    uint64_t seed = 0;
    /// nullopt draws the initial state from the chain's stationary distribution.
    std::optional<State> initial_state = State::G;
    NoiseMode noise = NoiseMode::Isotropic;
};

/// Number of samples floor(duration / tau), tolerant to representation error.
size_t sample_count(double duration, double tau);

/// Samples a continuous-time Markov jump path on [0, duration] using
/// stream Stream::MarkovPath of `spec.seed`.
std::vector<Segment> sample_markov_path(const SystemParams &params, const TrajectorySpec &spec);

/// Renders the resonator response to `path` plus measurement noise drawn from
/// stream Stream::Noise of `spec.seed`. The pointer starts at the steady state
/// of the first segment and is continuous across jumps.
IQTrace render_trace(
    const SystemParams &params, const PointerModel &pointer, const std::vector<Segment> &path,
    const TrajectorySpec &spec);

/// sample_markov_path followed by render_trace.
IQTrace simulate(const SystemParams &params, const PointerModel &pointer, const TrajectorySpec &spec);

}  // namespace jumpscope

#endif  // JUMPSCOPE_SIM_HPP
