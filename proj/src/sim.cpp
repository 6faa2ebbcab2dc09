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

#include "jumpscope/sim.hpp"

#include <cmath>

#include "jumpscope/rng.hpp"

namespace jumpscope {

namespace {

State draw_weighted(CounterRng &rng, const PerState<double> &weights) {
    double total = 0;
    for (State s : kAllStates) {
        total += weights[s];
    }
    double u = rng.uniform_open() * total;
    State last = State::G;
    for (State s : kAllStates) {
        if (weights[s] <= 0) {
            continue;
        }
        last = s;
        if (u < weights[s]) {
            return s;
        }
        u -= weights[s];
    }
    return last;
}

}  // namespace

size_t sample_count(double duration, double tau) {
    if (!(tau > 0)) {
        throw DomainError("integration time must be positive");
    }
    return static_cast<size_t>(std::floor(duration / tau * (1 + 1e-12)));
}

std::vector<Segment> sample_markov_path(const SystemParams &params, const TrajectorySpec &spec) {
    if (!(spec.duration > 0)) {
        throw DomainError("trajectory duration must be positive");
    }
    CounterRng rng(spec.seed, Stream::MarkovPath);
    State state = spec.initial_state ? *spec.initial_state : draw_weighted(rng, params.rates.stationary());
    std::vector<Segment> path{{0.0, state}};
    double t = 0;
    while (true) {
        double exit = params.rates.exit_rate(state);
        if (exit <= 0) {
            break;
        }
        t += -std::log(rng.uniform_open()) / exit;
        if (t >= spec.duration) {
            break;
        }
        PerState<double> weights;
        for (State to : kAllStates) {
            weights[to] = params.rates(state, to);
        }
        state = draw_weighted(rng, weights);
        path.push_back({t, state});
    }
    return path;
}

IQTrace render_trace(
    const SystemParams &params, const PointerModel &pointer, const std::vector<Segment> &path,
    const TrajectorySpec &spec) {
    size_t n = sample_count(spec.duration, params.tau);
    if (n < 10) {
        throw DomainError("trajectory must span at least 10 integration times");
    }
    if (path.empty() || path.front().start != 0.0) {
        throw DomainError("truth path must start at t = 0");
    }

    IQTrace trace;
    trace.dt = params.tau;
    trace.nbar = params.nbar;
    trace.samples.resize(n);
    // Segments beyond the rendered span carry no samples.
    std::vector<Segment> truth;
    for (const Segment &seg : path) {
        if (seg.start < trace.duration()) {
            truth.push_back(seg);
        }
    }
    trace.truth = truth;

    CounterRng noise(spec.seed, Stream::Noise);
    size_t next_seg = 1;
    State state = path.front().state;
    Complex alpha = pointer.alpha[state];
    double t = 0;
    for (size_t k = 0; k < n; ++k) {
        double t_k = trace.time_of(k);
        // Piecewise evolution across every jump inside (t, t_k].
        while (next_seg < path.size() && path[next_seg].start <= t_k) {
            double t_jump = path[next_seg].start;
            alpha = evolve_pointer(alpha, pointer.alpha[state], pointer.detuning[state], params.kappa, t_jump - t);
            t = t_jump;
            state = path[next_seg].state;
            ++next_seg;
        }
        alpha = evolve_pointer(alpha, pointer.alpha[state], pointer.detuning[state], params.kappa, t_k - t);
        t = t_k;

        Complex sample = alpha;
        if (spec.noise != NoiseMode::None) {
            double z1 = noise.normal();
            double z2 = noise.normal();
            if (spec.noise == NoiseMode::Isotropic) {
                sample += Complex(z1, z2);
            } else {
                const NoiseEllipse &e = pointer.sigma[state];
                sample += Complex(e.major * z1, e.minor * z2) * std::polar(1.0, e.tilt);
            }
        }
        trace.samples[k] = sample;
    }
    return trace;
}

IQTrace simulate(const SystemParams &params, const PointerModel &pointer, const TrajectorySpec &spec) {
    return render_trace(params, pointer, sample_markov_path(params, spec), spec);
}

}  // namespace jumpscope
