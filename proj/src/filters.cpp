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

#include "jumpscope/filters.hpp"

#include <cmath>
#include <string>

namespace jumpscope {

Predictor parse_predictor(std::string_view text) {
    if (text == "phase") {
        return Predictor::Phase;
    }
    if (text == "complex") {
        return Predictor::Complex;
    }
    throw std::invalid_argument("unknown predictor '" + std::string(text) + "' (expected phase|complex)");
}

std::string_view predictor_name(Predictor p) { return p == Predictor::Phase ? "phase" : "complex"; }

FilterState FilterState::initial(State initial, const FilterParams &filter) {
    FilterState state;
    for (State s : kAllStates) {
        state.probs[s] = s == initial ? 1.0 - 2.0 * filter.floor : filter.floor;
    }
    state.current = initial;
    return state;
}

Complex predict_pointer(Complex alpha_t, State h, const SystemParams &params, const PointerModel &pointer) {
    return evolve_pointer(alpha_t, pointer.alpha[h], pointer.detuning[h], params.kappa, params.tau);
}

double predict_phase(double phi_t, State h, const SystemParams &params, const FilterParams &filter) {
    double target = params.phi[h];
    double offset = wrap_angle(phi_t - target);
    return wrap_angle(offset * std::exp(-filter.c[h] * params.kappa * params.tau / 2.0) + target);
}

PerState<double> apply_floor(const PerState<double> &probs, double floor) {
    std::array<bool, kNumStates> clamped{};
    PerState<double> out;
    // At most three passes: each pass either terminates or clamps another state.
    for (size_t pass = 0; pass <= kNumStates; ++pass) {
        double free_mass = 1.0;
        double free_total = 0;
        for (State s : kAllStates) {
            if (clamped[index_of(s)]) {
                free_mass -= floor;
            } else {
                free_total += probs[s];
            }
        }
        bool changed = false;
        for (State s : kAllStates) {
            if (clamped[index_of(s)]) {
                out[s] = floor;
                continue;
            }
            out[s] = free_total > 0 ? probs[s] * (free_mass / free_total) : floor;
            if (out[s] < floor) {
                clamped[index_of(s)] = true;
                changed = true;
            }
        }
        if (!changed) {
            break;
        }
    }
    return out;
}

FilterState bayes_step(const FilterState &state, const PerState<double> &likelihoods, const FilterParams &filter) {
    FilterState next = state;
    PerState<double> joint;
    double total = 0;
    for (State s : kAllStates) {
        joint[s] = likelihoods[s] * state.probs[s];
        total += joint[s];
    }
    if (!(total > 0) || !std::isfinite(total)) {
        // Every hypothesis is equally implausible: keep the prior.
        ++next.degenerate_updates;
        return next;
    }
    for (State s : kAllStates) {
        joint[s] /= total;
    }
    next.probs = apply_floor(joint, filter.floor);

    State best = State::G;
    for (State s : kAllStates) {
        if (next.probs[s] > next.probs[best]) {
            best = s;
        }
    }
    if (next.probs[best] >= filter.threshold && best != next.current) {
        next.current = best;
    }
    return next;
}

BayesFilter::BayesFilter(
    const SystemParams &params, const PointerModel &pointer, const FilterParams &filter, Predictor predictor)
    : params_(params), pointer_(pointer), filter_(filter), predictor_(predictor) {
    filter_.validate();
    for (State h : kAllStates) {
        double beta = filter_.beta[h];
        phase_decay_[h] = std::exp(-filter_.c[h] * params_.kappa * params_.tau / 2.0);
        pointer_decay_[h] = std::exp(Complex(-0.5 * params_.kappa * params_.tau, pointer_.detuning[h] * params_.tau));
        if (predictor_ == Predictor::Phase) {
            double sigma = beta * pointer_.phase_std(h);
            inv_two_var_[h] = 1.0 / (2.0 * sigma * sigma);
        } else {
            inv_two_var_[h] = 1.0 / (2.0 * beta * beta);
        }
    }
}

PerState<double> BayesFilter::likelihoods(Complex previous, Complex observation) const {
    PerState<double> out;
    if (predictor_ == Predictor::Phase) {
        double phi_prev = std::arg(previous);
        double phi_obs = std::arg(observation);
        for (State h : kAllStates) {
            double target = params_.phi[h];
            double predicted = wrap_angle(wrap_angle(phi_prev - target) * phase_decay_[h] + target);
            double r = wrap_angle(phi_obs - predicted);
            out[h] = std::exp(-r * r * inv_two_var_[h]);
        }
    } else {
        for (State h : kAllStates) {
            Complex predicted = (previous - pointer_.alpha[h]) * pointer_decay_[h] + pointer_.alpha[h];
            double d2 = pointer_.sigma[h].mahalanobis_sq(observation - predicted);
            out[h] = std::exp(-d2 * inv_two_var_[h]);
        }
    }
    return out;
}

FilterState BayesFilter::update(const FilterState &state, Complex observation) const {
    if (!state.last_sample) {
        FilterState next = state;
        next.last_sample = observation;
        return next;
    }
    FilterState next = bayes_step(state, likelihoods(*state.last_sample, observation), filter_);
    next.last_sample = observation;
    return next;
}

FilterState bayes_update(
    const FilterState &state, Complex observation, const SystemParams &params, const PointerModel &pointer,
    const FilterParams &filter, Predictor predictor) {
    return BayesFilter(params, pointer, filter, predictor).update(state, observation);
}

FilterState bayes_update(
    const FilterState &state, double observation, const SystemParams &params, const PointerModel &pointer,
    const FilterParams &filter) {
    return bayes_update(state, std::polar(1.0, observation), params, pointer, filter, Predictor::Phase);
}

void DepartureTracker::observe(Complex sample, double t, State current) {
    bool inside = pointer_->sigma[current].contains(sample - pointer_->alpha[current], kEllipseRadius);
    if (inside) {
        if (++inside_run_ >= kLatchSamples) {
            depart_.reset();
        }
    } else {
        inside_run_ = 0;
        if (!depart_) {
            depart_ = t;
        }
    }
}

void DepartureTracker::reset() {
    depart_.reset();
    inside_run_ = 0;
}

FilterRun run_bayes(
    const IQTrace &trace, const SystemParams &params, const PointerModel &pointer, const FilterParams &filter,
    Predictor predictor, State initial) {
    trace.validate();
    BayesFilter bayes(params, pointer, filter, predictor);
    DepartureTracker departure(pointer);
    FilterRun run;
    run.states.reserve(trace.samples.size());
    run.probs.reserve(trace.samples.size());

    FilterState state = FilterState::initial(initial, filter);
    for (size_t k = 0; k < trace.samples.size(); ++k) {
        double t = trace.time_of(k);
        Complex sample = trace.samples[k];
        departure.observe(sample, t, state.current);
        State before = state.current;
        state = bayes.update(state, sample);
        if (state.current != before) {
            run.events.push_back({before, state.current, departure.depart_time().value_or(t), t, std::nullopt});
            departure.reset();
        }
        run.states.push_back(state.current);
        run.probs.push_back(state.probs);
    }
    run.degenerate_updates = state.degenerate_updates;
    return run;
}

FilterRun run_latching(const IQTrace &trace, const PointerModel &pointer, const SystemParams &, State initial) {
    trace.validate();
    DepartureTracker departure(pointer);
    FilterRun run;
    run.states.reserve(trace.samples.size());

    State current = initial;
    std::optional<State> candidate;
    int run_length = 0;
    for (size_t k = 0; k < trace.samples.size(); ++k) {
        double t = trace.time_of(k);
        Complex sample = trace.samples[k];
        departure.observe(sample, t, current);

        std::optional<State> nearest;
        double best = kEllipseRadius * kEllipseRadius;
        for (State h : kAllStates) {
            double d2 = pointer.sigma[h].mahalanobis_sq(sample - pointer.alpha[h]);
            if (d2 <= best) {
                best = d2;
                nearest = h;
            }
        }
        if (nearest && *nearest != current) {
            run_length = nearest == candidate ? run_length + 1 : 1;
            candidate = nearest;
        } else {
            run_length = 0;
            candidate.reset();
        }
        if (run_length >= kLatchSamples) {
            run.events.push_back({current, *candidate, departure.depart_time().value_or(t), t, std::nullopt});
            current = *candidate;
            departure.reset();
            run_length = 0;
            candidate.reset();
        }
        run.states.push_back(current);
    }
    return run;
}

}  // namespace jumpscope
