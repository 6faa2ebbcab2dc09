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

#ifndef JUMPSCOPE_FILTERS_HPP
#define JUMPSCOPE_FILTERS_HPP

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "jumpscope/model.hpp"

namespace jumpscope {

/// Which classical trajectory the Bayesian filter uses as its likelihood mean.
enum class Predictor {
    Phase,    // exponential relaxation of the phase only
    Complex,  // full linear resonator response in the IQ plane
};

Predictor parse_predictor(std::string_view text);
std::string_view predictor_name(Predictor p);

/// Radius of the steady-state acceptance ellipses, in standard deviations.
inline constexpr double kEllipseRadius = 2.0;
/// Consecutive samples required for a latching declaration, and for a pointer
/// to count as settled back inside its ellipse.
inline constexpr int kLatchSamples = 3;

struct FilterState {
    PerState<double> probs{};
    State current = State::G;
    std::optional<Complex> last_sample;
    uint64_t degenerate_updates = 0;

    /// (1 - 2 * floor) on `initial`, `floor` elsewhere.
    static FilterState initial(State initial, const FilterParams &filter);
};

struct JumpEvent {
    State from = State::G;
    State to = State::G;
    double depart_time = 0;
    double declare_time = 0;
    std::optional<double> true_time;

    double detection_time() const { return declare_time - depart_time; }
    bool operator==(const JumpEvent &) const = default;
};

/// Expected pointer one integration time later under hypothesis `h`.
Complex predict_pointer(Complex alpha_t, State h, const SystemParams &params, const PointerModel &pointer);

/// Expected phase one integration time later under hypothesis `h`; the
/// offset from the steady-state phase is taken on the circle.
double predict_phase(double phi_t, State h, const SystemParams &params, const FilterParams &filter);

/// Clamps every probability to at least `floor` and rescales the rest so the
/// total is one. Requires 3 * floor < 1 and non-negative input with positive sum.
PerState<double> apply_floor(const PerState<double> &probs, double floor);

/// One recursive Bayesian step for precomputed likelihoods: posterior is
/// likelihood * prior normalized, floored, then checked against the threshold.
/// If every product underflows, the prior is kept and the degenerate counter is bumped.
FilterState bayes_step(const FilterState &state, const PerState<double> &likelihoods, const FilterParams &filter);

/// Recursive Bayesian filter with the predictor and noise model fixed up front.
class BayesFilter {
   public:
    BayesFilter(const SystemParams &params, const PointerModel &pointer, const FilterParams &filter, Predictor predictor);

    /// Likelihood of `observation` given the previous sample, for each hypothesis.
    PerState<double> likelihoods(Complex previous, Complex observation) const;
    /// Folds one observation. The first observation only primes last_sample.
    FilterState update(const FilterState &state, Complex observation) const;

    const FilterParams &filter() const { return filter_; }

   private:
    SystemParams params_;
    PointerModel pointer_;
    FilterParams filter_;
    Predictor predictor_;
    PerState<double> phase_decay_{};
    PerState<Complex> pointer_decay_{};
    PerState<double> inv_two_var_{};
};

/// bayes_update with a complex observation.
FilterState bayes_update(
    const FilterState &state, Complex observation, const SystemParams &params, const PointerModel &pointer,
    const FilterParams &filter, Predictor predictor);

/// Phase-only update; `observation` is a phase in radians and the previous
/// sample is interpreted by its phase.
FilterState bayes_update(
    const FilterState &state, double observation, const SystemParams &params, const PointerModel &pointer,
    const FilterParams &filter);

/// Tracks when the pointer leaves the 2-sigma ellipse of the declared state.
/// The first exit is kept through brief re-entries; it is cleared only once
/// kLatchSamples consecutive samples sit back inside the ellipse.
class DepartureTracker {
   public:
    explicit DepartureTracker(const PointerModel &pointer) : pointer_(&pointer) {}

    void observe(Complex sample, double t, State current);
    std::optional<double> depart_time() const { return depart_; }
    void reset();

   private:
    const PointerModel *pointer_;
    std::optional<double> depart_;
    int inside_run_ = 0;
};

struct FilterRun {
    std::vector<State> states;                  // declared state after each sample
    std::vector<PerState<double>> probs;        // Bayesian posteriors (empty for latching)
    std::vector<JumpEvent> events;
    uint64_t degenerate_updates = 0;
};

FilterRun run_bayes(
    const IQTrace &trace, const SystemParams &params, const PointerModel &pointer, const FilterParams &filter,
    Predictor predictor, State initial = State::G);

/// Latching filter: declares a jump to H once kLatchSamples consecutive samples
/// fall inside H's 2-sigma ellipse (nearest ellipse wins when they overlap).
FilterRun run_latching(
    const IQTrace &trace, const PointerModel &pointer, const SystemParams &params, State initial = State::G);

}  // namespace jumpscope

#endif  // JUMPSCOPE_FILTERS_HPP
