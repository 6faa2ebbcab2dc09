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

#ifndef JUMPSCOPE_ANALYSIS_HPP
#define JUMPSCOPE_ANALYSIS_HPP

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "jumpscope/filters.hpp"
#include "jumpscope/model.hpp"

namespace jumpscope {

// ---------------------------------------------------------------------------
// Signal-to-noise
// ---------------------------------------------------------------------------

/// Mean and spread of the samples attributed to one state.
struct PointCloud {
    size_t count = 0;
    Complex mean{};
    double var_i = 0;
    double var_q = 0;

    /// sqrt(var_I + var_Q)
    double total_std() const;
};

/// Collects samples whose truth state is `state` and whose segment started at
/// least `settle_time` earlier, so transients are excluded.
PointCloud steady_state_cloud(const IQTrace &trace, State state, double settle_time);

/// |mean_E - mean_G| / (sigma_E + sigma_G), with sigma the total standard
/// deviation sqrt(sigma_I^2 + sigma_Q^2) of each settled cloud. Needs at least
/// `min_samples` settled samples per state; throws StatisticsError otherwise.
double empirical_snr(const IQTrace &trace, double settle_time, size_t min_samples = 1000);

/// |mean| / sqrt(sigma_I^2 + sigma_Q^2) of the settled cloud of `state`.
double empirical_snr_ss(const IQTrace &trace, State state, double settle_time, size_t min_samples = 1000);

struct SnrPoint {
    double tau = 0;
    double snr_ss = 0;
};

struct EfficiencyFit {
    double eta = 0;
    double eta_stderr = 0;
    double slope = 0;      // d(SNR_ss^2)/d(tau), 1/s
    double intercept = 0;  // SNR_ss^2 at tau = 0
    /// intercept / (slope * tau_b); 1 when the bandwidth model holds.
    double intercept_ratio = 0;
};

/// Least-squares line through SNR_ss^2 vs tau; eta = 4 * slope / (kappa * nbar).
/// Throws StatisticsError for fewer than three distinct tau values.
EfficiencyFit fit_efficiency(std::span<const SnrPoint> points, double kappa, double nbar, double tau_b);

// ---------------------------------------------------------------------------
// Detection statistics
// ---------------------------------------------------------------------------

struct Transition {
    State from = State::G;
    State to = State::E;
    bool operator==(const Transition &) const = default;
};

std::string transition_name(Transition t);

/// A ground-truth jump extracted from a segment list.
struct TruthJump {
    double time = 0;
    State from = State::G;
    State to = State::E;
};

std::vector<TruthJump> truth_jumps(const std::vector<Segment> &truth);

/// Declarations paired one-to-one with truth jumps of the same target state,
/// greedily by |declare_time - true_time| within `window`.
struct MatchSet {
    std::vector<std::pair<JumpEvent, TruthJump>> matched;  // event.true_time is set
    std::vector<JumpEvent> false_positives;
    std::vector<TruthJump> misses;
};

MatchSet match_events(std::span<const JumpEvent> events, const std::vector<Segment> &truth, double window);

struct Histogram {
    std::vector<double> edges;
    std::vector<uint64_t> counts;

    uint64_t total() const;
};

struct HistogramSpec {
    double bin_width = 0;
    double max = 0;  // values beyond max land in the last bin
};

/// Default binning: one sample wide, covering [0, 20 * tau_b].
HistogramSpec default_histogram(const SystemParams &params);

struct DetectionStats {
    Transition transition;
    size_t count = 0;
    double mean = 0;  // departure-referenced detection time, s
    double std = 0;
    double truth_mean = 0;  // declare_time - true jump time, s
    double truth_std = 0;
    Histogram histogram;
    double miss_rate = 0;
    double false_positive_rate = 0;
    size_t truth_count = 0;
    size_t declared_count = 0;
};

/// Statistics for `transition` over any number of independently matched traces.
DetectionStats summarize(std::span<const MatchSet> matches, Transition transition, const HistogramSpec &bins);

/// Matching window 5 * tau_b.
double default_match_window(const SystemParams &params);

DetectionStats detection_stats(
    std::span<const JumpEvent> events, const std::vector<Segment> &truth, Transition transition, double window,
    const HistogramSpec &bins);

// ---------------------------------------------------------------------------
// QND fidelity
// ---------------------------------------------------------------------------

enum class PairMode { Rolling, Disjoint };

struct QndReport {
    double p_ee = 0;
    double p_gg = 0;
    double fidelity = 0;
    size_t n_pairs = 0;
    size_t n_e = 0;
    size_t n_g = 0;
    double p_e_to_g = 0;  // loss channels conditioned on the first reading
    double p_e_to_f = 0;
    double p_g_to_e = 0;
};

/// Pairs filter readings separated by delta_t (rounded to whole samples).
/// Conditional probabilities with no conditioning pairs are NaN.
/// Throws StatisticsError with fewer than `min_pairs` pairs.
QndReport qnd_fidelity(
    std::span<const State> states, double dt, double delta_t, PairMode mode = PairMode::Rolling,
    size_t min_pairs = 1000);

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

enum class SweepAxis { Tau, Nbar };
SweepAxis parse_axis(std::string_view text);
std::string_view axis_name(SweepAxis axis);

enum class FilterKind { Bayes, Latch };
std::string_view filter_name(FilterKind f);
FilterKind parse_filter(std::string_view text);

struct SweepSettings {
    SweepAxis axis = SweepAxis::Tau;
    std::vector<double> values;
    size_t per_point = 1;
    double duration = 1e-3;
    uint64_t seed = 0;
    Predictor predictor = Predictor::Phase;
    std::vector<Transition> transitions{{State::G, State::E}};
    size_t threads = 1;
};

struct SweepPoint {
    double value = 0;
    std::vector<DetectionStats> bayes;  // one per transition, in settings order
    std::vector<DetectionStats> latch;
};

struct SweepResult {
    SweepAxis axis = SweepAxis::Tau;
    std::vector<SweepPoint> points;
};

/// Config with `axis` set to `value`; derived quantities are recomputed.
Config with_axis_value(const Config &base, SweepAxis axis, double value);

/// Simulate -> filter (both filters) -> detection statistics at each grid point.
/// Trace j of every point uses seed settings.seed + j. Values must be strictly increasing.
SweepResult run_sweep(const Config &base, const SweepSettings &settings);

}  // namespace jumpscope

#endif  // JUMPSCOPE_ANALYSIS_HPP
