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

#include "jumpscope/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "jumpscope/parallel.hpp"
#include "jumpscope/sim.hpp"

namespace jumpscope {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_truth(const IQTrace &trace) {
    if (!trace.truth) {
        throw StatisticsError("trace has no ground-truth annotation");
    }
}

PointCloud require_cloud(const IQTrace &trace, State state, double settle_time, size_t min_samples) {
    PointCloud cloud = steady_state_cloud(trace, state, settle_time);
    if (cloud.count < min_samples) {
        throw StatisticsError(
            "need at least " + std::to_string(min_samples) + " settled samples in state " +
            std::string(state_name(state)) + ", have " + std::to_string(cloud.count));
    }
    return cloud;
}

struct MeanStd {
    double mean = 0;
    double std = 0;
};

MeanStd mean_std(const std::vector<double> &values) {
    if (values.empty()) {
        return {kNaN, kNaN};
    }
    double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

}  // namespace

double PointCloud::total_std() const { return std::sqrt(var_i + var_q); }

PointCloud steady_state_cloud(const IQTrace &trace, State state, double settle_time) {
    trace.validate();
    require_truth(trace);
    const auto &truth = *trace.truth;
    PointCloud cloud;
    // Welford accumulation per quadrature.
    double mean_i = 0;
    double mean_q = 0;
    double m2_i = 0;
    double m2_q = 0;
    size_t seg = 0;
    for (size_t k = 0; k < trace.samples.size(); ++k) {
        double t = trace.time_of(k);
        while (seg + 1 < truth.size() && truth[seg + 1].start <= t) {
            ++seg;
        }
        // The initial segment starts in steady state.
        double since = seg == 0 ? std::numeric_limits<double>::infinity() : t - truth[seg].start;
        if (truth[seg].state != state || since < settle_time) {
            continue;
        }
        ++cloud.count;
        double n = static_cast<double>(cloud.count);
        Complex x = trace.samples[k];
        double di = x.real() - mean_i;
        double dq = x.imag() - mean_q;
        mean_i += di / n;
        mean_q += dq / n;
        m2_i += di * (x.real() - mean_i);
        m2_q += dq * (x.imag() - mean_q);
    }
    cloud.mean = Complex(mean_i, mean_q);
    if (cloud.count > 1) {
        cloud.var_i = m2_i / static_cast<double>(cloud.count - 1);
        cloud.var_q = m2_q / static_cast<double>(cloud.count - 1);
    }
    return cloud;
}

double empirical_snr(const IQTrace &trace, double settle_time, size_t min_samples) {
    PointCloud g = require_cloud(trace, State::G, settle_time, min_samples);
    PointCloud e = require_cloud(trace, State::E, settle_time, min_samples);
    return std::abs(e.mean - g.mean) / (e.total_std() + g.total_std());
}

double empirical_snr_ss(const IQTrace &trace, State state, double settle_time, size_t min_samples) {
    PointCloud c = require_cloud(trace, state, settle_time, min_samples);
    return std::abs(c.mean) / c.total_std();
}

EfficiencyFit fit_efficiency(std::span<const SnrPoint> points, double kappa, double nbar, double tau_b) {
    std::vector<double> taus;
    for (const SnrPoint &p : points) {
        taus.push_back(p.tau);
    }
    std::sort(taus.begin(), taus.end());
    if (std::unique(taus.begin(), taus.end()) - taus.begin() < 3) {
        throw StatisticsError("efficiency fit needs at least three distinct integration times");
    }
    double n = static_cast<double>(points.size());
    double mx = 0;
    double my = 0;
    for (const SnrPoint &p : points) {
        mx += p.tau;
        my += p.snr_ss * p.snr_ss;
    }
    mx /= n;
    my /= n;
    double sxx = 0;
    double sxy = 0;
    for (const SnrPoint &p : points) {
        sxx += (p.tau - mx) * (p.tau - mx);
        sxy += (p.tau - mx) * (p.snr_ss * p.snr_ss - my);
    }
    if (!(sxx > 0)) {
        throw StatisticsError("efficiency fit is rank deficient");
    }
    EfficiencyFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0;
    for (const SnrPoint &p : points) {
        double r = p.snr_ss * p.snr_ss - (fit.intercept + fit.slope * p.tau);
        rss += r * r;
    }
    double slope_stderr = points.size() > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0;
    fit.eta = 4.0 * fit.slope / (kappa * nbar);
    fit.eta_stderr = 4.0 * slope_stderr / (kappa * nbar);
    fit.intercept_ratio = fit.intercept / (fit.slope * tau_b);
    return fit;
}

std::string transition_name(Transition t) {
    return std::string(state_name(t.from)) + std::string(state_name(t.to));
}

std::vector<TruthJump> truth_jumps(const std::vector<Segment> &truth) {
    std::vector<TruthJump> jumps;
    for (size_t k = 1; k < truth.size(); ++k) {
        if (truth[k].state != truth[k - 1].state) {
            jumps.push_back({truth[k].start, truth[k - 1].state, truth[k].state});
        }
    }
    return jumps;
}

MatchSet match_events(std::span<const JumpEvent> events, const std::vector<Segment> &truth, double window) {
    std::vector<JumpEvent> declared(events.begin(), events.end());
    // Canonical order makes the matching independent of the input order.
    std::sort(declared.begin(), declared.end(), [](const JumpEvent &a, const JumpEvent &b) {
        return std::tie(a.declare_time, a.depart_time, a.from, a.to) <
               std::tie(b.declare_time, b.depart_time, b.from, b.to);
    });
    std::vector<TruthJump> jumps = truth_jumps(truth);

    struct Candidate {
        double distance;
        size_t event;
        size_t jump;
    };
    std::vector<Candidate> candidates;
    for (size_t i = 0; i < declared.size(); ++i) {
        double t = declared[i].declare_time;
        auto lo = std::lower_bound(
            jumps.begin(), jumps.end(), t - window, [](const TruthJump &j, double v) { return j.time < v; });
        for (auto it = lo; it != jumps.end() && it->time <= t + window; ++it) {
            if (it->to == declared[i].to) {
                candidates.push_back({std::abs(t - it->time), i, static_cast<size_t>(it - jumps.begin())});
            }
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate &a, const Candidate &b) {
        return std::tie(a.distance, a.event, a.jump) < std::tie(b.distance, b.event, b.jump);
    });

    std::vector<bool> event_used(declared.size(), false);
    std::vector<bool> jump_used(jumps.size(), false);
    MatchSet out;
    for (const Candidate &c : candidates) {
        if (event_used[c.event] || jump_used[c.jump]) {
            continue;
        }
        event_used[c.event] = true;
        jump_used[c.jump] = true;
        JumpEvent e = declared[c.event];
        e.true_time = jumps[c.jump].time;
        out.matched.emplace_back(e, jumps[c.jump]);
    }
    std::sort(out.matched.begin(), out.matched.end(), [](const auto &a, const auto &b) {
        return a.second.time < b.second.time;
    });
    for (size_t i = 0; i < declared.size(); ++i) {
        if (!event_used[i]) {
            out.false_positives.push_back(declared[i]);
        }
    }
    for (size_t j = 0; j < jumps.size(); ++j) {
        if (!jump_used[j]) {
            out.misses.push_back(jumps[j]);
        }
    }
    return out;
}

uint64_t Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), uint64_t{0}); }

HistogramSpec default_histogram(const SystemParams &params) { return {params.tau, 20.0 * params.tau_b}; }

double default_match_window(const SystemParams &params) { return 5.0 * params.tau_b; }

DetectionStats summarize(std::span<const MatchSet> matches, Transition transition, const HistogramSpec &bins) {
    if (!(bins.bin_width > 0) || !(bins.max > 0)) {
        throw DomainError("histogram needs a positive bin width and range");
    }
    DetectionStats stats;
    stats.transition = transition;
    size_t nbins = static_cast<size_t>(std::ceil(bins.max / bins.bin_width - 1e-9));
    nbins = std::max<size_t>(nbins, 1);
    for (size_t b = 0; b <= nbins; ++b) {
        stats.histogram.edges.push_back(static_cast<double>(b) * bins.bin_width);
    }
    stats.histogram.counts.assign(nbins, 0);

    std::vector<double> detection;
    std::vector<double> truth_referenced;
    size_t misses = 0;
    size_t false_positives = 0;
    for (const MatchSet &m : matches) {
        for (const auto &[event, jump] : m.matched) {
            if (jump.from != transition.from || jump.to != transition.to) {
                continue;
            }
            detection.push_back(event.detection_time());
            truth_referenced.push_back(event.declare_time - jump.time);
            ++stats.declared_count;
            ++stats.truth_count;
        }
        for (const TruthJump &j : m.misses) {
            if (j.from == transition.from && j.to == transition.to) {
                ++misses;
                ++stats.truth_count;
            }
        }
        for (const JumpEvent &e : m.false_positives) {
            if (e.from == transition.from && e.to == transition.to) {
                ++false_positives;
                ++stats.declared_count;
            }
        }
    }
    stats.count = detection.size();
    MeanStd d = mean_std(detection);
    MeanStd t = mean_std(truth_referenced);
    stats.mean = d.mean;
    stats.std = d.std;
    stats.truth_mean = t.mean;
    stats.truth_std = t.std;
    for (double v : detection) {
        size_t b = static_cast<size_t>(std::max(0.0, std::floor(v / bins.bin_width)));
        stats.histogram.counts[std::min(b, nbins - 1)] += 1;
    }
    stats.miss_rate = stats.truth_count ? static_cast<double>(misses) / static_cast<double>(stats.truth_count) : 0.0;
    stats.false_positive_rate =
        stats.declared_count ? static_cast<double>(false_positives) / static_cast<double>(stats.declared_count) : 0.0;
    return stats;
}

DetectionStats detection_stats(
    std::span<const JumpEvent> events, const std::vector<Segment> &truth, Transition transition, double window,
    const HistogramSpec &bins) {
    MatchSet m = match_events(events, truth, window);
    return summarize(std::span<const MatchSet>(&m, 1), transition, bins);
}

QndReport qnd_fidelity(std::span<const State> states, double dt, double delta_t, PairMode mode, size_t min_pairs) {
    if (!(dt > 0) || !(delta_t > 0)) {
        throw DomainError("qnd_fidelity needs positive dt and delta_t");
    }
    size_t lag = static_cast<size_t>(std::llround(delta_t / dt));
    lag = std::max<size_t>(lag, 1);
    size_t stride = mode == PairMode::Rolling ? 1 : lag;
    QndReport r;
    size_t ee = 0;
    size_t gg = 0;
    size_t eg = 0;
    size_t ef = 0;
    size_t ge = 0;
    for (size_t k = 0; k + lag < states.size(); k += stride) {
        State a = states[k];
        State b = states[k + lag];
        ++r.n_pairs;
        if (a == State::E) {
            ++r.n_e;
            ee += b == State::E;
            eg += b == State::G;
            ef += b == State::F;
        } else if (a == State::G) {
            ++r.n_g;
            gg += b == State::G;
            ge += b == State::E;
        }
    }
    if (r.n_pairs < min_pairs) {
        throw StatisticsError(
            "need at least " + std::to_string(min_pairs) + " measurement pairs, have " + std::to_string(r.n_pairs));
    }
    auto ratio = [](size_t num, size_t den) {
        return den ? static_cast<double>(num) / static_cast<double>(den) : kNaN;
    };
    r.p_ee = ratio(ee, r.n_e);
    r.p_gg = ratio(gg, r.n_g);
    r.p_e_to_g = ratio(eg, r.n_e);
    r.p_e_to_f = ratio(ef, r.n_e);
    r.p_g_to_e = ratio(ge, r.n_g);
    r.fidelity = (r.p_ee + r.p_gg) / 2.0;
    return r;
}

SweepAxis parse_axis(std::string_view text) {
    if (text == "tau") {
        return SweepAxis::Tau;
    }
    if (text == "nbar") {
        return SweepAxis::Nbar;
    }
    throw std::invalid_argument("unknown sweep axis '" + std::string(text) + "' (expected tau|nbar)");
}

std::string_view axis_name(SweepAxis axis) { return axis == SweepAxis::Tau ? "tau" : "nbar"; }

std::string_view filter_name(FilterKind f) { return f == FilterKind::Bayes ? "bayes" : "latch"; }

FilterKind parse_filter(std::string_view text) {
    if (text == "bayes") {
        return FilterKind::Bayes;
    }
    if (text == "latch") {
        return FilterKind::Latch;
    }
    throw std::invalid_argument("unknown filter '" + std::string(text) + "' (expected bayes|latch)");
}

Config with_axis_value(const Config &base, SweepAxis axis, double value) {
    RawConfig raw = base.raw;
    raw[axis == SweepAxis::Tau ? "tau_s" : "nbar"] = format_number(value);
    return derive_config(raw);
}

SweepResult run_sweep(const Config &base, const SweepSettings &settings) {
    if (settings.values.empty()) {
        throw std::invalid_argument("sweep needs at least one value");
    }
    for (size_t k = 1; k < settings.values.size(); ++k) {
        if (!(settings.values[k] > settings.values[k - 1])) {
            throw std::invalid_argument("sweep values must be strictly increasing");
        }
    }
    if (settings.per_point == 0) {
        throw std::invalid_argument("sweep needs at least one trace per point");
    }

    size_t npoints = settings.values.size();
    std::vector<Config> configs;
    for (double v : settings.values) {
        configs.push_back(with_axis_value(base, settings.axis, v));
    }

    // One job per (point, trace); each job owns its slot.
    std::vector<MatchSet> bayes_matches(npoints * settings.per_point);
    std::vector<MatchSet> latch_matches(npoints * settings.per_point);
    parallel_for(npoints * settings.per_point, settings.threads, [&](size_t job) {
        const Config &cfg = configs[job / settings.per_point];
        size_t j = job % settings.per_point;
        PointerModel pointer = make_pointer_model(cfg.system, cfg.squeeze);
        TrajectorySpec spec;
        spec.duration = settings.duration;
        spec.seed = settings.seed + j;
        spec.noise = cfg.squeeze ? NoiseMode::Squeezed : NoiseMode::Isotropic;
        IQTrace trace = simulate(cfg.system, pointer, spec);
        double window = default_match_window(cfg.system);
        FilterRun bayes = run_bayes(trace, cfg.system, pointer, cfg.filter, settings.predictor);
        FilterRun latch = run_latching(trace, pointer, cfg.system);
        bayes_matches[job] = match_events(bayes.events, *trace.truth, window);
        latch_matches[job] = match_events(latch.events, *trace.truth, window);
    });

    SweepResult result;
    result.axis = settings.axis;
    for (size_t p = 0; p < npoints; ++p) {
        SweepPoint point;
        point.value = settings.values[p];
        HistogramSpec bins = default_histogram(configs[p].system);
        std::span<const MatchSet> b(bayes_matches.data() + p * settings.per_point, settings.per_point);
        std::span<const MatchSet> l(latch_matches.data() + p * settings.per_point, settings.per_point);
        for (Transition t : settings.transitions) {
            point.bayes.push_back(summarize(b, t, bins));
            point.latch.push_back(summarize(l, t, bins));
        }
        result.points.push_back(std::move(point));
    }
    return result;
}

}  // namespace jumpscope
