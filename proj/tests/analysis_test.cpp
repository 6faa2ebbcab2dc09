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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "jumpscope/rng.hpp"
#include "jumpscope/sim.hpp"
#include "test_support.hpp"

using namespace jumpscope;

namespace {

JumpEvent event(State from, State to, double depart, double declare) {
    return {from, to, depart, declare, std::nullopt};
}

}  // namespace

TEST(analysis, identical_clouds_have_zero_snr) {
    IQTrace trace;
    trace.dt = 1e-8;
    for (int half = 0; half < 2; ++half) {
        for (int k = 0; k < 50; ++k) {
            trace.samples.emplace_back(std::cos(k * 0.7), std::sin(k * 1.3));
        }
    }
    trace.truth = std::vector<Segment>{{0.0, State::G}, {50 * trace.dt - 1e-12, State::E}};
    EXPECT_NEAR(empirical_snr(trace, 0.0, 10), 0.0, 1e-12);
    EXPECT_THROW(empirical_snr(trace, 0.0, 1000), StatisticsError);
}

TEST(analysis, snr_of_simulated_jumps_matches_formula) {
    Config cfg = fixtures::config();
    PointerModel pm = make_pointer_model(cfg.system);
    IQTrace trace = simulate(cfg.system, pm, {0.05, 3, State::G, NoiseMode::Isotropic});
    double settle = 5 * cfg.system.tau_b + cfg.system.tau;
    double expected = snr(cfg.system, phase_separation_ge(cfg.system));
    EXPECT_NEAR(empirical_snr(trace, settle) / expected, 1.0, 0.05);
}

TEST(analysis, efficiency_fit_inverts_exact_points) {
    SystemParams p = fixtures::config().system;
    std::vector<SnrPoint> points;
    for (double tau : {32e-9, 64e-9, 128e-9, 256e-9, 512e-9}) {
        SystemParams q = p;
        q.tau = tau;
        q.bandwidth_inv = tau + q.tau_b;
        points.push_back({tau, snr_ss(q)});
    }
    EfficiencyFit fit = fit_efficiency(points, p.kappa, p.nbar, p.tau_b);
    EXPECT_NEAR(fit.eta, 0.6, 1e-9);
    EXPECT_NEAR(fit.intercept_ratio, 1.0, 1e-9);
    EXPECT_NEAR(fit.eta_stderr, 0.0, 1e-9);

    for (SnrPoint &pt : points) {
        pt.snr_ss *= 2;
    }
    EXPECT_NEAR(fit_efficiency(points, p.kappa, p.nbar, p.tau_b).eta, 2.4, 1e-8);

    points.resize(2);
    EXPECT_THROW(fit_efficiency(points, p.kappa, p.nbar, p.tau_b), StatisticsError);
    points = {{32e-9, 4.0}, {32e-9, 4.1}, {64e-9, 4.5}};
    EXPECT_THROW(fit_efficiency(points, p.kappa, p.nbar, p.tau_b), StatisticsError);
}

TEST(analysis, efficiency_fit_from_simulated_traces) {
    Config base = fixtures::config();
    std::vector<SnrPoint> points;
    for (double tau : {32e-9, 64e-9, 128e-9, 256e-9, 512e-9}) {
        Config cfg = with_axis_value(base, SweepAxis::Tau, tau);
        cfg.system.rates = RateMatrix{};
        PointerModel pm = make_pointer_model(cfg.system);
        IQTrace trace = simulate(cfg.system, pm, {20000 * tau, 17, State::G, NoiseMode::Isotropic});
        points.push_back({tau, empirical_snr_ss(trace, State::G, 0.0)});
    }
    EfficiencyFit fit = fit_efficiency(points, base.system.kappa, base.system.nbar, base.system.tau_b);
    EXPECT_NEAR(fit.eta, 0.6, 0.05);
}

TEST(analysis, truth_jumps_skip_repeated_states) {
    std::vector<Segment> truth{{0, State::G}, {1, State::E}, {2, State::E}, {3, State::F}};
    auto jumps = truth_jumps(truth);
    ASSERT_EQ(jumps.size(), 2u);
    EXPECT_EQ(jumps[0].time, 1);
    EXPECT_EQ(jumps[1].from, State::E);
    EXPECT_EQ(jumps[1].to, State::F);
}

TEST(analysis, matching_is_greedy_one_to_one) {
    std::vector<Segment> truth{{0, State::G}, {10, State::E}, {20, State::G}, {21, State::E}};
    std::vector<JumpEvent> events{
        event(State::G, State::E, 10.5, 11),  // nearest to 10
        event(State::G, State::E, 21, 21.2),  // nearest to 21
        event(State::G, State::E, 12, 12.5),  // second claim on 10: false positive
        event(State::E, State::F, 30, 30.1),  // no F jump
    };
    MatchSet m = match_events(events, truth, 5.0);
    ASSERT_EQ(m.matched.size(), 2u);
    EXPECT_EQ(*m.matched[0].first.true_time, 10);
    EXPECT_EQ(m.matched[0].first.declare_time, 11);
    EXPECT_EQ(*m.matched[1].first.true_time, 21);
    EXPECT_EQ(m.false_positives.size(), 2u);
    ASSERT_EQ(m.misses.size(), 1u);
    EXPECT_EQ(m.misses[0].to, State::G);

    MatchSet narrow = match_events(events, truth, 0.1);
    EXPECT_TRUE(narrow.matched.empty());
}

TEST(analysis, matching_ignores_event_order) {
    Config cfg = fixtures::config();
    PointerModel pm = make_pointer_model(cfg.system);
    IQTrace trace = simulate(cfg.system, pm, {1e-3, 5, State::G, NoiseMode::Isotropic});
    FilterRun run = run_bayes(trace, cfg.system, pm, cfg.filter, Predictor::Phase);
    ASSERT_GT(run.events.size(), 10u);
    double window = default_match_window(cfg.system);
    HistogramSpec bins = default_histogram(cfg.system);
    DetectionStats reference = detection_stats(run.events, *trace.truth, {State::G, State::E}, window, bins);
    std::vector<JumpEvent> shuffled = run.events;
    CounterRng rng(3, 0u);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        DetectionStats s = detection_stats(shuffled, *trace.truth, {State::G, State::E}, window, bins);
        EXPECT_EQ(s.count, reference.count);
        EXPECT_EQ(s.mean, reference.mean);
        EXPECT_EQ(s.histogram.counts, reference.histogram.counts);
    }
}

TEST(analysis, single_event_statistics) {
    std::vector<Segment> truth{{0, State::G}, {1e-6, State::E}};
    std::vector<JumpEvent> events{event(State::G, State::E, 1.1e-6, 1.25e-6)};
    DetectionStats s = detection_stats(events, truth, {State::G, State::E}, 1e-6, {32e-9, 20 * 289e-9});
    EXPECT_EQ(s.count, 1u);
    EXPECT_NEAR(s.mean, 0.15e-6, 1e-18);
    EXPECT_EQ(s.std, 0);
    EXPECT_NEAR(s.truth_mean, 0.25e-6, 1e-18);
    EXPECT_EQ(s.miss_rate, 0);
    EXPECT_EQ(s.false_positive_rate, 0);
    EXPECT_EQ(s.histogram.total(), 1u);
    EXPECT_EQ(s.histogram.counts[4], 1u);  // 150 ns / 32 ns
}

TEST(analysis, histogram_binning) {
    SystemParams p = fixtures::config().system;
    HistogramSpec spec = default_histogram(p);
    EXPECT_EQ(spec.bin_width, p.tau);
    EXPECT_NEAR(spec.max, 20 * p.tau_b, 1e-18);
    std::vector<Segment> truth{{0, State::G}, {1e-6, State::E}, {2e-5, State::G}, {3e-5, State::E}};
    std::vector<JumpEvent> events{
        event(State::G, State::E, 1e-6, 1e-6),         // zero detection time
        event(State::G, State::E, 3e-5, 3e-5 + 1e-5),  // beyond the range
    };
    DetectionStats s = detection_stats(events, truth, {State::G, State::E}, 2e-5, spec);
    size_t nbins = s.histogram.counts.size();
    EXPECT_EQ(s.histogram.edges.size(), nbins + 1);
    EXPECT_GE(s.histogram.edges.back(), spec.max);
    EXPECT_EQ(s.histogram.counts.front(), 1u);
    EXPECT_EQ(s.histogram.counts.back(), 1u);
}

TEST(analysis, qnd_fidelity_counts_pairs) {
    std::vector<State> g(5000, State::G);
    QndReport r = qnd_fidelity(g, 32e-9, kQndWindow);
    EXPECT_EQ(r.p_gg, 1.0);
    EXPECT_TRUE(std::isnan(r.p_ee));
    EXPECT_EQ(r.n_pairs, 5000u - 14u);

    // E for 100 samples, then G: lag 2.
    std::vector<State> s(100, State::E);
    s.insert(s.end(), 100, State::G);
    QndReport q = qnd_fidelity(s, 1.0, 2.0, PairMode::Rolling, 10);
    EXPECT_EQ(q.n_pairs, 198u);
    EXPECT_EQ(q.n_e, 100u);
    EXPECT_NEAR(q.p_ee, 98.0 / 100, 1e-15);
    EXPECT_NEAR(q.p_e_to_g, 2.0 / 100, 1e-15);
    EXPECT_EQ(q.p_gg, 1.0);
    EXPECT_NEAR(q.fidelity, (0.98 + 1.0) / 2, 1e-15);

    QndReport d = qnd_fidelity(s, 1.0, 2.0, PairMode::Disjoint, 10);
    EXPECT_EQ(d.n_pairs, 99u);

    EXPECT_THROW(qnd_fidelity(s, 1.0, 2.0), StatisticsError);
}

TEST(analysis, sweep_point_matches_manual_pipeline) {
    Config base = fixtures::config();
    SweepSettings settings;
    settings.axis = SweepAxis::Nbar;
    settings.values = {56};
    settings.per_point = 2;
    settings.duration = 5e-4;
    settings.seed = 40;
    settings.threads = 2;
    SweepResult result = run_sweep(base, settings);
    ASSERT_EQ(result.points.size(), 1u);

    PointerModel pm = make_pointer_model(base.system);
    std::vector<MatchSet> bayes;
    std::vector<MatchSet> latch;
    for (uint64_t seed : {40u, 41u}) {
        IQTrace trace = simulate(base.system, pm, {5e-4, seed, State::G, NoiseMode::Isotropic});
        double w = default_match_window(base.system);
        bayes.push_back(match_events(run_bayes(trace, base.system, pm, base.filter, Predictor::Phase).events,
                                     *trace.truth, w));
        latch.push_back(match_events(run_latching(trace, pm, base.system).events, *trace.truth, w));
    }
    HistogramSpec bins = default_histogram(base.system);
    DetectionStats b = summarize(bayes, {State::G, State::E}, bins);
    DetectionStats l = summarize(latch, {State::G, State::E}, bins);
    EXPECT_EQ(result.points[0].bayes[0].count, b.count);
    EXPECT_EQ(result.points[0].bayes[0].mean, b.mean);
    EXPECT_EQ(result.points[0].latch[0].mean, l.mean);
    EXPECT_EQ(result.points[0].latch[0].histogram.counts, l.histogram.counts);
}

TEST(analysis, sweep_rejects_bad_grids) {
    Config base = fixtures::config();
    SweepSettings settings;
    EXPECT_THROW(run_sweep(base, settings), std::invalid_argument);
    settings.values = {64e-9, 32e-9};
    EXPECT_THROW(run_sweep(base, settings), std::invalid_argument);
}

TEST(analysis, with_axis_value_rederives) {
    Config base = fixtures::config();
    Config c = with_axis_value(base, SweepAxis::Tau, 128e-9);
    EXPECT_EQ(c.system.tau, 128e-9);
    EXPECT_EQ(c.system.bandwidth_inv, 128e-9 + c.system.tau_b);
    EXPECT_EQ(c.filter.beta, base.filter.beta);
    EXPECT_EQ(with_axis_value(base, SweepAxis::Nbar, 14).system.nbar, 14);
    EXPECT_EQ(parse_axis("nbar"), SweepAxis::Nbar);
    EXPECT_THROW(parse_axis("eta"), std::invalid_argument);
}
