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


#include "jumpscope/cli.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "jumpscope/io.hpp"
#include "jumpscope/manifest.hpp"
#include "test_support.hpp"

using namespace jumpscope;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> read_csv(const fs::path &path) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream cell_stream(line);
        std::string cell;
        while (std::getline(cell_stream, cell, ',')) {
            cells.push_back(cell);
        }
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST(cli, simulate_is_deterministic) {
    auto dir = fixtures::scratch_dir("cli_sim");
    for (const char *run : {"a", "b"}) {
        Result r = cli({"simulate", "--count", "1", "--seed", "7", "--out", (dir / run).string()});
        ASSERT_EQ(r.code, kExitOk) << r.err;
    }
    EXPECT_EQ(read_file(dir / "a" / "trace_7.bin"), read_file(dir / "b" / "trace_7.bin"));
    RunManifest m = parse_manifest(read_file(dir / "a" / "manifest.json"));
    EXPECT_EQ(m.command, "simulate");
    EXPECT_EQ(m.seeds, std::vector<uint64_t>{7});
    ASSERT_EQ(m.outputs.size(), 1u);
    EXPECT_EQ(m.outputs[0], record_file(dir / "a" / "trace_7.bin", "trace_7.bin"));
}

TEST(cli, simulate_writes_seed_range_and_header) {
    auto dir = fixtures::scratch_dir("cli_count");
    Result r = cli({"simulate", "--count", "3", "--seed", "10", "--duration", "1e-3", "--out", dir.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    for (int seed : {10, 11, 12}) {
        IQTrace t = load_trace(dir / ("trace_" + std::to_string(seed) + ".bin"));
        EXPECT_EQ(t.samples.size(), 31250u);
        EXPECT_EQ(t.dt, 32e-9);
        EXPECT_EQ(t.nbar, 56.0);
        EXPECT_TRUE(t.truth.has_value());
    }
    Result csv = cli({"simulate", "--seed", "10", "--format", "csv", "--out", (dir / "csv").string()});
    ASSERT_EQ(csv.code, kExitOk);
    EXPECT_EQ(load_trace(dir / "csv" / "trace_10.csv").samples, load_trace(dir / "trace_10.bin").samples);
}

TEST(cli, exit_codes) {
    auto dir = fixtures::scratch_dir("cli_errors");
    EXPECT_EQ(cli({}).code, kExitUsage);
    EXPECT_EQ(cli({"simulate"}).code, kExitUsage);
    EXPECT_EQ(cli({"simulate", "--out", dir.string(), "--format", "xml"}).code, kExitUsage);
    EXPECT_EQ(cli({"--help"}).code, kExitOk);

    write_file(dir / "blocker", "x");
    Result unwritable = cli({"simulate", "--out", (dir / "blocker" / "sub").string()});
    EXPECT_EQ(unwritable.code, kExitIo);
    EXPECT_FALSE(unwritable.err.empty());

    write_file(dir / "missing.cfg", "kappa_over_2pi_hz=1.1e6\nnbar=56\neta=0.6\nt1_s=2e-5\n");
    Result missing = cli({"simulate", "--config", (dir / "missing.cfg").string(), "--out", dir.string()});
    EXPECT_EQ(missing.code, kExitUsage);
    EXPECT_NE(missing.err.find("tau_s"), std::string::npos);

    EXPECT_EQ(cli({"simulate", "--config", (dir / "nope.cfg").string(), "--out", dir.string()}).code, kExitIo);
    EXPECT_EQ(cli({"sweep", "--axis", "tau", "--values", "", "--out", dir.string()}).code, kExitUsage);
    EXPECT_EQ(cli({"filter", "--trace", (dir / "none.bin").string(), "--out", dir.string()}).code, kExitIo);
}

TEST(cli, filter_rejects_tau_mismatch) {
    auto dir = fixtures::scratch_dir("cli_tau");
    ASSERT_EQ(cli({"simulate", "--seed", "1", "--out", dir.string()}).code, kExitOk);
    RawConfig raw = default_raw_config();
    raw["tau_s"] = "64e-9";
    write_file(dir / "slow.cfg", format_config(raw));
    Result r = cli({"filter", "--trace", (dir / "trace_1.bin").string(), "--config", (dir / "slow.cfg").string(),
                    "--out", (dir / "f").string()});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("tau_s"), std::string::npos);
}

TEST(cli, filter_outputs_and_replay) {
    auto dir = fixtures::scratch_dir("cli_filter");
    ASSERT_EQ(cli({"simulate", "--seed", "3", "--duration", "2e-4", "--out", dir.string()}).code, kExitOk);
    std::string trace = (dir / "trace_3.bin").string();
    Result r = cli({"filter", "--trace", trace, "--filter", "latch", "--out", (dir / "f").string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    auto events = read_csv(dir / "f" / "events.csv");
    ASSERT_FALSE(events.empty());
    EXPECT_EQ(events[0], (std::vector<std::string>{"from", "to", "depart_time_s", "declare_time_s",
                                                    "detection_time_s", "true_time_s"}));
    auto states = read_csv(dir / "f" / "states.csv");
    EXPECT_EQ(states.size(), 6250u + 1);
    EXPECT_EQ(states[0], (std::vector<std::string>{"index", "time_s", "state"}));

    Result replay = cli({"replay", "--manifest", (dir / "f" / "manifest.json").string()});
    EXPECT_EQ(replay.code, kExitOk) << replay.err;
    EXPECT_EQ(read_file(dir / "f" / "events.csv"), read_file(dir / "f" / "replay" / "events.csv"));

    Result sim_replay = cli({"replay", "--manifest", (dir / "manifest.json").string(), "--out",
                             (dir / "again").string()});
    EXPECT_EQ(sim_replay.code, kExitOk) << sim_replay.err;
    EXPECT_EQ(read_file(trace), read_file(dir / "again" / "trace_3.bin"));
}

TEST(cli, replay_detects_changes) {
    auto dir = fixtures::scratch_dir("cli_tamper");
    ASSERT_EQ(cli({"simulate", "--seed", "2", "--duration", "1e-4", "--out", dir.string()}).code, kExitOk);
    ASSERT_EQ(cli({"filter", "--trace", (dir / "trace_2.bin").string(), "--out", (dir / "f").string()}).code,
              kExitOk);

    RunManifest m = parse_manifest(read_file(dir / "manifest.json"));
    m.outputs[0].fnv1a64 = "0000000000000000";
    write_file(dir / "manifest.json", manifest_to_json(m));
    EXPECT_EQ(cli({"replay", "--manifest", (dir / "manifest.json").string()}).code, kExitNumerical);

    // The filter's recorded input no longer matches.
    write_file(dir / "trace_2.bin", "changed");
    EXPECT_EQ(cli({"replay", "--manifest", (dir / "f" / "manifest.json").string()}).code, kExitIo);
}

TEST(cli, filters_agree_on_well_separated_jumps) {
    auto dir = fixtures::scratch_dir("cli_agree");
    RawConfig raw = default_raw_config();
    raw["t1_s"] = "2e-4";
    raw["rate_g_e_hz"] = "1e4";
    raw["rate_e_f_hz"] = "5e3";
    raw["rate_f_e_hz"] = "1e4";
    write_file(dir / "slow.cfg", format_config(raw));
    std::string cfg = (dir / "slow.cfg").string();
    ASSERT_EQ(cli({"simulate", "--config", cfg, "--seed", "5", "--duration", "5e-3", "--out", dir.string()}).code,
              kExitOk);
    std::string trace = (dir / "trace_5.bin").string();
    for (const char *f : {"bayes", "latch"}) {
        ASSERT_EQ(cli({"filter", "--trace", trace, "--filter", f, "--config", cfg, "--out", (dir / f).string()}).code,
                  kExitOk);
    }
    IQTrace t = load_trace(trace);
    auto bayes = read_csv(dir / "bayes" / "states.csv");
    auto latch = read_csv(dir / "latch" / "states.csv");
    const auto &truth = *t.truth;
    size_t checked = 0, agree = 0;
    for (size_t k = 0; k < truth.size(); ++k) {
        double end = k + 1 < truth.size() ? truth[k + 1].start : t.duration();
        if (end - truth[k].start < 4e-6) {
            continue;
        }
        size_t row = static_cast<size_t>((end - 1e-6) / t.dt) + 1;
        std::string expected(state_name(truth[k].state));
        ++checked;
        agree += bayes[row][2] == expected && latch[row][2] == expected;
    }
    ASSERT_GT(checked, 20u);
    EXPECT_GE(static_cast<double>(agree), 0.95 * static_cast<double>(checked));
}

TEST(cli, sweep_analyze_and_efficiency) {
    auto dir = fixtures::scratch_dir("cli_sweep");
    Result sweep = cli({"sweep", "--axis", "tau", "--values", "32e-9,64e-9", "--per-point", "2", "--duration", "2e-4",
                        "--out", (dir / "sweep").string()});
    ASSERT_EQ(sweep.code, kExitOk) << sweep.err;
    auto rows = read_csv(dir / "sweep" / "sweep.csv");
    EXPECT_EQ(rows.size(), 1u + 2 * 2 * 3);
    EXPECT_EQ(rows[1][0], "tau");
    EXPECT_EQ(cli({"replay", "--manifest", (dir / "sweep" / "manifest.json").string()}).code, kExitOk);

    ASSERT_EQ(cli({"simulate", "--seed", "4", "--duration", "2e-3", "--out", dir.string()}).code, kExitOk);
    Result analyze = cli({"analyze", "--trace", (dir / "trace_4.bin").string(), "--out", (dir / "an").string()});
    ASSERT_EQ(analyze.code, kExitOk) << analyze.err;
    EXPECT_TRUE(fs::exists(dir / "an" / "fidelity.csv"));
    EXPECT_TRUE(fs::exists(dir / "an" / "histogram_ge.csv"));
    EXPECT_TRUE(fs::exists(dir / "an" / "detection.csv"));

    Result short_pairs =
        cli({"analyze", "--trace", (dir / "trace_4.bin").string(), "--delta-t", "1.99e-3", "--out", (dir / "x").string()});
    EXPECT_EQ(short_pairs.code, kExitNumerical);

    Result eff = cli({"efficiency", "--taus", "32e-9,128e-9,512e-9", "--duration", "3e-3", "--out",
                      (dir / "eff").string()});
    ASSERT_EQ(eff.code, kExitOk) << eff.err;
    auto fit = read_csv(dir / "eff" / "efficiency.csv");
    EXPECT_NEAR(std::stod(fit[1][0]), 0.6, 0.1);
}

TEST(cli, default_config_round_trips) {
    Result r = cli({"default-config"});
    ASSERT_EQ(r.code, kExitOk);
    EXPECT_EQ(parse_config_text(r.out), default_raw_config());
}
