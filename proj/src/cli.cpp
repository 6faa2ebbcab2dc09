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

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "jumpscope/analysis.hpp"
#include "jumpscope/filters.hpp"
#include "jumpscope/io.hpp"
#include "jumpscope/manifest.hpp"
#include "jumpscope/parallel.hpp"
#include "jumpscope/sim.hpp"

namespace jumpscope {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr std::string_view kDefaultTaus = "32e-9,64e-9,128e-9,256e-9,512e-9,1024e-9";

// Replay substitutes the recorded config and a fresh output directory.
struct Overrides {
    std::optional<RawConfig> config;
    std::optional<fs::path> out;
};

struct SimulateOptions {
    std::string config;
    double duration = 1e-3;
    uint64_t seed = 0;
    size_t count = 1;
    std::string out;
    std::string format = "bin";
    std::string initial = "g";
};

struct FilterOptions {
    std::string trace;
    std::string filter = "bayes";
    std::string predictor = "phase";
    std::string config;
    std::string out;
    std::string initial = "g";
};

struct AnalyzeOptions {
    FilterOptions filter;
    double delta_t = kQndWindow;
    std::string pairs = "rolling";
};

struct SweepOptions {
    std::string axis;
    std::string values;
    size_t per_point = 1;
    double duration = 1e-3;
    uint64_t seed = 0;
    std::string predictor = "phase";
    std::string transitions = "ge,eg,ef";
    std::string config;
    std::string out;
};

struct EfficiencyOptions {
    std::string taus{kDefaultTaus};
    double duration = 5e-3;
    uint64_t seed = 0;
    std::string config;
    std::string out;
};

struct ReplayOptions {
    std::string manifest;
    std::string out;
};

std::vector<std::string_view> split_list(std::string_view text) {
    std::vector<std::string_view> items;
    if (text.empty()) {
        return items;
    }
    size_t start = 0;
    while (true) {
        size_t comma = text.find(',', start);
        items.push_back(text.substr(start, comma == std::string_view::npos ? comma : comma - start));
        if (comma == std::string_view::npos) {
            return items;
        }
        start = comma + 1;
    }
}

std::vector<double> parse_values(std::string_view key, std::string_view text) {
    std::vector<double> values;
    for (std::string_view item : split_list(text)) {
        values.push_back(parse_number(key, item));
    }
    return values;
}

std::vector<Transition> parse_transitions(std::string_view text) {
    std::vector<Transition> result;
    for (std::string_view item : split_list(text)) {
        if (item.size() != 2) {
            throw std::invalid_argument("transition '" + std::string(item) + "' must be two state letters, e.g. ge");
        }
        Transition t{parse_state(item.substr(0, 1)), parse_state(item.substr(1, 1))};
        if (t.from == t.to) {
            throw std::invalid_argument("transition '" + std::string(item) + "' does not change state");
        }
        result.push_back(t);
    }
    if (result.empty()) {
        throw std::invalid_argument("at least one transition is required");
    }
    return result;
}

std::optional<State> parse_initial(std::string_view text) {
    if (text == "stationary") {
        return std::nullopt;
    }
    return parse_state(text);
}

RawConfig load_config(const std::string &path, const Overrides &ov) {
    if (ov.config) {
        return *ov.config;
    }
    if (path.empty()) {
        return default_raw_config();
    }
    return read_config_file(path);
}

/// Collects output files and writes the manifest once every output exists.
class RunRecorder {
   public:
    RunRecorder(std::string command, std::vector<std::string> argv, const std::string &out, const Overrides &ov)
        : start_(Clock::now()), dir_(ov.out ? *ov.out : fs::path(out)) {
        manifest_.command = std::move(command);
        manifest_.argv = std::move(argv);
        manifest_.threads = default_thread_count();
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) {
            throw IoError("cannot create output directory '" + dir_.string() + "'");
        }
    }

    const fs::path &dir() const { return dir_; }
    RunManifest &manifest() { return manifest_; }

    /// Writes one file; safe to call from one worker per name.
    FileRecord write(const std::string &name, const std::string &content) const {
        write_file(dir_ / name, content);
        return record_bytes(name, content);
    }

    void add(FileRecord record) { manifest_.outputs.push_back(std::move(record)); }
    void emit(const std::string &name, const std::string &content) { add(write(name, content)); }

    void finish() {
        manifest_.wall_clock_s = std::chrono::duration<double>(Clock::now() - start_).count();
        write_file(dir_ / "manifest.json", manifest_to_json(manifest_));
    }

   private:
    Clock::time_point start_;
    fs::path dir_;
    RunManifest manifest_;
};

template <typename Writer>
std::string to_text(Writer &&writer) {
    std::ostringstream buffer;
    writer(buffer);
    return buffer.str();
}

int cmd_simulate(const SimulateOptions &o, const std::vector<std::string> &argv, const Overrides &ov, std::ostream &out) {
    RawConfig raw = load_config(o.config, ov);
    Config config = derive_config(raw);
    TraceFormat format = parse_trace_format(o.format);
    std::optional<State> initial = parse_initial(o.initial);
    if (o.count == 0) {
        throw std::invalid_argument("--count must be at least 1");
    }
    PointerModel pointer = make_pointer_model(config.system, config.squeeze);

    RunRecorder run("simulate", argv, o.out, ov);
    run.manifest().config = raw;
    std::vector<FileRecord> records(o.count);
    parallel_for(o.count, run.manifest().threads, [&](size_t i) {
        TrajectorySpec spec;
        spec.duration = o.duration;
        spec.seed = o.seed + i;
        spec.initial_state = initial;
        spec.noise = config.squeeze ? NoiseMode::Squeezed : NoiseMode::Isotropic;
        IQTrace trace = simulate(config.system, pointer, spec);
        std::string name = "trace_" + std::to_string(spec.seed) + std::string(trace_format_extension(format));
        records[i] = run.write(name, to_text([&](std::ostream &s) {
            format == TraceFormat::Binary ? write_trace_binary(s, trace) : write_trace_csv(s, trace);
        }));
    });
    for (size_t i = 0; i < o.count; ++i) {
        run.manifest().seeds.push_back(o.seed + i);
        run.add(records[i]);
    }
    run.finish();
    out << "wrote " << o.count << " trace(s) of " << sample_count(o.duration, config.system.tau)
        << " samples to " << run.dir().string() << "\n";
    return kExitOk;
}

struct FilterInputs {
    IQTrace trace;
    RawConfig raw;
    Config config;
    PointerModel pointer;
    FilterKind kind = FilterKind::Bayes;
    FilterRun run;
    FileRecord input;
};

FilterInputs filter_trace(const FilterOptions &o, const Overrides &ov) {
    FilterInputs in;
    std::string bytes = read_file(o.trace);
    in.input = record_bytes(fs::absolute(o.trace).string(), bytes);
    in.trace = load_trace(o.trace);
    if (ov.config || !o.config.empty()) {
        in.raw = load_config(o.config, ov);
    } else {
        // Without a config the trace header supplies tau and nbar.
        in.raw = default_raw_config();
        in.raw["tau_s"] = format_number(in.trace.dt);
        in.raw["nbar"] = format_number(in.trace.nbar);
    }
    in.config = derive_config(in.raw);
    double tau = in.config.system.tau;
    if (std::abs(tau - in.trace.dt) > 1e-9 * in.trace.dt) {
        throw ConfigError(
            "trace integration time " + format_number(in.trace.dt) + " s does not match config tau_s " +
            format_number(tau) + " s");
    }
    in.pointer = make_pointer_model(in.config.system, in.config.squeeze);
    in.kind = parse_filter(o.filter);
    Predictor predictor = parse_predictor(o.predictor);
    State initial = parse_state(o.initial);
    in.run = in.kind == FilterKind::Bayes
                 ? run_bayes(in.trace, in.config.system, in.pointer, in.config.filter, predictor, initial)
                 : run_latching(in.trace, in.pointer, in.config.system, initial);
    return in;
}

/// Attaches the matched truth time to each event when the trace carries truth.
std::vector<JumpEvent> annotate_events(const FilterInputs &in) {
    std::vector<JumpEvent> events = in.run.events;
    if (!in.trace.truth) {
        return events;
    }
    MatchSet matches = match_events(events, *in.trace.truth, default_match_window(in.config.system));
    for (JumpEvent &e : events) {
        for (const auto &[matched, truth] : matches.matched) {
            if (matched.declare_time == e.declare_time && matched.to == e.to) {
                e.true_time = truth.time;
            }
        }
    }
    return events;
}

int cmd_filter(const FilterOptions &o, const std::vector<std::string> &argv, const Overrides &ov, std::ostream &out) {
    FilterInputs in = filter_trace(o, ov);
    RunRecorder run("filter", argv, o.out, ov);
    run.manifest().config = in.raw;
    run.manifest().inputs.push_back(in.input);
    std::vector<JumpEvent> events = annotate_events(in);
    run.emit("events.csv", to_text([&](std::ostream &s) { write_events_csv(s, events); }));
    run.emit("states.csv", to_text([&](std::ostream &s) { write_states_csv(s, in.trace, in.run); }));
    run.finish();
    out << filter_name(in.kind) << ": " << in.trace.samples.size() << " samples, " << events.size()
        << " declared jumps";
    if (in.run.degenerate_updates > 0) {
        out << ", " << in.run.degenerate_updates << " degenerate updates";
    }
    out << "\n";
    return kExitOk;
}

std::string detection_csv(FilterKind kind, const std::vector<DetectionStats> &stats) {
    std::ostringstream s;
    s << "filter,transition,count,mean_s,std_s,truth_mean_s,truth_std_s,miss_rate,fp_rate\n";
    for (const DetectionStats &d : stats) {
        s << filter_name(kind) << "," << transition_name(d.transition) << "," << d.count << ","
          << format_csv_number(d.mean) << "," << format_csv_number(d.std) << "," << format_csv_number(d.truth_mean)
          << "," << format_csv_number(d.truth_std) << "," << format_csv_number(d.miss_rate) << ","
          << format_csv_number(d.false_positive_rate) << "\n";
    }
    return s.str();
}

int cmd_analyze(const AnalyzeOptions &o, const std::vector<std::string> &argv, const Overrides &ov, std::ostream &out) {
    if (o.pairs != "rolling" && o.pairs != "disjoint") {
        throw std::invalid_argument("--pairs must be rolling or disjoint");
    }
    FilterInputs in = filter_trace(o.filter, ov);
    const SystemParams &params = in.config.system;
    QndReport qnd = qnd_fidelity(
        in.run.states, in.trace.dt, o.delta_t, o.pairs == "rolling" ? PairMode::Rolling : PairMode::Disjoint);

    RunRecorder run("analyze", argv, o.filter.out, ov);
    run.manifest().config = in.raw;
    run.manifest().inputs.push_back(in.input);
    run.emit("fidelity.csv", to_text([&](std::ostream &s) { write_fidelity_csv(s, qnd); }));
    out << "fidelity " << format_number(qnd.fidelity) << " (p_ee " << format_number(qnd.p_ee) << ", p_gg "
        << format_number(qnd.p_gg) << ", " << qnd.n_pairs << " pairs)\n";

    if (in.trace.truth) {
        std::vector<DetectionStats> stats;
        for (Transition t : parse_transitions("ge,eg,ef,fe")) {
            stats.push_back(detection_stats(
                in.run.events, *in.trace.truth, t, default_match_window(params), default_histogram(params)));
            run.emit(
                "histogram_" + transition_name(t) + ".csv",
                to_text([&](std::ostream &s) { write_histogram_csv(s, stats.back().histogram); }));
            out << transition_name(t) << ": " << stats.back().count << " matched, mean "
                << format_number(stats.back().mean) << " s\n";
        }
        run.emit("detection.csv", detection_csv(in.kind, stats));

        double settle = 5 * params.tau_b + params.tau;
        try {
            double phi = phase_separation_ge(params);
            std::ostringstream s;
            s << "quantity,empirical,model\n";
            s << "snr," << format_csv_number(empirical_snr(in.trace, settle)) << ","
              << format_csv_number(snr(params, phi)) << "\n";
            s << "snr_ss_g," << format_csv_number(empirical_snr_ss(in.trace, State::G, settle)) << ","
              << format_csv_number(snr_ss(params)) << "\n";
            run.emit("snr.csv", s.str());
        } catch (const StatisticsError &e) {
            out << "snr skipped: " << e.what() << "\n";
        }
    } else {
        out << "trace has no ground truth; detection statistics skipped\n";
    }
    run.finish();
    return kExitOk;
}

int cmd_sweep(const SweepOptions &o, const std::vector<std::string> &argv, const Overrides &ov, std::ostream &out) {
    RawConfig raw = load_config(o.config, ov);
    Config config = derive_config(raw);
    SweepSettings settings;
    settings.axis = parse_axis(o.axis);
    settings.values = parse_values("values", o.values);
    settings.per_point = o.per_point;
    settings.duration = o.duration;
    settings.seed = o.seed;
    settings.predictor = parse_predictor(o.predictor);
    settings.transitions = parse_transitions(o.transitions);
    settings.threads = default_thread_count();
    if (settings.values.empty()) {
        throw std::invalid_argument("--values must list at least one value");
    }

    RunRecorder run("sweep", argv, o.out, ov);
    run.manifest().config = raw;
    SweepResult result = run_sweep(config, settings);
    for (size_t j = 0; j < o.per_point; ++j) {
        run.manifest().seeds.push_back(o.seed + j);
    }
    run.emit("sweep.csv", to_text([&](std::ostream &s) { write_sweep_csv(s, result); }));
    run.finish();
    out << "swept " << settings.values.size() << " " << axis_name(settings.axis) << " values x " << o.per_point
        << " traces\n";
    return kExitOk;
}

int cmd_efficiency(
    const EfficiencyOptions &o, const std::vector<std::string> &argv, const Overrides &ov, std::ostream &out) {
    RawConfig raw = load_config(o.config, ov);
    Config base = derive_config(raw);
    std::vector<double> taus = parse_values("taus", o.taus);

    RunRecorder run("efficiency", argv, o.out, ov);
    run.manifest().config = raw;
    run.manifest().seeds.push_back(o.seed);
    std::vector<SnrPoint> points(taus.size());
    parallel_for(taus.size(), run.manifest().threads, [&](size_t k) {
        Config cfg = with_axis_value(base, SweepAxis::Tau, taus[k]);
        TrajectorySpec spec;
        spec.duration = o.duration;
        spec.seed = o.seed;
        spec.noise = cfg.squeeze ? NoiseMode::Squeezed : NoiseMode::Isotropic;
        IQTrace trace = simulate(cfg.system, make_pointer_model(cfg.system, cfg.squeeze), spec);
        double settle = 5 * cfg.system.tau_b + cfg.system.tau;
        points[k] = {taus[k], empirical_snr_ss(trace, State::G, settle)};
    });
    const SystemParams &p = base.system;
    EfficiencyFit fit = fit_efficiency(points, p.kappa, p.nbar, p.tau_b);

    std::ostringstream s;
    s << "tau_s,snr_ss,snr_ss_model\n";
    for (const SnrPoint &pt : points) {
        s << format_csv_number(pt.tau) << "," << format_csv_number(pt.snr_ss) << ","
          << format_csv_number(snr_ss(with_axis_value(base, SweepAxis::Tau, pt.tau).system)) << "\n";
    }
    run.emit("snr_ss.csv", s.str());
    run.emit(
        "efficiency.csv",
        "eta,eta_stderr,slope,intercept,intercept_ratio\n" + format_csv_number(fit.eta) + "," +
            format_csv_number(fit.eta_stderr) + "," + format_csv_number(fit.slope) + "," +
            format_csv_number(fit.intercept) + "," + format_csv_number(fit.intercept_ratio) + "\n");
    run.finish();
    out << "eta " << format_number(fit.eta) << " +/- " << format_number(fit.eta_stderr) << "\n";
    return kExitOk;
}

int execute(const std::vector<std::string> &args, const Overrides &ov, std::ostream &out, std::ostream &err);

int cmd_replay(const ReplayOptions &o, std::ostream &out, std::ostream &err) {
    fs::path manifest_path(o.manifest);
    RunManifest recorded = parse_manifest(read_file(manifest_path));
    if (recorded.argv.empty() || recorded.argv.front() == "replay") {
        throw IoError("manifest does not record a replayable command");
    }
    for (const FileRecord &input : recorded.inputs) {
        if (record_file(input.name, input.name) != input) {
            throw IoError("input '" + input.name + "' changed since the recorded run");
        }
    }
    Overrides ov;
    ov.config = recorded.config;
    ov.out = o.out.empty() ? manifest_path.parent_path() / "replay" : fs::path(o.out);
    int code = execute(recorded.argv, ov, out, err);
    if (code != kExitOk) {
        return code;
    }
    RunManifest fresh = parse_manifest(read_file(*ov.out / "manifest.json"));
    bool same = fresh.outputs.size() == recorded.outputs.size();
    for (const FileRecord &want : recorded.outputs) {
        bool found = false;
        for (const FileRecord &got : fresh.outputs) {
            found = found || got == want;
        }
        out << (found ? "match    " : "MISMATCH ") << want.name << " " << want.fnv1a64 << "\n";
        same = same && found;
    }
    if (!same) {
        err << "error: replayed outputs differ from the manifest\n";
        return kExitNumerical;
    }
    out << "replay reproduced " << recorded.outputs.size() << " output(s)\n";
    return kExitOk;
}

void add_filter_flags(CLI::App *cmd, FilterOptions &o) {
    cmd->add_option("--trace", o.trace, "Trace file (.bin or .csv)")->required();
    cmd->add_option("--filter", o.filter, "Filter")->check(CLI::IsMember({"bayes", "latch"}))->capture_default_str();
    cmd->add_option("--predictor", o.predictor, "Bayesian predictor")
        ->check(CLI::IsMember({"phase", "complex"}))
        ->capture_default_str();
    cmd->add_option("--config", o.config, "Config file; defaults plus the trace header if omitted");
    cmd->add_option("--out", o.out, "Output directory")->required();
    cmd->add_option("--initial", o.initial, "Initial filter state")
        ->check(CLI::IsMember({"g", "e", "f"}))
        ->capture_default_str();
}

int execute(const std::vector<std::string> &args, const Overrides &ov, std::ostream &out, std::ostream &err) {
    CLI::App app{"Quantum jump trajectory simulation and detection filters", "jumpscope"};
    app.require_subcommand(1);

    SimulateOptions sim;
    auto *simulate_cmd = app.add_subcommand("simulate", "Simulate IQ traces with ground truth");
    simulate_cmd->add_option("--config", sim.config, "Config file; built-in defaults if omitted");
    simulate_cmd->add_option("--duration", sim.duration, "Trace duration in seconds")->capture_default_str();
    simulate_cmd->add_option("--seed", sim.seed, "First seed")->capture_default_str();
    simulate_cmd->add_option("--count", sim.count, "Number of traces (seeds seed..seed+count-1)")
        ->capture_default_str();
    simulate_cmd->add_option("--out", sim.out, "Output directory")->required();
    simulate_cmd->add_option("--format", sim.format, "Trace format")
        ->check(CLI::IsMember({"bin", "csv"}))
        ->capture_default_str();
    simulate_cmd->add_option("--initial", sim.initial, "Initial state")
        ->check(CLI::IsMember({"g", "e", "f", "stationary"}))
        ->capture_default_str();

    FilterOptions filt;
    auto *filter_cmd = app.add_subcommand("filter", "Run a jump filter over a trace");
    add_filter_flags(filter_cmd, filt);

    AnalyzeOptions ana;
    auto *analyze_cmd = app.add_subcommand("analyze", "Detection statistics, histograms, SNR and QND fidelity");
    add_filter_flags(analyze_cmd, ana.filter);
    analyze_cmd->add_option("--delta-t", ana.delta_t, "QND pair separation in seconds")->capture_default_str();
    analyze_cmd->add_option("--pairs", ana.pairs, "QND pairing")
        ->check(CLI::IsMember({"rolling", "disjoint"}))
        ->capture_default_str();

    SweepOptions sw;
    auto *sweep_cmd = app.add_subcommand("sweep", "Detection time sweep over tau or nbar");
    sweep_cmd->add_option("--axis", sw.axis, "Swept parameter")->required()->check(CLI::IsMember({"tau", "nbar"}));
    sweep_cmd->add_option("--values", sw.values, "Comma-separated increasing values")->required();
    sweep_cmd->add_option("--per-point", sw.per_point, "Traces per grid point")->capture_default_str();
    sweep_cmd->add_option("--duration", sw.duration, "Trace duration in seconds")->capture_default_str();
    sweep_cmd->add_option("--seed", sw.seed, "First seed")->capture_default_str();
    sweep_cmd->add_option("--predictor", sw.predictor, "Bayesian predictor")
        ->check(CLI::IsMember({"phase", "complex"}))
        ->capture_default_str();
    sweep_cmd->add_option("--transitions", sw.transitions, "Comma-separated transitions")->capture_default_str();
    sweep_cmd->add_option("--config", sw.config, "Config file; built-in defaults if omitted");
    sweep_cmd->add_option("--out", sw.out, "Output directory")->required();

    EfficiencyOptions eff;
    auto *eff_cmd = app.add_subcommand("efficiency", "Fit the quantum efficiency from SNR_ss^2 vs tau");
    eff_cmd->add_option("--taus", eff.taus, "Comma-separated integration times")->capture_default_str();
    eff_cmd->add_option("--duration", eff.duration, "Trace duration per tau in seconds")->capture_default_str();
    eff_cmd->add_option("--seed", eff.seed, "Seed")->capture_default_str();
    eff_cmd->add_option("--config", eff.config, "Config file; built-in defaults if omitted");
    eff_cmd->add_option("--out", eff.out, "Output directory")->required();

    ReplayOptions rep;
    auto *replay_cmd = app.add_subcommand("replay", "Rerun a manifest and verify its outputs");
    replay_cmd->add_option("--manifest", rep.manifest, "manifest.json to replay")->required();
    replay_cmd->add_option("--out", rep.out, "Output directory; <manifest dir>/replay if omitted");

    auto *defaults_cmd = app.add_subcommand("default-config", "Print the built-in config");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    if (simulate_cmd->parsed()) {
        return cmd_simulate(sim, args, ov, out);
    }
    if (filter_cmd->parsed()) {
        return cmd_filter(filt, args, ov, out);
    }
    if (analyze_cmd->parsed()) {
        return cmd_analyze(ana, args, ov, out);
    }
    if (sweep_cmd->parsed()) {
        return cmd_sweep(sw, args, ov, out);
    }
    if (eff_cmd->parsed()) {
        return cmd_efficiency(eff, args, ov, out);
    }
    if (replay_cmd->parsed()) {
        return cmd_replay(rep, out, err);
    }
    if (defaults_cmd->parsed()) {
        out << format_config(default_raw_config());
        return kExitOk;
    }
    return kExitUsage;
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    try {
        return execute(args, {}, out, err);
    } catch (const IoError &e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error &e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const StatisticsError &e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace jumpscope
