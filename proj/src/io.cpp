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

#include "jumpscope/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace jumpscope {

namespace {

constexpr std::array<char, 4> kMagic{'I', 'Q', 'T', 'R'};
constexpr std::string_view kCsvMagic = "# IQTR-CSV";

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

template <typename T>
void put_le(std::ostream &out, T value) {
    static_assert(std::is_unsigned_v<T>);
    std::array<char, sizeof(T)> bytes{};
    for (size_t k = 0; k < sizeof(T); ++k) {
        bytes[k] = static_cast<char>((value >> (8 * k)) & 0xFF);
    }
    out.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream &out, double value) { put_le(out, std::bit_cast<uint64_t>(value)); }

template <typename T>
T get_le(std::istream &in) {
    std::array<unsigned char, sizeof(T)> bytes{};
    if (!in.read(reinterpret_cast<char *>(bytes.data()), bytes.size())) {
        throw IoError("truncated trace file");
    }
    T value = 0;
    for (size_t k = 0; k < sizeof(T); ++k) {
        value |= static_cast<T>(bytes[k]) << (8 * k);
    }
    return value;
}

double get_f64(std::istream &in) { return std::bit_cast<double>(get_le<uint64_t>(in)); }

State state_from_byte(uint8_t b) {
    if (b > 2) {
        throw IoError("invalid state byte in trace file");
    }
    return static_cast<State>(b);
}

double csv_number(std::string_view text) {
    try {
        return parse_number("csv", text);
    } catch (const ConfigError &) {
        throw IoError("malformed number '" + std::string(text) + "' in CSV trace");
    }
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> parts;
    size_t start = 0;
    while (true) {
        size_t pos = line.find(sep, start);
        parts.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) {
            return parts;
        }
        start = pos + 1;
    }
}

std::string optional_number(const std::optional<double> &v) { return v ? format_csv_number(*v) : ""; }

}  // namespace

RawConfig parse_config_text(std::string_view text) {
    RawConfig config;
    size_t line_no = 0;
    for (std::string_view line : split(text, '\n')) {
        ++line_no;
        if (size_t hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + " is not key=value");
        }
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + " has an empty key");
        }
        if (!config.emplace(key, value).second) {
            throw ConfigError("duplicate config key '" + key + "'");
        }
    }
    return config;
}

RawConfig read_config_file(const std::filesystem::path &path) { return parse_config_text(read_file(path)); }

std::string format_config(const RawConfig &config) {
    std::string out;
    for (const auto &[key, value] : config) {
        out += key + "=" + value + "\n";
    }
    return out;
}

RawConfig default_raw_config() {
    return {
        {"kappa_over_2pi_hz", "1.1e6"},
        {"nbar", "56"},
        {"eta", "0.6"},
        {"tau_s", "32e-9"},
        {"t1_s", "20e-6"},
        {"beta_g", "2"},
        {"beta_e", "2"},
        {"beta_f", "2"},
    };
}

TraceFormat parse_trace_format(std::string_view text) {
    if (text == "bin") {
        return TraceFormat::Binary;
    }
    if (text == "csv") {
        return TraceFormat::Csv;
    }
    throw std::invalid_argument("unknown trace format '" + std::string(text) + "' (expected bin|csv)");
}

std::string_view trace_format_extension(TraceFormat f) { return f == TraceFormat::Binary ? ".bin" : ".csv"; }

void write_trace_binary(std::ostream &out, const IQTrace &trace) {
    out.write(kMagic.data(), kMagic.size());
    put_le<uint16_t>(out, kTraceFormatVersion);
    put_le<uint64_t>(out, trace.samples.size());
    put_f64(out, trace.dt);
    put_f64(out, trace.nbar);
    put_le<uint8_t>(out, trace.truth ? 1 : 0);
    for (Complex z : trace.samples) {
        put_f64(out, z.real());
        put_f64(out, z.imag());
    }
    if (trace.truth) {
        put_le<uint64_t>(out, trace.truth->size());
        for (const Segment &seg : *trace.truth) {
            put_f64(out, seg.start);
            put_le<uint8_t>(out, static_cast<uint8_t>(seg.state));
        }
    }
    if (!out) {
        throw IoError("failed writing trace");
    }
}

IQTrace read_trace_binary(std::istream &in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw IoError("not an IQTR trace file");
    }
    uint16_t version = get_le<uint16_t>(in);
    if (version != kTraceFormatVersion) {
        throw IoError("unsupported trace format version " + std::to_string(version));
    }
    IQTrace trace;
    uint64_t n = get_le<uint64_t>(in);
    trace.dt = get_f64(in);
    trace.nbar = get_f64(in);
    uint8_t has_truth = get_le<uint8_t>(in);
    if (has_truth > 1) {
        throw IoError("invalid truth flag in trace file");
    }
    trace.samples.reserve(static_cast<size_t>(std::min<uint64_t>(n, 1u << 26)));
    for (uint64_t k = 0; k < n; ++k) {
        double i = get_f64(in);
        double q = get_f64(in);
        trace.samples.emplace_back(i, q);
    }
    if (has_truth) {
        uint64_t m = get_le<uint64_t>(in);
        std::vector<Segment> truth;
        for (uint64_t k = 0; k < m; ++k) {
            double start = get_f64(in);
            truth.push_back({start, state_from_byte(get_le<uint8_t>(in))});
        }
        trace.truth = std::move(truth);
    }
    try {
        trace.validate();
    } catch (const DomainError &e) {
        throw IoError(std::string("invalid trace: ") + e.what());
    }
    return trace;
}

std::string format_csv_number(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    return std::string(buf.data(), ptr);
}

void write_trace_csv(std::ostream &out, const IQTrace &trace) {
    out << kCsvMagic << " version=" << kCsvFormatVersion << "\n";
    out << "# tau_s=" << format_csv_number(trace.dt) << "\n";
    out << "# nbar=" << format_csv_number(trace.nbar) << "\n";
    if (trace.truth) {
        out << "# truth_segments=" << trace.truth->size() << "\n";
        for (const Segment &seg : *trace.truth) {
            out << "# segment=" << format_csv_number(seg.start) << "," << state_name(seg.state) << "\n";
        }
    }
    out << "index,i,q\n";
    for (size_t k = 0; k < trace.samples.size(); ++k) {
        out << k << "," << format_csv_number(trace.samples[k].real()) << ","
            << format_csv_number(trace.samples[k].imag()) << "\n";
    }
    if (!out) {
        throw IoError("failed writing trace");
    }
}

IQTrace read_trace_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind(kCsvMagic, 0) != 0) {
        throw IoError("not an IQTR CSV trace");
    }
    IQTrace trace;
    std::optional<size_t> expected_segments;
    std::vector<Segment> truth;
    bool in_body = false;
    while (std::getline(in, line)) {
        std::string_view view = trim(line);
        if (view.empty()) {
            continue;
        }
        if (!in_body && view.front() == '#') {
            view = trim(view.substr(1));
            size_t eq = view.find('=');
            if (eq == std::string_view::npos) {
                continue;
            }
            std::string_view key = view.substr(0, eq);
            std::string_view value = view.substr(eq + 1);
            if (key == "tau_s") {
                trace.dt = csv_number(value);
            } else if (key == "nbar") {
                trace.nbar = csv_number(value);
            } else if (key == "truth_segments") {
                expected_segments = static_cast<size_t>(csv_number(value));
            } else if (key == "segment") {
                auto parts = split(value, ',');
                if (parts.size() != 2) {
                    throw IoError("malformed truth segment line");
                }
                try {
                    truth.push_back({csv_number(parts[0]), parse_state(parts[1])});
                } catch (const std::invalid_argument &) {
                    throw IoError("malformed truth segment state");
                }
            }
            continue;
        }
        if (!in_body) {
            if (view != "index,i,q") {
                throw IoError("unexpected CSV trace header '" + std::string(view) + "'");
            }
            in_body = true;
            continue;
        }
        auto parts = split(view, ',');
        if (parts.size() != 3) {
            throw IoError("malformed CSV trace row");
        }
        trace.samples.emplace_back(csv_number(parts[1]), csv_number(parts[2]));
    }
    if (expected_segments) {
        if (*expected_segments != truth.size()) {
            throw IoError("truth segment count does not match header");
        }
        trace.truth = std::move(truth);
    }
    try {
        trace.validate();
    } catch (const DomainError &e) {
        throw IoError(std::string("invalid trace: ") + e.what());
    }
    return trace;
}

void save_trace(const std::filesystem::path &path, const IQTrace &trace, TraceFormat format) {
    std::ostringstream buffer;
    if (format == TraceFormat::Binary) {
        write_trace_binary(buffer, trace);
    } else {
        write_trace_csv(buffer, trace);
    }
    write_file(path, buffer.str());
}

IQTrace load_trace(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open trace '" + path.string() + "'");
    }
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    in.clear();
    in.seekg(0);
    if (magic == kMagic) {
        return read_trace_binary(in);
    }
    return read_trace_csv(in);
}

void write_events_csv(std::ostream &out, std::span<const JumpEvent> events) {
    out << "from,to,depart_time_s,declare_time_s,detection_time_s,true_time_s\n";
    for (const JumpEvent &e : events) {
        out << state_name(e.from) << "," << state_name(e.to) << "," << format_csv_number(e.depart_time) << ","
            << format_csv_number(e.declare_time) << "," << format_csv_number(e.detection_time()) << ","
            << optional_number(e.true_time) << "\n";
    }
}

void write_states_csv(std::ostream &out, const IQTrace &trace, const FilterRun &run) {
    bool with_probs = !run.probs.empty();
    out << "index,time_s,state";
    if (with_probs) {
        out << ",p_g,p_e,p_f";
    }
    out << "\n";
    for (size_t k = 0; k < run.states.size(); ++k) {
        out << k << "," << format_csv_number(trace.time_of(k)) << "," << state_name(run.states[k]);
        if (with_probs) {
            for (State s : kAllStates) {
                out << "," << format_csv_number(run.probs[k][s]);
            }
        }
        out << "\n";
    }
}

void write_histogram_csv(std::ostream &out, const Histogram &histogram) {
    out << "bin_start,bin_end,count\n";
    for (size_t b = 0; b < histogram.counts.size(); ++b) {
        out << format_csv_number(histogram.edges[b]) << "," << format_csv_number(histogram.edges[b + 1]) << ","
            << histogram.counts[b] << "\n";
    }
}

void write_sweep_csv(std::ostream &out, const SweepResult &sweep) {
    out << "axis,value,filter,transition,count,mean_s,std_s,truth_mean_s,miss_rate,fp_rate\n";
    for (const SweepPoint &p : sweep.points) {
        for (FilterKind f : {FilterKind::Bayes, FilterKind::Latch}) {
            for (const DetectionStats &s : f == FilterKind::Bayes ? p.bayes : p.latch) {
                out << axis_name(sweep.axis) << "," << format_csv_number(p.value) << "," << filter_name(f) << ","
                    << transition_name(s.transition) << "," << s.count << "," << format_csv_number(s.mean) << ","
                    << format_csv_number(s.std) << "," << format_csv_number(s.truth_mean) << ","
                    << format_csv_number(s.miss_rate) << "," << format_csv_number(s.false_positive_rate) << "\n";
            }
        }
    }
}

void write_fidelity_csv(std::ostream &out, const QndReport &report) {
    out << "p_ee,p_gg,fidelity,n_pairs,p_e_to_g,p_e_to_f,p_g_to_e\n";
    out << format_csv_number(report.p_ee) << "," << format_csv_number(report.p_gg) << ","
        << format_csv_number(report.fidelity) << "," << report.n_pairs << "," << format_csv_number(report.p_e_to_g)
        << "," << format_csv_number(report.p_e_to_f) << "," << format_csv_number(report.p_g_to_e) << "\n";
}

void write_file(const std::filesystem::path &path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string fnv1a_hex(std::string_view bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    std::array<char, 17> buf{};
    std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf.data(), 16);
}

}  // namespace jumpscope
