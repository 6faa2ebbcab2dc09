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

#ifndef JUMPSCOPE_IO_HPP
#define JUMPSCOPE_IO_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "jumpscope/analysis.hpp"
#include "jumpscope/filters.hpp"
#include "jumpscope/model.hpp"

namespace jumpscope {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Config files: one key=value per line, '#' starts a comment.

RawConfig parse_config_text(std::string_view text);
RawConfig read_config_file(const std::filesystem::path &path);
/// One key=value line per entry in key order.
std::string format_config(const RawConfig &config);
/// Qubit and readout defaults: kappa/2pi = 1.1 MHz, nbar = 56, eta = 0.6,
/// tau = 32 ns, T1 = 20 us, and a likelihood width factor beta = 2 for
/// every state.
RawConfig default_raw_config();

// Trace files.
//
// Binary layout (little-endian):
//   "IQTR" | u16 version=1 | u64 n | f64 tau | f64 nbar | u8 has_truth
//   n x (f64 I, f64 Q)
//   if has_truth: u64 m | m x (f64 start_time, u8 state)

inline constexpr uint16_t kTraceFormatVersion = 1;
inline constexpr uint16_t kCsvFormatVersion = 1;

enum class TraceFormat { Binary, Csv };
TraceFormat parse_trace_format(std::string_view text);
std::string_view trace_format_extension(TraceFormat f);

void write_trace_binary(std::ostream &out, const IQTrace &trace);
IQTrace read_trace_binary(std::istream &in);
/// CSV with '#' header lines for tau, nbar and truth segments, then "index,i,q"
/// rows with 17 significant digits.
void write_trace_csv(std::ostream &out, const IQTrace &trace);
IQTrace read_trace_csv(std::istream &in);

void save_trace(const std::filesystem::path &path, const IQTrace &trace, TraceFormat format);
/// Detects the format from the leading magic bytes.
IQTrace load_trace(const std::filesystem::path &path);

// CSV emitters.

/// 17 significant digits.
std::string format_csv_number(double value);

void write_events_csv(std::ostream &out, std::span<const JumpEvent> events);
void write_states_csv(std::ostream &out, const IQTrace &trace, const FilterRun &run);
void write_histogram_csv(std::ostream &out, const Histogram &histogram);
void write_sweep_csv(std::ostream &out, const SweepResult &sweep);
void write_fidelity_csv(std::ostream &out, const QndReport &report);

/// Writes `content` to `path`, throwing IoError on failure.
void write_file(const std::filesystem::path &path, std::string_view content);
std::string read_file(const std::filesystem::path &path);

/// FNV-1a 64-bit digest rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace jumpscope

#endif  // JUMPSCOPE_IO_HPP
