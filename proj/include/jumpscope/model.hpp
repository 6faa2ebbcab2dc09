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

#ifndef JUMPSCOPE_MODEL_HPP
#define JUMPSCOPE_MODEL_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace jumpscope {

using Complex = std::complex<double>;

/// The three monitored levels of the artificial atom. Iteration order is G, E, F.
enum class State : uint8_t { G = 0, E = 1, F = 2 };

inline constexpr std::array<State, 3> kAllStates{State::G, State::E, State::F};
inline constexpr size_t kNumStates = 3;

constexpr size_t index_of(State s) { return static_cast<size_t>(s); }
char state_char(State s);
std::string_view state_name(State s);
/// Accepts "g"/"G", "e"/"E", "f"/"F".
State parse_state(std::string_view text);

/// Fixed-size table indexed by State.
template <typename T>
struct PerState {
    std::array<T, kNumStates> values{};

    constexpr T &operator[](State s) { return values[index_of(s)]; }
    constexpr const T &operator[](State s) const { return values[index_of(s)]; }
    bool operator==(const PerState &) const = default;
};

/// Thrown for missing, malformed or unknown configuration entries.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a parameter is outside its physical domain.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Thrown when an estimator does not have enough data.
struct StatisticsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double radians);

/// Off-diagonal transition rates in 1/s. rate(from, from) is always zero.
class RateMatrix {
   public:
    double operator()(State from, State to) const { return rates_[index_of(from)][index_of(to)]; }
    void set(State from, State to, double rate_per_s);
    /// Sum of the rates leaving `from`.
    double exit_rate(State from) const;
    /// Stationary distribution of the continuous-time chain.
    /// Throws DomainError if the chain has no unique stationary distribution.
    PerState<double> stationary() const;
    bool operator==(const RateMatrix &) const = default;

   private:
    std::array<std::array<double, kNumStates>, kNumStates> rates_{};
};

/// Physical and calibration constants, all in SI units (angular rates in rad/s).
struct SystemParams {
    double kappa = 0;          // resonator linewidth, rad/s
    double nbar = 0;           // mean circulating photon number
    double eta = 0;            // measurement efficiency
    double tau = 0;            // integration time, s
    double tau_b = 0;          // resonator response time 2/kappa, s
    double bandwidth_inv = 0;  // tau + tau_b, s
    double t1 = 0;             // e -> g relaxation time, s
    RateMatrix rates;
    PerState<double> phi{};    // steady-state pointer phases, rad
    double chi_ge = 0;         // dispersive shift, rad/s (informational)
};

/// Resonator response time 2/kappa.
double response_time(double kappa);

/// Tilted Gaussian noise ellipse in normalized IQ units. `major`/`minor` are
/// standard deviations along the principal axes; `tilt` is the angle of the
/// major axis from the I axis.
struct NoiseEllipse {
    double major = 1.0;
    double minor = 1.0;
    double tilt = 0.0;

    /// Inverse covariance as (a, b, c) with d^2 = a*x^2 + 2*b*x*y + c*y^2.
    std::array<double, 3> inverse_covariance() const;
    double mahalanobis_sq(Complex delta) const;
    bool contains(Complex delta, double radius) const { return mahalanobis_sq(delta) <= radius * radius; }
    /// Standard deviation of the projection onto unit direction `dir`.
    double std_along(Complex dir) const;
    /// Total standard deviation sqrt(sigma_I^2 + sigma_Q^2).
    double total_std() const;
    bool operator==(const NoiseEllipse &) const = default;
};

/// One step of the linear resonator response:
/// (alpha - target) * exp((-kappa / 2 + i * detuning) * dt) + target.
Complex evolve_pointer(Complex alpha, Complex target, double detuning, double kappa, double dt);

/// Steady-state pointer geometry for each hypothesis.
struct PointerModel {
    PerState<Complex> alpha{};
    PerState<NoiseEllipse> sigma{};
    PerState<double> detuning{};  // omega_drive - omega_H, rad/s

    /// Phase standard deviation of state `s`, i.e. tangential noise over |alpha|.
    double phase_std(State s) const;
    /// Checks the equal-magnitude and ellipse invariants; throws DomainError.
    void validate() const;
};

/// Pointer magnitude sqrt(kappa * B^-1 * eta * nbar / 2) in normalized units.
double pointer_amplitude(const SystemParams &params);

/// Builds the pointer model from phases in `params`; ellipses default to isotropic
/// unit noise and detunings to zero.
PointerModel make_pointer_model(
    const SystemParams &params,
    const std::optional<PerState<NoiseEllipse>> &squeeze = std::nullopt,
    const PerState<double> &detuning = {});

/// A ground-truth interval: the atom is in `state` from `start` until the next
/// segment's start (or the end of the trace).
struct Segment {
    double start = 0;
    State state = State::G;
    bool operator==(const Segment &) const = default;
};

/// State of the truth path at time t (t >= 0).
State state_at(const std::vector<Segment> &truth, double t);

/// Uniformly sampled IQ record. Sample k is taken at time k * dt.
struct IQTrace {
    double dt = 0;
    double nbar = 0;
    std::vector<Complex> samples;
    std::optional<std::vector<Segment>> truth;

    double time_of(size_t k) const { return static_cast<double>(k) * dt; }
    double duration() const { return static_cast<double>(samples.size()) * dt; }
    /// Throws DomainError if the trace is empty, dt <= 0, or truth is malformed.
    void validate() const;
};

struct FilterParams {
    PerState<double> beta{{1.0, 1.0, 1.0}};
    PerState<double> c{{1.0, 1.0, 1.0}};
    double threshold = 0.5;
    double floor = 0.1;

    void validate() const;
};

/// Ordered key=value entries exactly as read from a config file.
using RawConfig = std::map<std::string, std::string>;

/// Everything a config file can specify.
struct Config {
    SystemParams system;
    FilterParams filter;
    std::optional<PerState<NoiseEllipse>> squeeze;  // set if any squeeze_<state> key is present
    RawConfig raw;
};

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

/// Parses a numeric config value; throws ConfigError naming `key`.
double parse_number(std::string_view key, std::string_view text);

/// Default qubit parameters: kappa/2pi = 1.1 MHz, T1 = 20 us, chi_ge/2pi = -1.09 MHz.
inline constexpr double kDefaultKappaOver2PiHz = 1.1e6;
inline constexpr double kDefaultT1 = 20e-6;
inline constexpr double kDefaultChiGeOver2PiHz = -1.09e6;
inline constexpr PerState<double> kDefaultPhases{{-1.3, 1.3, -2.4}};
/// Window over which the QND loss probabilities are quoted.
inline constexpr double kQndWindow = 432e-9;
inline constexpr double kLossProbEtoF = 0.012;
inline constexpr double kLossProbGtoE = 0.003;

/// Default rates: E->G = 1/T1, E->F and G->E from loss probabilities over
/// kQndWindow via r = -ln(1-p)/dt, F->E = E->F.
RateMatrix default_rates(double t1);

/// Derives SystemParams from a raw key-value map. Mandatory keys:
/// kappa_over_2pi_hz, nbar, eta, tau_s, t1_s.
SystemParams derive_params(const RawConfig &config);

/// Full config: system params, filter params and squeezing.
Config derive_config(const RawConfig &config);

/// SNR = sqrt(kappa * eta * nbar * (tau + tau_b) / 4) * sin(phi_eg / 2).
double snr(const SystemParams &params, double phi_eg);
/// SNR_ss = sqrt(kappa * B^-1 * eta * nbar / 4).
double snr_ss(const SystemParams &params);

/// Wrapped phase separation between the G and E pointers, in [0, pi].
double phase_separation_ge(const SystemParams &params);

}  // namespace jumpscope

#endif  // JUMPSCOPE_MODEL_HPP
