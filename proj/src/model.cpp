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

#include "jumpscope/model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace jumpscope {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

const std::set<std::string> &known_keys() {
    static const std::set<std::string> keys = [] {
        std::set<std::string> k{
            "kappa_over_2pi_hz", "nbar", "eta", "tau_s", "t1_s", "phi_g", "phi_e", "phi_f", "threshold", "floor",
            "chi_ge_over_2pi_hz"};
        for (State from : kAllStates) {
            std::string f(1, static_cast<char>(std::tolower(state_char(from))));
            k.insert("beta_" + f);
            k.insert("c_" + f);
            k.insert("squeeze_" + f);
            for (State to : kAllStates) {
                if (from != to) {
                    k.insert("rate_" + f + "_" + static_cast<char>(std::tolower(state_char(to))) + "_hz");
                }
            }
        }
        return k;
    }();
    return keys;
}

std::string lower_char(State s) { return std::string(1, static_cast<char>(std::tolower(state_char(s)))); }

void check_known(const RawConfig &config) {
    for (const auto &[key, value] : config) {
        if (!known_keys().contains(key)) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
}

double required(const RawConfig &config, const std::string &key) {
    auto it = config.find(key);
    if (it == config.end()) {
        throw ConfigError("missing mandatory config key '" + key + "'");
    }
    return parse_number(key, it->second);
}

std::optional<double> optional_number(const RawConfig &config, const std::string &key) {
    auto it = config.find(key);
    if (it == config.end()) {
        return std::nullopt;
    }
    return parse_number(key, it->second);
}

void require_positive(const std::string &key, double value) {
    if (!(value > 0) || !std::isfinite(value)) {
        throw DomainError("config key '" + key + "' must be positive and finite");
    }
}

NoiseEllipse parse_ellipse(const std::string &key, const std::string &text) {
    std::array<double, 3> parts{};
    size_t start = 0;
    for (size_t k = 0; k < 3; ++k) {
        size_t comma = text.find(',', start);
        if ((k < 2) != (comma != std::string::npos)) {
            throw ConfigError("config key '" + key + "' expects major,minor,tilt");
        }
        parts[k] = parse_number(key, std::string_view(text).substr(start, comma == std::string::npos ? comma : comma - start));
        start = comma + 1;
    }
    NoiseEllipse e{parts[0], parts[1], parts[2]};
    if (!(e.minor > 0) || e.major < e.minor) {
        throw DomainError("config key '" + key + "' requires major >= minor > 0");
    }
    return e;
}

}  // namespace

char state_char(State s) {
    switch (s) {
        case State::G:
            return 'G';
        case State::E:
            return 'E';
        case State::F:
            return 'F';
    }
    throw std::invalid_argument("bad state");
}

std::string_view state_name(State s) {
    switch (s) {
        case State::G:
            return "g";
        case State::E:
            return "e";
        case State::F:
            return "f";
    }
    throw std::invalid_argument("bad state");
}

State parse_state(std::string_view text) {
    if (text == "g" || text == "G") {
        return State::G;
    }
    if (text == "e" || text == "E") {
        return State::E;
    }
    if (text == "f" || text == "F") {
        return State::F;
    }
    throw std::invalid_argument("unknown state '" + std::string(text) + "'");
}

double wrap_angle(double radians) {
    double r = std::remainder(radians, kTwoPi);  // [-pi, pi]
    if (r <= -std::numbers::pi) {
        r += kTwoPi;
    }
    return r;
}

void RateMatrix::set(State from, State to, double rate_per_s) {
    if (from == to) {
        throw std::invalid_argument("self transition rates are undefined");
    }
    if (!(rate_per_s >= 0) || !std::isfinite(rate_per_s)) {
        throw DomainError("transition rates must be finite and non-negative");
    }
    rates_[index_of(from)][index_of(to)] = rate_per_s;
}

double RateMatrix::exit_rate(State from) const {
    double total = 0;
    for (State to : kAllStates) {
        total += (*this)(from, to);
    }
    return total;
}

PerState<double> RateMatrix::stationary() const {
    // Solve pi^T Q = 0 with the last equation replaced by normalization.
    Eigen::Matrix3d a;
    for (State from : kAllStates) {
        for (State to : kAllStates) {
            double q = from == to ? -exit_rate(from) : (*this)(from, to);
            a(index_of(to), index_of(from)) = q;
        }
    }
    a.row(2).setOnes();
    Eigen::Vector3d b(0, 0, 1);
    Eigen::FullPivLU<Eigen::Matrix3d> lu(a);
    if (!lu.isInvertible()) {
        throw DomainError("transition rates have no unique stationary distribution");
    }
    Eigen::Vector3d p = lu.solve(b);
    PerState<double> out;
    for (State s : kAllStates) {
        out[s] = std::max(0.0, p(index_of(s)));
    }
    return out;
}

double response_time(double kappa) { return 2.0 / kappa; }

std::array<double, 3> NoiseEllipse::inverse_covariance() const {
    double c = std::cos(tilt);
    double s = std::sin(tilt);
    double inv_major = 1.0 / (major * major);
    double inv_minor = 1.0 / (minor * minor);
    return {c * c * inv_major + s * s * inv_minor, c * s * (inv_major - inv_minor), s * s * inv_major + c * c * inv_minor};
}

double NoiseEllipse::mahalanobis_sq(Complex delta) const {
    auto [a, b, c] = inverse_covariance();
    double x = delta.real();
    double y = delta.imag();
    return a * x * x + 2 * b * x * y + c * y * y;
}

double NoiseEllipse::std_along(Complex dir) const {
    Complex axis = std::polar(1.0, tilt);
    // Components of `dir` along the major and minor axes.
    Complex local = dir * std::conj(axis);
    double u = local.real();
    double v = local.imag();
    return std::sqrt(major * major * u * u + minor * minor * v * v) / std::abs(dir);
}

double NoiseEllipse::total_std() const { return std::sqrt(major * major + minor * minor); }

double PointerModel::phase_std(State s) const {
    Complex a = alpha[s];
    double r = std::abs(a);
    if (r == 0) {
        throw DomainError("phase is undefined for a zero pointer");
    }
    return sigma[s].std_along(Complex(0, 1) * a) / r;
}

void PointerModel::validate() const {
    double g = std::abs(alpha[State::G]);
    double e = std::abs(alpha[State::E]);
    if (std::abs(g - e) > 1e-9 * std::max(g, e)) {
        throw DomainError("|alpha_G| and |alpha_E| must be equal");
    }
    for (State s : kAllStates) {
        if (!(sigma[s].minor > 0) || sigma[s].major < sigma[s].minor) {
            throw DomainError("noise ellipse requires major >= minor > 0");
        }
    }
}

Complex evolve_pointer(Complex alpha, Complex target, double detuning, double kappa, double dt) {
    return (alpha - target) * std::exp(Complex(-0.5 * kappa * dt, detuning * dt)) + target;
}

State state_at(const std::vector<Segment> &truth, double t) {
    if (truth.empty()) {
        throw std::invalid_argument("empty truth path");
    }
    auto it = std::upper_bound(
        truth.begin(), truth.end(), t, [](double value, const Segment &seg) { return value < seg.start; });
    if (it == truth.begin()) {
        return truth.front().state;
    }
    return std::prev(it)->state;
}

void IQTrace::validate() const {
    if (samples.empty()) {
        throw DomainError("trace has no samples");
    }
    if (!(dt > 0) || !std::isfinite(dt)) {
        throw DomainError("trace sample spacing must be positive");
    }
    if (truth) {
        if (truth->empty() || truth->front().start != 0.0) {
            throw DomainError("truth segments must start at t = 0");
        }
        for (size_t k = 1; k < truth->size(); ++k) {
            if (!((*truth)[k].start > (*truth)[k - 1].start) || (*truth)[k].start > duration()) {
                throw DomainError("truth segments must be strictly time-ordered within the trace");
            }
        }
    }
}

double pointer_amplitude(const SystemParams &params) {
    return std::sqrt(params.kappa * params.bandwidth_inv * params.eta * params.nbar / 2.0);
}

PointerModel make_pointer_model(
    const SystemParams &params, const std::optional<PerState<NoiseEllipse>> &squeeze, const PerState<double> &detuning) {
    PointerModel model;
    double r = pointer_amplitude(params);
    for (State s : kAllStates) {
        model.alpha[s] = std::polar(r, params.phi[s]);
    }
    if (squeeze) {
        model.sigma = *squeeze;
    }
    model.detuning = detuning;
    model.validate();
    return model;
}

void FilterParams::validate() const {
    for (State s : kAllStates) {
        if (!(beta[s] > 0) || !std::isfinite(beta[s])) {
            throw DomainError("beta must be positive");
        }
        if (!(c[s] > 0) || !std::isfinite(c[s])) {
            throw DomainError("c must be positive");
        }
    }
    if (!(floor > 0) || !(floor < threshold) || !(threshold <= 1) || !(3 * floor < 1)) {
        throw DomainError("filter requires 0 < floor < threshold <= 1 and 3 * floor < 1");
    }
}

std::string format_number(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

double parse_number(std::string_view key, std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
        text.remove_prefix(1);
    }
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
        text.remove_suffix(1);
    }
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError("config key '" + std::string(key) + "' has non-numeric value '" + std::string(text) + "'");
    }
    return value;
}

RateMatrix default_rates(double t1) {
    RateMatrix rates;
    double e_to_f = -std::log1p(-kLossProbEtoF) / kQndWindow;
    rates.set(State::E, State::G, 1.0 / t1);
    rates.set(State::E, State::F, e_to_f);
    rates.set(State::G, State::E, -std::log1p(-kLossProbGtoE) / kQndWindow);
    rates.set(State::F, State::E, e_to_f);
    return rates;
}

SystemParams derive_params(const RawConfig &config) {
    check_known(config);
    SystemParams p;
    double kappa_hz = required(config, "kappa_over_2pi_hz");
    p.nbar = required(config, "nbar");
    p.eta = required(config, "eta");
    p.tau = required(config, "tau_s");
    p.t1 = required(config, "t1_s");
    require_positive("kappa_over_2pi_hz", kappa_hz);
    require_positive("nbar", p.nbar);
    require_positive("eta", p.eta);
    require_positive("tau_s", p.tau);
    require_positive("t1_s", p.t1);
    if (p.eta > 1) {
        throw DomainError("config key 'eta' must lie in (0, 1]");
    }
    p.kappa = kTwoPi * kappa_hz;
    p.tau_b = response_time(p.kappa);
    p.bandwidth_inv = p.tau + p.tau_b;
    p.chi_ge = kTwoPi * optional_number(config, "chi_ge_over_2pi_hz").value_or(kDefaultChiGeOver2PiHz);

    p.rates = default_rates(p.t1);
    for (State from : kAllStates) {
        for (State to : kAllStates) {
            if (from == to) {
                continue;
            }
            std::string key = "rate_" + lower_char(from) + "_" + lower_char(to) + "_hz";
            if (auto r = optional_number(config, key)) {
                if (!(*r >= 0) || !std::isfinite(*r)) {
                    throw DomainError("config key '" + key + "' must be non-negative");
                }
                p.rates.set(from, to, *r);
            }
        }
    }

    p.phi = kDefaultPhases;
    for (State s : kAllStates) {
        std::string key = "phi_" + lower_char(s);
        if (auto v = optional_number(config, key)) {
            if (!(*v > -std::numbers::pi && *v <= std::numbers::pi)) {
                throw DomainError("config key '" + key + "' must lie in (-pi, pi]");
            }
            p.phi[s] = *v;
        }
    }
    return p;
}

Config derive_config(const RawConfig &config) {
    Config out;
    out.system = derive_params(config);
    out.raw = config;
    for (State s : kAllStates) {
        std::string suffix = lower_char(s);
        if (auto v = optional_number(config, "beta_" + suffix)) {
            out.filter.beta[s] = *v;
        }
        if (auto v = optional_number(config, "c_" + suffix)) {
            out.filter.c[s] = *v;
        }
    }
    if (auto v = optional_number(config, "threshold")) {
        out.filter.threshold = *v;
    }
    if (auto v = optional_number(config, "floor")) {
        out.filter.floor = *v;
    }
    out.filter.validate();

    for (State s : kAllStates) {
        auto it = config.find("squeeze_" + lower_char(s));
        if (it != config.end()) {
            if (!out.squeeze) {
                out.squeeze.emplace();
            }
            (*out.squeeze)[s] = parse_ellipse(it->first, it->second);
        }
    }
    return out;
}

double snr(const SystemParams &params, double phi_eg) {
    return std::sqrt(0.25 * params.kappa * params.eta * params.nbar * (params.tau + params.tau_b)) *
           std::sin(phi_eg / 2.0);
}

double snr_ss(const SystemParams &params) {
    return std::sqrt(params.kappa * params.bandwidth_inv * params.eta * params.nbar / 4.0);
}

double phase_separation_ge(const SystemParams &params) {
    return std::abs(wrap_angle(params.phi[State::E] - params.phi[State::G]));
}

}  // namespace jumpscope
