#pragma once

#include "iontrap/constants.hpp"
#include "iontrap/motion.hpp"
#include "iontrap/numerics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

// The frequency-ramp squeezing experiment: classical scale-factor dynamics,
// Bogoliubov analysis of the axial phonon mode under a trap-frequency ramp,
// squeezed-vacuum occupations, and the sideband readout protocol.

namespace iontrap::universe {

using complexd = std::complex<double>;

enum class RampShape { sudden, linear, smooth_step };

struct RampProfile {
    double initial_frequency = constants::two_pi * 100.0e3; // omega_low (rad/s)
    double final_frequency = constants::two_pi * 2.0e6;     // omega_high (rad/s)
    double rise_time = 1.0e-6;                              // seconds
    RampShape shape = RampShape::linear;

    void validate() const
    {
        if (initial_frequency <= 0.0 || final_frequency <= 0.0)
            throw std::invalid_argument("RampProfile: frequencies must be > 0");
        if (rise_time < 0.0)
            throw std::invalid_argument("RampProfile: rise_time must be >= 0");
    }

    /// omega_z(t); constant at the final value for t >= rise_time.
    double frequency(double t) const
    {
        if (t <= 0.0)
            return initial_frequency;
        if (t >= rise_time || shape == RampShape::sudden || rise_time == 0.0)
            return final_frequency;
        const double s = t / rise_time;
        const double w = shape == RampShape::linear ? s : s * s * (3.0 - 2.0 * s);
        return initial_frequency + (final_frequency - initial_frequency) * w;
    }
};

struct ScaleFactorSample {
    double time = 0.0;
    double value = 0.0;      // b(t)
    double derivative = 0.0; // b'(t)
};

/// Integrates b'' + omega_z^2(t) b = omega_z^2(0)/b^2 from b(0)=1, b'(0)=0.
/// Accuracy is monitored through the conserved energy on any trailing
/// constant-frequency stretch.
inline std::vector<ScaleFactorSample> scale_factor(const std::function<double(double)>& frequency,
                                                   double duration, double step)
{
    if (duration < 0.0 || step <= 0.0)
        throw std::invalid_argument("scale_factor: needs duration >= 0 and step > 0");
    const double w0 = frequency(0.0);
    if (w0 <= 0.0)
        throw std::invalid_argument("scale_factor: omega_z(t) must be > 0");

    using State = Eigen::Vector2d; // (b, b')
    auto deriv = [&](double t, const State& y) -> State {
        const double w = frequency(t);
        return State(y(1), -w * w * y(0) + w0 * w0 / (y(0) * y(0)));
    };

    std::vector<ScaleFactorSample> out;
    State y(1.0, 0.0);
    const auto n_steps = static_cast<long>(std::ceil(duration / step - 1e-9));
    out.reserve(static_cast<std::size_t>(n_steps) + 1);
    out.push_back({0.0, y(0), y(1)});
    double t = 0.0;
    for (long i = 0; i < n_steps; ++i) {
        const double h = std::min(step, duration - t);
        y = numerics::rk4_step(deriv, t, y, h);
        t += h;
        out.push_back({t, y(0), y(1)});
    }

    // energy drift check over the trailing constant-omega stretch
    const double w_end = frequency(duration);
    auto energy = [&](const ScaleFactorSample& s) {
        return 0.5 * s.derivative * s.derivative + 0.5 * w_end * w_end * s.value * s.value
            + w0 * w0 / s.value;
    };
    std::size_t tail_start = out.size();
    for (std::size_t i = out.size(); i-- > 0;) {
        if (std::abs(frequency(out[i].time) - w_end) > 1e-9 * w_end)
            break;
        tail_start = i;
    }
    if (out.size() - tail_start > 2) {
        const double e0 = energy(out[tail_start]);
        double max_drift = 0.0;
        for (std::size_t i = tail_start; i < out.size(); ++i)
            max_drift = std::max(max_drift, std::abs(energy(out[i]) - e0));
        if (max_drift > 1e-6 * std::abs(e0))
            throw std::runtime_error("scale_factor: step too large, energy drift exceeds 1e-6");
    }
    return out;
}

struct SqueezeResult {
    double squeeze_parameter = 0.0; // r
    double mean_n = 0.0;            // sinh^2 r
    double bogoliubov_norm = 1.0;   // |alpha|^2 - |beta|^2 diagnostic
    motion::MotionalDistribution occupations;
};

/// Squeezed-vacuum Fock distribution with sinh^2 r = mean_n; odd levels
/// carry no population.
inline motion::MotionalDistribution squeezed_occupations(double mean_n, int n_max = 60)
{
    if (mean_n < 0.0)
        throw std::invalid_argument("squeezed_occupations: mean_n must be >= 0");
    motion::MotionalDistribution d;
    d.probs = Eigen::VectorXd::Zero(n_max + 1);
    if (mean_n == 0.0) {
        d.probs(0) = 1.0;
        return d;
    }
    const double r = std::asinh(std::sqrt(mean_n));
    const double t2 = std::tanh(r) * std::tanh(r);
    double term = 1.0 / std::cosh(r); // P(0)
    for (int m = 0; 2 * m <= n_max; ++m) {
        d.probs(2 * m) = term;
        // P(2m+2)/P(2m) = tanh^2 r (2m+1)/(2m+2)
        term *= t2 * (2.0 * m + 1.0) / (2.0 * m + 2.0);
    }
    d.probs /= d.probs.sum();
    return d;
}

/// Solves the phonon mode equation across the ramp with vacuum initial
/// conditions and extracts the Bogoliubov coefficients against the
/// final-frequency plane waves; r = arcsinh |beta|.
///
/// `mode_frequency` is the Coulomb normal-mode term entering as
/// omega_kappa^2 / b^3(t); zero for a single ion (or the centre-of-mass
/// mode), where the phonon frequency is the axial confinement itself.
inline SqueezeResult mode_squeezing(const RampProfile& ramp, int n_max = 60,
                                    double mode_frequency = 0.0)
{
    ramp.validate();
    if (mode_frequency < 0.0)
        throw std::invalid_argument("mode_squeezing: mode frequency must be >= 0");
    const double wk2 = mode_frequency * mode_frequency;
    const double w0 = std::sqrt(std::pow(ramp.initial_frequency, 2) + wk2);
    const double wz0 = ramp.initial_frequency;

    // state: (Re f, Im f, Re f', Im f', b, b')
    using State = Eigen::Matrix<double, 6, 1>;
    auto mode_w2 = [&](double t, double b) {
        const double wz = ramp.frequency(t);
        return wz * wz + wk2 / (b * b * b);
    };
    auto deriv = [&](double t, const State& y) -> State {
        const double wz = ramp.frequency(t);
        const double w2 = mode_w2(t, y(4));
        State d;
        d << y(2), y(3), -w2 * y(0), -w2 * y(1), y(5), -wz * wz * y(4) + wz0 * wz0 / (y(4) * y(4));
        return d;
    };

    State y;
    const double f0 = 1.0 / std::sqrt(2.0 * w0);
    y << f0, 0.0, 0.0, -w0 * f0, 1.0, 0.0; // vacuum mode, unscaled crystal

    const double w_max = std::sqrt(std::pow(std::max(wz0, ramp.final_frequency), 2) + wk2);
    const double settle = 4.0 * constants::two_pi / ramp.final_frequency;
    const double duration = ramp.rise_time + settle;
    double step = std::min(constants::two_pi / w_max / 400.0, duration / 400.0);
    if (ramp.rise_time > 0.0 && ramp.shape != RampShape::sudden)
        step = std::min(step, ramp.rise_time / 400.0);

    double t = 0.0;
    while (t < duration) {
        const double h = std::min(step, duration - t);
        y = numerics::rk4_step(deriv, t, y, h);
        t += h;
    }

    const double w1 = std::sqrt(mode_w2(t, y(4)));
    const complexd f(y(0), y(1));
    const complexd fp(y(2), y(3));
    const complexd i_unit(0.0, 1.0);
    const complexd phase = std::exp(i_unit * w1 * t);
    const complexd alpha = 0.5 * std::sqrt(2.0 * w1) * (f + i_unit * fp / w1) * phase;
    const complexd beta = 0.5 * std::sqrt(2.0 * w1) * (f - i_unit * fp / w1) * std::conj(phase);

    SqueezeResult r;
    r.bogoliubov_norm = std::norm(alpha) - std::norm(beta);
    if (std::abs(r.bogoliubov_norm - 1.0) > 1e-6)
        throw std::runtime_error("mode_squeezing: Bogoliubov normalisation lost");
    r.mean_n = std::norm(beta);
    r.squeeze_parameter = std::asinh(std::abs(beta));
    r.occupations = squeezed_occupations(r.mean_n, n_max);
    return r;
}

// Thermal heating of the axial mode during an experiment; never applied
// automatically, the run duration stays short against 1/rate.
inline constexpr double default_heating_rate = 0.01e3; // quanta per second

/// Quanta added by constant-rate heating over `duration` seconds.
inline double heating_added_quanta(double duration, double rate = default_heating_rate)
{
    if (duration < 0.0 || rate < 0.0)
        throw std::invalid_argument("heating_added_quanta: needs non-negative inputs");
    return rate * duration;
}

enum class ReadoutVariant { second_red, first_red };

/// Simulates the sideband readout: a red-sideband pi pulse (order 2 or 1,
/// calibrated to the lowest participating level) followed by a carrier pi
/// pulse exchanging the electronic populations. Returns the probability of
/// ending electronically bright.
inline double readout_protocol(const motion::MotionalDistribution& dist, double eta,
                               double base_rabi, ReadoutVariant variant)
{
    dist.validate();
    const int order = variant == ReadoutVariant::second_red ? 2 : 1;
    const int n_max = dist.n_max();

    // joint population over (electronic level, fock number); start bright
    Eigen::VectorXd bright = dist.probs;
    Eigen::VectorXd dark = Eigen::VectorXd::Zero(n_max + 1);

    const double tau_red = constants::pi / std::abs(motion::raman_rabi(order, 0, eta, base_rabi));
    for (int n = n_max; n >= order; --n) {
        const double rabi = std::abs(motion::raman_rabi(n, n - order, eta, base_rabi));
        const double s = std::sin(0.5 * rabi * tau_red);
        const double moved = bright(n) * s * s;
        bright(n) -= moved;
        dark(n - order) += moved;
    }

    const double tau_carrier = constants::pi / std::abs(motion::raman_rabi(0, 0, eta, base_rabi));
    for (int n = 0; n <= n_max; ++n) {
        const double rabi = std::abs(motion::raman_rabi(n, n, eta, base_rabi));
        const double s = std::sin(0.5 * rabi * tau_carrier);
        const double p = s * s;
        const double b = bright(n);
        const double d = dark(n);
        bright(n) = b * (1.0 - p) + d * p;
        dark(n) = d * (1.0 - p) + b * p;
    }
    return bright.sum();
}

} // namespace iontrap::universe
