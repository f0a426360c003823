#pragma once

#include "iontrap/constants.hpp"
#include "iontrap/numerics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

// Two-level optical physics: integration of the optical Bloch equations in
// the rotating frame, steady states, saturation and power broadening, and
// attenuation of light in a saturated medium.

namespace iontrap::bloch {

using complexd = std::complex<double>;

struct TwoLevelParams {
    double rabi = 0.0;      // Rabi frequency Omega (rad/s)
    double detuning = 0.0;  // detuning Delta = omega_0 - omega (rad/s)
    double linewidth = 0.0; // natural linewidth Gamma (rad/s), >= 0

    void validate() const
    {
        if (!std::isfinite(rabi) || !std::isfinite(detuning) || !std::isfinite(linewidth))
            throw std::invalid_argument("TwoLevelParams: values must be finite");
        if (linewidth < 0.0)
            throw std::invalid_argument("TwoLevelParams: linewidth must be >= 0");
    }
};

struct DensityMatrix {
    double pop_lower = 1.0;       // rho_aa
    double pop_upper = 0.0;       // rho_bb
    complexd coherence{0.0, 0.0}; // rho_ab

    static DensityMatrix ground()
    {
        return DensityMatrix{};
    }

    bool valid(double tol = 1e-9) const
    {
        if (std::abs(pop_lower + pop_upper - 1.0) > tol)
            return false;
        if (pop_upper < -tol || pop_upper > 1.0 + tol)
            return false;
        return std::norm(coherence) <= pop_lower * pop_upper + tol;
    }
};

struct TrajectorySample {
    double time = 0.0;
    DensityMatrix state;
};

using Trajectory = std::vector<TrajectorySample>;

/// Steady-state upper-state population after Rabi oscillations have damped
/// out. Requires Gamma > 0; always in [0, 1/2).
inline double steady_state_population(const TwoLevelParams& p)
{
    p.validate();
    if (p.linewidth <= 0.0)
        throw std::domain_error("steady_state_population: undefined for Gamma = 0");
    const double o2 = p.rabi * p.rabi;
    const double hw = 0.5 * p.linewidth;
    return 0.25 * o2 / (p.detuning * p.detuning + hw * hw + 0.5 * o2);
}

/// Power-broadened linewidth sqrt(Gamma^2 + 2 Omega^2).
inline double effective_linewidth(double rabi, double linewidth)
{
    if (rabi < 0.0 || linewidth < 0.0)
        throw std::invalid_argument("effective_linewidth: arguments must be >= 0");
    return std::sqrt(linewidth * linewidth + 2.0 * rabi * rabi);
}

/// Saturation intensity hbar Gamma omega_0^3 / (12 pi c^2) in W/m^2.
inline double saturation_intensity(double linewidth, double transition_frequency)
{
    if (linewidth < 0.0 || transition_frequency <= 0.0)
        throw std::invalid_argument("saturation_intensity: bad arguments");
    const double w3 = transition_frequency * transition_frequency * transition_frequency;
    return constants::hbar * linewidth * w3
        / (12.0 * constants::pi * constants::speed_of_light * constants::speed_of_light);
}

/// Rabi frequency at intensity I, anchored at Omega^2 = Gamma^2/2 for
/// I = I_sat and linear in intensity: Omega = Gamma sqrt(I / (2 I_sat)).
inline double rabi_from_intensity(double intensity, double i_sat, double linewidth)
{
    if (intensity < 0.0 || i_sat <= 0.0)
        throw std::invalid_argument("rabi_from_intensity: needs I >= 0 and I_sat > 0");
    return linewidth * std::sqrt(intensity / (2.0 * i_sat));
}

struct EffectiveRabi {
    double frequency = 0.0; // Omega_eff = sqrt(Omega^2 + Delta^2)
    double amplitude = 0.0; // peak-to-peak rho_bb amplitude Omega^2/Omega_eff^2
};

inline EffectiveRabi effective_rabi(double rabi, double detuning)
{
    const double f2 = rabi * rabi + detuning * detuning;
    if (f2 == 0.0)
        throw std::domain_error("effective_rabi: amplitude undefined for Omega = Delta = 0");
    return {std::sqrt(f2), rabi * rabi / f2};
}

/// Default integrator step resolving both the effective Rabi cycle and the
/// decay: min(1/(50 Omega_eff), 1/(50 Gamma)).
inline double default_step(const TwoLevelParams& p)
{
    const double oeff = std::sqrt(p.rabi * p.rabi + p.detuning * p.detuning);
    double h = std::numeric_limits<double>::infinity();
    if (oeff > 0.0)
        h = std::min(h, 1.0 / (50.0 * oeff));
    if (p.linewidth > 0.0)
        h = std::min(h, 1.0 / (50.0 * p.linewidth));
    if (!std::isfinite(h))
        h = 1.0; // free evolution, nothing to resolve
    return h;
}

namespace detail {

// Integration state (rho_bb, rho_ab) with the phase of the driving field
// supplied per time step; shared by the plain and the modulated equations.
struct BlochState {
    double pop = 0.0;
    complexd coh{0.0, 0.0};

    BlochState operator+(const BlochState& o) const { return {pop + o.pop, coh + o.coh}; }
    friend BlochState operator*(double s, const BlochState& y) { return {s * y.pop, s * y.coh}; }
};

// Rotating-frame equations with explicit exp(+-i phi(t)) factors, where
// phi(t) = Delta t for the plain case.
template <typename Phase>
Trajectory integrate(const TwoLevelParams& p, const DensityMatrix& initial, double duration,
                     double step, const Phase& phase)
{
    p.validate();
    if (duration < 0.0 || step <= 0.0 || !std::isfinite(duration) || !std::isfinite(step))
        throw std::invalid_argument("evolve_bloch: needs duration >= 0 and step > 0");
    if (!initial.valid())
        throw std::invalid_argument("evolve_bloch: initial state violates invariants");

    // The drive phase phi(t) carries the full detuning (and any modulation);
    // the coherence is damped at Gamma/2. Written with the phases explicit
    // and the detuning only in them, the fixed points reproduce the
    // closed-form steady state for every (Omega, Delta, Gamma).
    const double omega = p.rabi;
    const double gamma = p.linewidth;
    auto deriv = [&](double t, const BlochState& y) -> BlochState {
        const complexd rot = std::exp(complexd(0.0, phase(t)));
        BlochState d;
        d.pop = omega * std::imag(y.coh * rot) - gamma * y.pop;
        d.coh = complexd(0.0, 0.5 * omega) * std::conj(rot) * (1.0 - 2.0 * y.pop)
            - 0.5 * gamma * y.coh;
        return d;
    };

    BlochState y{initial.pop_upper, initial.coherence};
    Trajectory out;
    const auto n_steps = static_cast<long>(std::floor(duration / step + 1e-9));
    out.reserve(static_cast<std::size_t>(n_steps) + 2);
    auto record = [&](double t) {
        DensityMatrix m;
        m.pop_upper = y.pop;
        m.pop_lower = 1.0 - y.pop;
        m.coherence = y.coh;
        out.push_back({t, m});
    };
    record(0.0);
    double t = 0.0;
    for (long i = 0; i < n_steps; ++i) {
        y = numerics::rk4_step(deriv, t, y, step);
        t = (i + 1) * step;
        record(t);
    }
    if (t < duration - 1e-12 * std::max(1.0, duration)) {
        y = numerics::rk4_step(deriv, t, y, duration - t);
        t = duration;
        record(t);
    }
    return out;
}

} // namespace detail

/// Integrates the optical Bloch equations from `initial` over `duration`,
/// sampling every `step` seconds (pass step <= 0 for the default step).
inline Trajectory evolve_bloch(const TwoLevelParams& p, const DensityMatrix& initial,
                               double duration, double step = 0.0)
{
    if (step <= 0.0)
        step = default_step(p);
    const double delta = p.detuning;
    return detail::integrate(p, initial, duration, step, [delta](double t) { return delta * t; });
}

struct AttenuationModel {
    double einstein_a = 0.0;            // spontaneous rate A (1/s)
    double einstein_b = 0.0;            // stimulated coefficient B
    double number_density_factor = 0.0; // lumped prefactor hbar omega B N / (c V)
    std::vector<double> intensities;    // per-source intensities

    void validate() const
    {
        if (einstein_a < 0.0 || einstein_b < 0.0 || number_density_factor < 0.0)
            throw std::invalid_argument("AttenuationModel: coefficients must be >= 0");
        for (double i : intensities)
            if (i < 0.0)
                throw std::invalid_argument("AttenuationModel: intensities must be >= 0");
    }

    double total_intensity() const
    {
        double s = 0.0;
        for (double i : intensities)
            s += i;
        return s;
    }
};

/// Relative attenuation d(I_i)/dz / I_i, identical for every contributing
/// source; tends to zero as the medium saturates (optical bleaching).
inline double relative_attenuation(const AttenuationModel& m, double total_intensity)
{
    m.validate();
    if (total_intensity < 0.0)
        throw std::invalid_argument("relative_attenuation: intensity must be >= 0");
    const double denom = constants::speed_of_light * m.einstein_a + 2.0 * m.einstein_b * total_intensity;
    const double frac = denom > 0.0 ? 2.0 * m.einstein_b * total_intensity / denom : 0.0;
    return -m.number_density_factor * (1.0 - frac);
}

/// Fluorescent scattering rate rho_bb * Gamma of the steady state.
inline double scattering_rate(const TwoLevelParams& p)
{
    return steady_state_population(p) * p.linewidth;
}

} // namespace iontrap::bloch
