#pragma once

#include "iontrap/constants.hpp"
#include "iontrap/numerics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

// Coupling between the electronic qubit and the motional Fock states:
// Lamb-Dicke parameter, Raman Rabi frequencies, thermal distributions,
// flopping curves and frequency scans, the dephasing-revival envelope, and
// the shelving/Zeeman frequency formulas.

namespace iontrap::motion {

enum class Geometry { copropagating, orthogonal };

struct RamanConfig {
    double base_rabi = constants::two_pi * 202.0e3; // Omega_R (rad/s)
    double lamb_dicke = 0.3;                        // eta
    double raman_detuning = constants::two_pi * 80.0e9; // Delta_R (rad/s)
    Geometry geometry = Geometry::orthogonal;
    double leg_rabi_lower = 0.0;  // Omega_down (rad/s)
    double leg_rabi_upper = 0.0;  // Omega_up (rad/s)
    double intensity_lower = 0.0; // W/m^2
    double intensity_upper = 0.0; // W/m^2
    double effective_wavenumber = std::sqrt(2.0) * constants::two_pi / constants::transition_wavelength;

    double eta() const { return geometry == Geometry::copropagating ? 0.0 : lamb_dicke; }
};

struct MotionalDistribution {
    Eigen::VectorXd probs; // p_n for n = 0..n_max

    int n_max() const { return static_cast<int>(probs.size()) - 1; }

    double mean_n() const
    {
        double m = 0.0;
        for (int n = 0; n < probs.size(); ++n)
            m += n * probs(n);
        return m;
    }

    void validate(double tol = 1e-9) const
    {
        if (probs.size() == 0)
            throw std::invalid_argument("MotionalDistribution: empty");
        if (probs.minCoeff() < -tol)
            throw std::invalid_argument("MotionalDistribution: negative probability");
        if (std::abs(probs.sum() - 1.0) > tol)
            throw std::invalid_argument("MotionalDistribution: not normalised");
    }

    static MotionalDistribution fock(int n, int n_max)
    {
        MotionalDistribution d;
        d.probs = Eigen::VectorXd::Zero(n_max + 1);
        d.probs(n) = 1.0;
        return d;
    }
};

struct ZeemanConfig {
    double field = 5.6e-4;     // B (tesla)
    double lande_lower = 1.0 / 3.0;   // g_F of the F=3 manifold
    double lande_upper = -1.0 / 3.0;  // g_F of the F=2 manifold
    double hyperfine_splitting = constants::two_pi * 1788.850e6; // omega_0 (rad/s)
};

/// Lamb-Dicke parameter eta = k_eff sqrt(hbar / (2 m omega)).
inline double lamb_dicke(double k_eff, double mass, double trap_frequency)
{
    if (trap_frequency <= 0.0 || mass <= 0.0)
        throw std::invalid_argument("lamb_dicke: omega and m must be > 0");
    return k_eff * std::sqrt(constants::hbar / (2.0 * mass * trap_frequency));
}

/// Co-propagating Raman Rabi frequency Omega_R = 2 Omega_down Omega_up / Delta_R.
inline double raman_rabi_copropagating(double leg_rabi_lower, double leg_rabi_upper,
                                       double raman_detuning)
{
    if (raman_detuning == 0.0)
        throw std::domain_error("raman_rabi_copropagating: Delta_R must be nonzero");
    return 2.0 * leg_rabi_lower * leg_rabi_upper / raman_detuning;
}

/// AC Stark shift of one qubit level, Delta E = hbar Omega^2 / Delta_R.
inline double ac_stark_shift(double leg_rabi, double raman_detuning)
{
    if (raman_detuning == 0.0)
        throw std::domain_error("ac_stark_shift: Delta_R must be nonzero");
    return constants::hbar * leg_rabi * leg_rabi / raman_detuning;
}

/// Scales a measured Raman Rabi frequency to new beam intensities and
/// detuning, Omega_R proportional to sqrt(I_lower I_upper) / Delta_R.
inline double scale_raman_rabi(double measured_rabi, double i_lower, double i_upper,
                               double ref_i_lower, double ref_i_upper, double detuning_ratio = 1.0)
{
    if (ref_i_lower <= 0.0 || ref_i_upper <= 0.0 || detuning_ratio == 0.0)
        throw std::invalid_argument("scale_raman_rabi: bad reference");
    return measured_rabi * std::sqrt(i_lower * i_upper / (ref_i_lower * ref_i_upper))
        / detuning_ratio;
}

/// Generalised Laguerre polynomial L_n^alpha(x) by the three-term recurrence.
inline double laguerre(int n, int alpha, double x)
{
    if (n < 0 || alpha < 0)
        throw std::invalid_argument("laguerre: n and alpha must be >= 0");
    double prev = 1.0;
    if (n == 0)
        return prev;
    double cur = 1.0 + alpha - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Motion-coupled Raman Rabi frequency between Fock states n and n',
/// Omega_R e^{-eta^2/2} sqrt(n_<!/n_>!) eta^{|dn|} L_{n_<}^{|dn|}(eta^2).
/// Symmetric in (n, n'); returned with sign of the Laguerre factor.
inline double raman_rabi(int n, int n_prime, double eta, double base_rabi)
{
    if (n < 0 || n_prime < 0)
        throw std::invalid_argument("raman_rabi: Fock numbers must be >= 0");
    const int lo = std::min(n, n_prime);
    const int hi = std::max(n, n_prime);
    const int dn = hi - lo;
    const double x = eta * eta;
    double fact_ratio = 1.0; // sqrt(n_<! / n_>!)
    for (int k = lo + 1; k <= hi; ++k)
        fact_ratio /= std::sqrt(static_cast<double>(k));
    return base_rabi * std::exp(-0.5 * x) * fact_ratio * std::pow(eta, dn) * laguerre(lo, dn, x);
}

struct ThermalResult {
    MotionalDistribution distribution;
    double mean_n = 0.0; // 1 / (exp(hbar omega / k_B T) - 1)
};

/// Thermal (Maxwell-Boltzmann) Fock distribution at temperature T, truncated
/// at n_max and renormalised.
inline ThermalResult thermal_distribution(double temperature, double trap_frequency, int n_max)
{
    if (temperature <= 0.0 || trap_frequency <= 0.0)
        throw std::invalid_argument("thermal_distribution: T and omega must be > 0");
    if (n_max < 0)
        throw std::invalid_argument("thermal_distribution: n_max must be >= 0");
    const double ratio = constants::hbar * trap_frequency / (constants::boltzmann * temperature);
    const double x = std::exp(-ratio);
    ThermalResult r;
    r.distribution.probs = Eigen::VectorXd(n_max + 1);
    for (int n = 0; n <= n_max; ++n)
        r.distribution.probs(n) = std::pow(x, n);
    r.distribution.probs /= r.distribution.probs.sum();
    r.mean_n = 1.0 / (std::exp(ratio) - 1.0);
    return r;
}

/// Default Fock-space truncation for a thermal state of mean occupation n_bar.
inline int default_n_max(double mean_n)
{
    return std::max(50, static_cast<int>(std::ceil(10.0 * mean_n)));
}

/// Lower-state population after driving the order `delta_n` transition for
/// time t at detuning `detuning`, averaged over the motional distribution.
/// Levels with no partner state (n < |delta_n| on red sidebands) do not flop.
inline double flopping_probability(const MotionalDistribution& dist, const RamanConfig& cfg,
                                   int delta_n, double detuning, double t)
{
    const double eta = cfg.eta();
    double p_down = 0.0;
    for (int n = 0; n <= dist.n_max(); ++n) {
        const double p = dist.probs(n);
        if (p == 0.0)
            continue;
        const int n_prime = n + delta_n;
        if (n_prime < 0) {
            p_down += p;
            continue;
        }
        const double rabi = std::abs(raman_rabi(n, n_prime, eta, cfg.base_rabi));
        const double f2 = rabi * rabi + detuning * detuning;
        if (f2 == 0.0) {
            p_down += p;
            continue;
        }
        const double amp = rabi * rabi / f2;
        const double s = std::sin(0.5 * std::sqrt(f2) * t);
        p_down += p * (1.0 - amp * s * s);
    }
    return p_down;
}

/// P_down(t) over a set of pulse durations.
inline Eigen::VectorXd flopping_curve(const MotionalDistribution& dist, const RamanConfig& cfg,
                                      int delta_n, double detuning,
                                      const Eigen::VectorXd& times)
{
    dist.validate();
    Eigen::VectorXd out(times.size());
    for (int i = 0; i < times.size(); ++i)
        out(i) = flopping_probability(dist, cfg, delta_n, detuning, times(i));
    return out;
}

/// P_down over a grid of drive frequencies (rad/s, absolute difference
/// frequencies). The carrier sits at the hyperfine splitting `carrier`,
/// sidebands at carrier +- k * axial. Every order contributes its exact
/// Rabi lineshape; contributions are summed per Fock level and clamped.
/// `rabi_spread` averages the lineshape over a shot-to-shot Rabi frequency
/// drawn uniformly within +-spread, the same noise model as the revival
/// envelope; the default applies no broadening.
inline Eigen::VectorXd frequency_scan(const MotionalDistribution& dist, const RamanConfig& cfg,
                                      double pulse_duration, const Eigen::VectorXd& drive_frequencies,
                                      double axial, double carrier, double rabi_spread = 0.0)
{
    dist.validate();
    if (pulse_duration <= 0.0)
        throw std::invalid_argument("frequency_scan: pulse duration must be > 0");
    if (rabi_spread < 0.0)
        throw std::invalid_argument("frequency_scan: rabi_spread must be >= 0");
    const double eta = cfg.eta();
    const int max_order = eta > 0.0 ? 2 : 0;
    const int spread_draws = rabi_spread > 0.0 ? 16 : 1;
    Eigen::VectorXd out(drive_frequencies.size());
    for (int i = 0; i < drive_frequencies.size(); ++i) {
        const double offset = drive_frequencies(i) - carrier;
        double p_down = 0.0;
        for (int n = 0; n <= dist.n_max(); ++n) {
            const double p = dist.probs(n);
            if (p == 0.0)
                continue;
            double transferred = 0.0;
            for (int order = -max_order; order <= max_order; ++order) {
                const int n_prime = n + order;
                if (n_prime < 0)
                    continue;
                const double delta = offset - order * axial;
                const double rabi0 = std::abs(raman_rabi(n, n_prime, eta, cfg.base_rabi));
                double channel = 0.0;
                for (int k = 0; k < spread_draws; ++k) {
                    const double scale = spread_draws > 1
                        ? 1.0 + rabi_spread / cfg.base_rabi * (2.0 * (k + 0.5) / spread_draws - 1.0)
                        : 1.0;
                    const double rabi = rabi0 * scale;
                    const double f2 = rabi * rabi + delta * delta;
                    if (f2 == 0.0)
                        continue;
                    const double s = std::sin(0.5 * std::sqrt(f2) * pulse_duration);
                    channel += rabi * rabi / f2 * s * s;
                }
                transferred += channel / spread_draws;
            }
            p_down += p * (1.0 - std::min(1.0, transferred));
        }
        out(i) = p_down;
    }
    return out;
}

/// Mean motional quantum number from sideband dip depths, n_bar = r/(1-r)
/// with r = A_rsb / A_bsb.
inline double mean_n_from_sidebands(double red_depth, double blue_depth)
{
    if (red_depth < 0.0 || blue_depth <= 0.0 || red_depth >= blue_depth)
        throw std::invalid_argument("mean_n_from_sidebands: needs 0 <= A_rsb < A_bsb");
    const double r = red_depth / blue_depth;
    return r / (1.0 - r);
}

/// Lower-state population for a Rabi frequency that fluctuates uniformly by
/// +-spread between repetitions: 1/2 (1 + sinc(spread t) cos(Omega_R t)).
inline double dephased_envelope(double base_rabi, double spread, double t)
{
    if (spread < 0.0)
        throw std::invalid_argument("dephased_envelope: spread must be >= 0");
    return 0.5 * (1.0 + numerics::sinc(spread * t) * std::cos(base_rabi * t));
}

/// Frequency of the i-th shelving pulse, omega_i = omega_0 + (2i-5)/3 mu_B B / hbar.
inline double shelving_frequency(const ZeemanConfig& cfg, int index)
{
    if (index < 1 || index > 4)
        throw std::invalid_argument("shelving_frequency: index must be in 1..4");
    const double zeeman = constants::bohr_magneton * cfg.field / constants::hbar;
    return cfg.hyperfine_splitting + (2.0 * index - 5.0) / 3.0 * zeeman;
}

struct FieldSolution {
    double field = 0.0;               // B (tesla)
    double hyperfine_splitting = 0.0; // omega_0 (rad/s)
};

/// Inverts the first two shelving frequencies to (B, omega_0).
inline FieldSolution solve_field(double omega_1, double omega_2)
{
    if (!(omega_2 > omega_1))
        throw std::invalid_argument("solve_field: needs omega_2 > omega_1");
    // omega_1 = w0 - mu B/hbar, omega_2 = w0 - (1/3) mu B/hbar
    const double zeeman = 1.5 * (omega_2 - omega_1); // mu_B B / hbar
    FieldSolution s;
    s.field = zeeman * constants::hbar / constants::bohr_magneton;
    s.hyperfine_splitting = omega_1 + zeeman;
    return s;
}

} // namespace iontrap::motion
