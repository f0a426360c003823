#pragma once

#include "iontrap/bloch.hpp"
#include "iontrap/constants.hpp"
#include "iontrap/numerics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

// Excess-micromotion physics: modulation parameters, Bloch equations driven
// by a phase-modulated field, the Bessel sideband spectrum, photon-RF
// correlation histograms with the TAC conversion artefact, and the search
// for compensation settings.

namespace iontrap::micromotion {

struct MicromotionParams {
    double modulation_index = 0.0; // beta
    double phase = 0.0;            // delta (rad)
    double dc_offset = 0.0;        // x_DC (m)
    double rf_phase_diff = 0.0;    // phi_RF (rad)
    double geometry_factor = 1.4;  // alpha
    double wavenumber = constants::two_pi / constants::transition_wavelength; // k (rad/m)

    void validate() const
    {
        if (modulation_index < 0.0)
            throw std::invalid_argument("MicromotionParams: beta must be >= 0");
    }
};

/// Modulation strength and phase of excess micromotion,
/// beta = sqrt((k q x_DC / 2)^2 + (k q R alpha phi_RF / 4)^2),
/// delta = atan2(-R alpha phi_RF, 2 x_DC).
inline MicromotionParams modulation_params(double k, double q, double x_dc, double radius,
                                           double alpha, double phi_rf)
{
    if (q < 0.0)
        throw std::invalid_argument("modulation_params: q must be >= 0");
    MicromotionParams p;
    p.dc_offset = x_dc;
    p.rf_phase_diff = phi_rf;
    p.geometry_factor = alpha;
    p.wavenumber = k;
    const double a = 0.5 * k * q * x_dc;
    const double b = 0.25 * k * q * radius * alpha * phi_rf;
    p.modulation_index = std::sqrt(a * a + b * b);
    p.phase = std::atan2(-radius * alpha * phi_rf, 2.0 * x_dc);
    return p;
}

/// Integrates the Bloch equations with the drive phase modulated by
/// beta cos(Omega_RF t + delta). Reduces exactly to the unmodulated
/// equations for beta = 0.
inline bloch::Trajectory evolve_modulated_bloch(const bloch::TwoLevelParams& p,
                                                const MicromotionParams& mm, double drive,
                                                double duration, double step = 0.0)
{
    mm.validate();
    if (step <= 0.0) {
        step = bloch::default_step(p);
        if (drive > 0.0)
            step = std::min(step, 1.0 / (50.0 * drive * std::max(1.0, mm.modulation_index)));
    }
    const double delta = p.detuning;
    const double beta = mm.modulation_index;
    const double phase0 = mm.phase;
    auto phase = [=](double t) { return delta * t + beta * std::cos(drive * t + phase0); };
    return bloch::detail::integrate(p, bloch::DensityMatrix::ground(), duration, step, phase);
}

/// Mean upper-state population over one RF period once transients have
/// damped out, computed from the trailing part of a modulated trajectory.
inline double mean_over_rf_period(const bloch::TwoLevelParams& p, const MicromotionParams& mm,
                                  double drive, double settle_time = 0.0)
{
    if (settle_time <= 0.0)
        settle_time = 30.0 / p.linewidth;
    const double period = constants::two_pi / drive;
    double step = std::min(bloch::default_step(p), period / 512.0);
    // commensurate grid: an integer number of samples covers one period and
    // the settling stretch ends on a grid point
    const long per_period = std::lround(period / step);
    step = period / static_cast<double>(per_period);
    const long settle_steps = static_cast<long>(std::ceil(settle_time / step));
    const double duration = (settle_steps + per_period) * step;
    const auto traj = evolve_modulated_bloch(p, mm, drive, duration, step);
    double acc = 0.0;
    const auto count = static_cast<std::size_t>(per_period);
    for (std::size_t i = traj.size() - count; i < traj.size(); ++i)
        acc += traj[i].state.pop_upper;
    return acc / static_cast<double>(count);
}

/// Bessel-expansion mean population in the weak-field normalisation,
/// <rho_bb> = Omega^2 sum_n J_n^2(beta) / ((Delta + n Omega_RF)^2 + (Gamma/2)^2);
/// compare against saturated dynamics by shape, not absolute scale.
inline Eigen::VectorXd mean_sideband_spectrum(const bloch::TwoLevelParams& p, double beta,
                                              double drive, const Eigen::VectorXd& detunings)
{
    if (p.linewidth <= 0.0)
        throw std::invalid_argument("mean_sideband_spectrum: Gamma must be > 0");
    int order = 2;
    while (order < 400) {
        const double j = std::cyl_bessel_j(order, beta);
        if (j * j < 1e-12)
            break;
        ++order;
    }
    const double hw2 = 0.25 * p.linewidth * p.linewidth;
    Eigen::VectorXd out(detunings.size());
    for (int i = 0; i < detunings.size(); ++i) {
        double s = 0.0;
        for (int n = -order; n <= order; ++n) {
            const double jn = std::cyl_bessel_j(std::abs(n), beta); // J_{-n}^2 = J_n^2
            const double d = detunings(i) + n * drive;
            s += jn * jn / (d * d + hw2);
        }
        out(i) = p.rabi * p.rabi * s;
    }
    return out;
}

struct CorrelationHistogram {
    Eigen::VectorXd bins;     // counts per time bin over [0, 2pi/Omega_RF)
    double bin_width = 0.0;   // seconds
    long total = 0;           // photons drawn
    double tac_cutoff = 7e-9; // seconds
};

/// Draws `photons` photon arrival phases proportional to the periodic trace
/// rho_bb(t) and histograms the timespan to the next RF rising edge. Spans
/// below the cutoff are dropped, except those within one bin of the cutoff,
/// which pile into the cutoff bin.
inline CorrelationHistogram synthesize_correlation_histogram(const Eigen::VectorXd& mean_trace,
                                                             double rf_period, long photons,
                                                             std::uint64_t rng_seed,
                                                             double tac_cutoff = 7e-9,
                                                             int num_bins = 64)
{
    if (photons <= 0)
        throw std::invalid_argument("synthesize_correlation_histogram: photons must be > 0");
    if (mean_trace.size() < 2 || mean_trace.minCoeff() < 0.0)
        throw std::invalid_argument("synthesize_correlation_histogram: bad trace");

    // inverse-CDF sampling over the piecewise-constant trace
    const int m = static_cast<int>(mean_trace.size());
    Eigen::VectorXd cdf(m);
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
        acc += mean_trace(i);
        cdf(i) = acc;
    }
    if (acc <= 0.0)
        throw std::invalid_argument("synthesize_correlation_histogram: trace sums to zero");
    cdf /= acc;

    CorrelationHistogram h;
    h.bins = Eigen::VectorXd::Zero(num_bins);
    h.bin_width = rf_period / num_bins;
    h.total = photons;
    h.tac_cutoff = tac_cutoff;
    const int cutoff_bin = std::min(num_bins - 1, static_cast<int>(tac_cutoff / h.bin_width));

    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (long i = 0; i < photons; ++i) {
        const double u = uni(rng);
        const int idx = static_cast<int>(std::lower_bound(cdf.data(), cdf.data() + m, u) - cdf.data());
        const double frac = uni(rng); // position within the trace cell
        const double t = (idx + frac) / m * rf_period;
        const double span = rf_period - t; // time to next rising edge
        if (span < tac_cutoff) {
            if (span >= tac_cutoff - h.bin_width)
                h.bins(cutoff_bin) += 1.0; // TAC pile-up
            continue; // not converted at all
        }
        int b = static_cast<int>(span / h.bin_width);
        if (b >= num_bins)
            b = num_bins - 1;
        h.bins(b) += 1.0;
    }
    return h;
}

/// Chi-square flatness p-value over the bins strictly above the cutoff bin.
inline double histogram_flatness_p_value(const CorrelationHistogram& h)
{
    const int cutoff_bin = std::min(static_cast<int>(h.bins.size()) - 1,
                                    static_cast<int>(h.tac_cutoff / h.bin_width));
    const int first = cutoff_bin + 1;
    const int k = static_cast<int>(h.bins.size()) - first;
    if (k < 2)
        throw std::invalid_argument("histogram_flatness_p_value: too few bins above cutoff");
    double n = 0.0;
    for (int i = first; i < h.bins.size(); ++i)
        n += h.bins(i);
    const double expected = n / k;
    if (expected <= 0.0)
        return 1.0;
    double stat = 0.0;
    for (int i = first; i < h.bins.size(); ++i) {
        const double d = h.bins(i) - expected;
        stat += d * d / expected;
    }
    return numerics::chi_square_p_value(stat, k - 1);
}

// --- compensation search ----------------------------------------------------

struct CompensationSettings {
    double differential_voltage = 0.0;
    double compensation_voltage = 0.0;
    double axial_position = 0.0;
};

/// Maps settings to the residual modulation index seen by each beam.
using CompensationObjective =
    std::function<std::vector<double>(const CompensationSettings&)>;

struct CompensationResult {
    CompensationSettings settings;
    double residual_beta = 0.0; // max over beam directions
    bool underdetermined = false;
    // for a single-beam objective: settings along family_direction (in the
    // differential/compensation plane) keep the histogram flat
    Eigen::Vector2d family_direction = Eigen::Vector2d::Zero();
};

/// Minimises the largest per-beam modulation index over the three
/// compensation knobs. A single-direction objective is flagged as
/// underdetermined and the flat-curve locus direction is reported.
inline CompensationResult compensation_search(const CompensationObjective& objective,
                                              const CompensationSettings& start = {})
{
    auto pack = [](const CompensationSettings& s) {
        Eigen::VectorXd v(3);
        v << s.differential_voltage, s.compensation_voltage, s.axial_position;
        return v;
    };
    auto unpack = [](const Eigen::VectorXd& v) {
        return CompensationSettings{v(0), v(1), v(2)};
    };
    auto worst = [&](const Eigen::VectorXd& v) {
        const auto betas = objective(unpack(v));
        double m = 0.0;
        for (double b : betas)
            m = std::max(m, b);
        return m;
    };

    const std::size_t n_beams = objective(start).size();
    if (n_beams == 0)
        throw std::invalid_argument("compensation_search: objective reports no beams");

    Eigen::VectorXd best = numerics::nelder_mead(worst, pack(start), 1.0, 1e-13);
    best = numerics::nelder_mead(worst, best, 1e-4, 1e-14); // refine

    CompensationResult r;
    r.settings = unpack(best);
    r.residual_beta = worst(best);
    if (n_beams < 2) {
        r.underdetermined = true;
        // direction in the (differential, compensation) plane along which the
        // single beam stays dark: orthogonal to the numerical gradient of beta
        const double h = 1e-6;
        Eigen::VectorXd g(2);
        for (int i = 0; i < 2; ++i) {
            Eigen::VectorXd vp = best, vm = best;
            vp(i) += h;
            vm(i) -= h;
            g(i) = (worst(vp) - worst(vm)) / (2.0 * h);
        }
        if (g.norm() > 0.0) {
            r.family_direction << -g(1), g(0);
            r.family_direction.normalize();
        }
    }
    return r;
}

struct LinearFieldModel {
    // external stray field (V/m) in the radial plane and axial offset (m)
    double external_field_x = 0.0;
    double external_field_y = 0.0;
    double axial_offset = 0.0;
    // knob gains: field per volt, displacement handled directly for the axial knob
    double comp_gain = 1.0; // V/m per V on the compensation electrode (along x_ext)
    double diff_gain = 1.0; // V/m per V of differential voltage (along y_ext)
    double displacement_per_field = 1.6e-9; // m per V/m (e / (m omega_r^2))
    double k = constants::two_pi / constants::transition_wavelength;
    double q = 0.389;
    double axial_coupling = 0.05; // effective beta per metre of axial offset, relative units
    std::vector<Eigen::Vector3d> beam_directions = {
        Eigen::Vector3d(1.0, 0.0, 0.3).normalized(),
        Eigen::Vector3d(0.0, 1.0, 0.3).normalized(),
    };

    /// Residual modulation index per beam. Displacement-driven and
    /// axial-slit micromotion enter in quadrature.
    std::vector<double> operator()(const CompensationSettings& s) const
    {
        const double ex = external_field_x - comp_gain * s.compensation_voltage;
        const double ey = external_field_y - diff_gain * s.differential_voltage;
        const double xd = displacement_per_field * ex;
        const double yd = displacement_per_field * ey;
        const double za = axial_coupling * (axial_offset - s.axial_position) * 1e9;
        std::vector<double> betas;
        betas.reserve(beam_directions.size());
        for (const auto& dir : beam_directions) {
            const double radial = 0.5 * k * q * (dir.x() * xd + dir.y() * yd);
            const double axial = dir.z() * za;
            betas.push_back(std::sqrt(radial * radial + axial * axial));
        }
        return betas;
    }
};

} // namespace iontrap::micromotion
