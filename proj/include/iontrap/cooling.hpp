#pragma once

#include "iontrap/constants.hpp"
#include "iontrap/motion.hpp"

#include <cmath>
#include <stdexcept>

// Doppler cooling limit and a deterministic resolved-sideband cooling model
// operating on motional distributions.

namespace iontrap::cooling {

/// Doppler cooling limit T_D = hbar Gamma / (2 k_B).
inline double doppler_limit(double linewidth)
{
    if (linewidth <= 0.0)
        throw std::invalid_argument("doppler_limit: Gamma must be > 0");
    return constants::hbar * linewidth / (2.0 * constants::boltzmann);
}

struct CoolingSchedule {
    int start_n = 30;         // first target level of the descending schedule
    int cycles_per_step = 2;  // repetitions of each target level
    double repump_success = 1.0;

    void validate() const
    {
        if (start_n < 1)
            throw std::invalid_argument("CoolingSchedule: start_n must be >= 1");
        if (cycles_per_step < 1)
            throw std::invalid_argument("CoolingSchedule: cycles_per_step must be >= 1");
        if (repump_success < 0.0 || repump_success > 1.0)
            throw std::invalid_argument("CoolingSchedule: repump_success must be in [0,1]");
    }
};

struct CoolingResult {
    motion::MotionalDistribution final;
    double lost_population = 0.0;
};

/// Runs the resolved-sideband cooling schedule on `initial` as deterministic
/// probability flow. Each pulse targets level n with a pi time calibrated to
/// Omega_{n-1,n}; every level m >= 1 transfers sin^2(Omega_{m-1,m} tau/2) of
/// its population one level down, repumped with probability repump_success
/// and otherwise counted as lost.
inline CoolingResult sideband_cool(const motion::MotionalDistribution& initial,
                                   const CoolingSchedule& schedule, double eta, double base_rabi)
{
    initial.validate();
    schedule.validate();
    if (base_rabi <= 0.0)
        throw std::invalid_argument("sideband_cool: base Rabi frequency must be > 0");

    const int n_max = initial.n_max();
    Eigen::VectorXd rabi(n_max + 1); // |Omega_{m-1,m}|, index m
    rabi(0) = 0.0;
    for (int m = 1; m <= n_max; ++m)
        rabi(m) = std::abs(motion::raman_rabi(m, m - 1, eta, base_rabi));

    CoolingResult r;
    r.final = initial;
    for (int target = schedule.start_n; target >= 1; --target) {
        if (target > n_max)
            continue;
        if (rabi(target) <= 0.0)
            continue; // dark transition, pulse would be infinitely long
        const double tau = constants::pi / rabi(target);
        for (int cycle = 0; cycle < schedule.cycles_per_step; ++cycle) {
            // all levels flop simultaneously within one pulse, so the moved
            // amounts are taken from the pre-pulse distribution
            const Eigen::VectorXd before = r.final.probs;
            for (int m = 1; m <= n_max; ++m) {
                const double s = std::sin(0.5 * rabi(m) * tau);
                const double moved = before(m) * s * s;
                r.final.probs(m) -= moved;
                r.final.probs(m - 1) += moved * schedule.repump_success;
                r.lost_population += moved * (1.0 - schedule.repump_success);
            }
        }
    }
    return r;
}

} // namespace iontrap::cooling
