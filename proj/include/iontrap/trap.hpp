#pragma once

#include "iontrap/constants.hpp"

#include <cmath>
#include <stdexcept>

// Classical motion in a linear RF quadrupole trap: stability parameters,
// secular frequencies, first-order trajectories, axial confinement and the
// radial-frequency splitting caused by the static confinement.

namespace iontrap::trap {

struct TrapConfig {
    double dc_voltage = -10.0;                      // U_0 (V)
    double rf_voltage = 1000.0;                     // V_0 (V)
    double drive = constants::two_pi * 56.0e6;      // Omega_RF (rad/s)
    double radius = 400.0e-6;                       // R (m)
    double mass = constants::ion_mass;              // m (kg)
    double axial_voltage = 40.0;                    // U_axial (V), outer minus centre
    double axial_width = 1.40e-3;                   // z_0 (m), measured value
    double charge = constants::elementary_charge;   // e (C)

    void validate() const
    {
        if (radius <= 0.0 || mass <= 0.0 || drive <= 0.0 || axial_width <= 0.0)
            throw std::invalid_argument("TrapConfig: R, m, Omega_RF, z_0 must be > 0");
    }
};

struct StabilityParams {
    double a = 0.0;
    double q = 0.0;
};

/// Dimensionless Mathieu parameters a = 4eU0/(m Omega^2 R^2),
/// q = 2eV0/(m Omega^2 R^2). `a` keeps the sign of U0.
inline StabilityParams stability_params(const TrapConfig& c)
{
    c.validate();
    const double denom = c.mass * c.drive * c.drive * c.radius * c.radius;
    return {4.0 * c.charge * c.dc_voltage / denom, 2.0 * c.charge * c.rf_voltage / denom};
}

struct SecularFrequencies {
    double omega_x = 0.0; // rad/s
    double omega_y = 0.0; // rad/s
};

struct UnstableAxisError : std::domain_error {
    double imaginary_magnitude; // |omega| of the defocused axis (rad/s)
    explicit UnstableAxisError(double mag)
        : std::domain_error("secular_frequencies: q^2/2 - a < 0, axis unstable"),
          imaginary_magnitude(mag)
    {
    }
};

/// First-order secular frequencies omega_{x,y} = (Omega/2) sqrt(q^2/2 +- a).
inline SecularFrequencies secular_frequencies(double a, double q, double drive)
{
    const double sx = 0.5 * q * q + a;
    const double sy = 0.5 * q * q - a;
    if (sx < 0.0)
        throw UnstableAxisError(0.5 * drive * std::sqrt(-sx));
    if (sy < 0.0)
        throw UnstableAxisError(0.5 * drive * std::sqrt(-sy));
    return {0.5 * drive * std::sqrt(sx), 0.5 * drive * std::sqrt(sy)};
}

/// First-order radial trajectory
/// x(t) = x0 cos(omega_x t + phi) (1 + (q/2) cos(Omega_RF t)).
/// Only the x axis needs to be stable here.
inline double radial_trajectory(const TrapConfig& c, double x0, double phase, double t)
{
    const auto [a, q] = stability_params(c);
    const double sx = 0.5 * q * q + a;
    if (sx < 0.0)
        throw UnstableAxisError(0.5 * c.drive * std::sqrt(-sx));
    const double omega_x = 0.5 * c.drive * std::sqrt(sx);
    return x0 * std::cos(omega_x * t + phase) * (1.0 + 0.5 * q * std::cos(c.drive * t));
}

/// Axial frequency omega_z = sqrt(2 e U_axial / (m z_0^2)).
inline double axial_frequency(double axial_voltage, double axial_width, double mass,
                              double charge = constants::elementary_charge)
{
    if (axial_voltage < 0.0)
        throw std::invalid_argument("axial_frequency: U_axial must be >= 0");
    if (axial_width <= 0.0 || mass <= 0.0)
        throw std::invalid_argument("axial_frequency: z_0 and m must be > 0");
    return std::sqrt(2.0 * charge * axial_voltage / (mass * axial_width * axial_width));
}

/// Approximate radial splitting omega_x - omega_y ~= Omega_RF a / (sqrt(2) q),
/// valid for a << q^2. When `within_validity` is supplied it reports whether
/// the inputs satisfy that regime (a < q^2/10, where the error stays below
/// five percent).
inline double radial_splitting(double a, double q, double drive, bool* within_validity = nullptr)
{
    if (q == 0.0)
        throw std::domain_error("radial_splitting: q must be nonzero");
    if (within_validity)
        *within_validity = std::abs(a) < 0.1 * q * q;
    return drive * a / (std::sqrt(2.0) * q);
}

} // namespace iontrap::trap
