#pragma once

// Physical constants (SI units) and the trapped-magnesium defaults used
// throughout the library.

namespace iontrap::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double boltzmann = 1.380649e-23;     // J/K
inline constexpr double speed_of_light = 2.99792458e8; // m/s
inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double atomic_mass_unit = 1.66053907e-27;   // kg
inline constexpr double bohr_magneton = 9.27401008e-24;      // J/T
inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F/m

// Cycling transition of the stored ion species (3S1/2 <-> 3P3/2).
inline constexpr double bd_linewidth = two_pi * 43.0e6;         // rad/s
inline constexpr double bd_frequency = two_pi * 1.0720841e15;   // rad/s
inline constexpr double transition_wavelength = 280.0e-9;       // m

inline constexpr double ion_mass = 25.0 * atomic_mass_unit; // kg

} // namespace iontrap::constants
