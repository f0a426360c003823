#pragma once

#include "iontrap/cooling.hpp"
#include "iontrap/motion.hpp"
#include "iontrap/vm/channels.hpp"

#include <cstdint>
#include <string>
#include <vector>

// Monte-Carlo repetition driver: maps the pulse schedule of one repetition
// onto the physics modules (Doppler cooling, Raman pulse, state-dependent
// fluorescence detection) and draws photon counts.

namespace iontrap::vm {

struct DetectionModel {
    double bright_rate = 210.0e3; // PMT count rate of a bright ion, Hz
    double dark_rate = 210.0;     // stray-light background, Hz (1000:1)
    double dark_leak = 0.0;       // per-window dark->bright pumping probability
    long threshold = 1;           // counts at or above read as bright
};

struct ExperimentPhysics {
    double trap_frequency = 0.0;        // axial, rad/s; filled from LabConfig
    double doppler_temperature = 0.0;   // K
    double lamb_dicke = 0.3;
    double base_rabi = 0.0;             // co-propagating Raman Rabi, rad/s
    int transition_order = 0;           // driven sideband order (0 = carrier)
    double detuning = 0.0;              // detuning from that transition, rad/s
    int n_max = 400;
    bool sideband_cooled = false;
    cooling::CoolingSchedule schedule;
    DetectionModel detection;

    std::string detection_beam = "BD";
    std::string coprop_lower = "B1";
    std::string coprop_upper = "R1";
    std::string ortho_lower = "B1";
    std::string ortho_upper = "R2";
    double min_cooling_window = 100e-6; // BD intervals at least this long cool
};

struct RepetitionRecord {
    long repetition = 0;
    long counts = 0;
    bool bright = false; // inferred from the count threshold
};

struct ExperimentResult {
    std::vector<RepetitionRecord> records;
    double p_bright = 0.0;
    double p_bright_error = 0.0; // binomial
    double mean_counts = 0.0;
    double detection_window = 0.0; // seconds
    double raman_duration = 0.0;   // seconds, 0 without a Raman pulse
    motion::Geometry raman_geometry = motion::Geometry::copropagating;
    double p_down_analytic = 0.0;  // lower-state probability fed to the sampler
};

struct ScheduleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Runs `repetitions` simulated repetitions of the schedule.
ExperimentResult run_experiment(const PulseSchedule& schedule, const ExperimentPhysics& physics,
                                long repetitions, std::uint64_t seed);

} // namespace iontrap::vm
