#pragma once

#include "iontrap/cooling.hpp"
#include "iontrap/motion.hpp"
#include "iontrap/trap.hpp"
#include "iontrap/vm/channels.hpp"
#include "iontrap/vm/experiment.hpp"

#include <cstdint>
#include <string>

// Aggregated laboratory configuration: trap drive, beam wiring and
// calibrations, quantisation field, detection budget, cooling schedule and
// the Raman drive parameters. Loadable from a flat key-value text file with
// section prefixes ("trap.rf_voltage_v = 1000").

namespace iontrap::lab {

struct RamanSettings {
    double base_rabi = constants::two_pi * 202.0e3;  // rad/s
    double detuning = constants::two_pi * 80.0e9;    // virtual level, rad/s
    double spread = constants::two_pi * 7.0e3;       // shot-to-shot Rabi spread
    double lamb_dicke = 0.0;                         // 0 = derive from the trap
};

struct DetectionSettings {
    vm::DetectionModel model;
    double window = 20e-6; // seconds
};

struct LabConfig {
    trap::TrapConfig trap;
    vm::ChannelMap beams = vm::ChannelMap::standard();
    motion::ZeemanConfig zeeman;
    DetectionSettings detection;
    cooling::CoolingSchedule cooling_schedule;
    RamanSettings raman;
    std::uint64_t seed = 1;

    double axial_frequency() const
    {
        return trap::axial_frequency(trap.axial_voltage, trap.axial_width, trap.mass, trap.charge);
    }

    double doppler_temperature() const
    {
        return cooling::doppler_limit(constants::bd_linewidth);
    }

    double lamb_dicke() const
    {
        if (raman.lamb_dicke > 0.0)
            return raman.lamb_dicke;
        const double k_eff = std::sqrt(2.0) * constants::two_pi / constants::transition_wavelength;
        return motion::lamb_dicke(k_eff, trap.mass, axial_frequency());
    }

    /// Physics bundle handed to the repetition driver.
    vm::ExperimentPhysics experiment_physics() const;

    void apply(const std::string& key, const std::string& value);

    static LabConfig from_file(const std::string& path);
    static LabConfig from_text(const std::string& text);
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace iontrap::lab
