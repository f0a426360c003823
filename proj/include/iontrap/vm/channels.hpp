#pragma once

#include "iontrap/vm/box.hpp"

#include <map>
#include <string>
#include <vector>

// Mapping from box channels to named laser beams and conversion of an event
// timeline into per-beam pulse intervals with calibrated intensities.

namespace iontrap::vm {

struct BeamChannel {
    std::string name;
    int ttl = -1;      // switching output
    int dds_board = -1; // frequency/phase source, -1 when externally driven
    int dac = -1;      // amplitude attenuator, -1 when fixed
    double intensity_at_dac1 = 0.0; // calibrated intensity at full drive, W/m^2
    double saturation_intensity = 0.0; // W/m^2, optical transition of this beam
};

struct ChannelMap {
    std::vector<BeamChannel> beams;

    void validate() const;
    const BeamChannel* find(const std::string& name) const;

    /// Default lab wiring: BD, BD-detuned, RD, repumper, B1, R1, R2.
    static ChannelMap standard();
};

struct MappingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// RF power behind the voltage-variable attenuator, relative to maximum:
/// 26 dB of dynamic range, log-linear in the DAC value.
double attenuator_output(double dac_value);

struct BeamInterval {
    double start = 0.0;     // seconds
    double end = 0.0;       // seconds
    double intensity = 0.0; // W/m^2 at the ion
    double frequency_mhz = 0.0; // live DDS frequency, 0 when unmapped
};

struct PulseSchedule {
    std::map<std::string, std::vector<BeamInterval>> beams;
    double duration = 0.0; // seconds
};

/// Converts the executed timeline into per-beam on/off intervals. Every
/// event channel must belong to a mapped beam.
PulseSchedule timeline_to_pulses(const EventTimeline& timeline, const BoxState& initial,
                                 std::uint64_t end_cycle, const ChannelMap& map);

} // namespace iontrap::vm
