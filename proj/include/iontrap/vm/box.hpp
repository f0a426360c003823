#pragma once

#include "iontrap/pulse/compiler.hpp"
#include "iontrap/vm/timing.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Cycle-accurate model of the pulse control box: sixteen TTL outputs, eight
// TTL inputs, four DAC-controlled attenuators, and four DDS boards with four
// profile register sets each. Live DDS output changes only on update().

namespace iontrap::vm {

struct DdsProfileRegisters {
    std::uint32_t frequency_word = 0;
    std::uint32_t phase_word = 0;

    bool operator==(const DdsProfileRegisters&) const = default;
};

struct DdsBoard {
    std::array<DdsProfileRegisters, 4> pending{};
    std::array<DdsProfileRegisters, 4> live{};
    int pending_profile = 0;
    int live_profile = 0;
};

struct BoxState {
    std::array<bool, 16> ttl_out{};
    std::array<bool, 8> ttl_in{};
    std::array<double, 4> dac{1.0, 1.0, 1.0, 1.0}; // attenuators wide open
    std::array<DdsBoard, 4> dds{};
    std::uint64_t clock = 0; // 10 ns units
};

enum class EventKind { ttl_edge, dac_set, dds_commit };

struct Event {
    std::uint64_t cycle = 0;
    EventKind kind = EventKind::ttl_edge;
    int channel = 0;       // ttl index, dac index, or dds board
    double value = 0.0;    // ttl level or dac value
    std::uint32_t frequency_word = 0; // dds commits: live registers
    std::uint32_t phase_word = 0;
    int profile = 0;
    double jitter = 0.0;   // sub-cycle offset of dds commits, cycles
};

using EventTimeline = std::vector<Event>;

struct TriggerEdge {
    std::uint64_t cycle = 0;
    int input = 0;
    bool level = false;
};

struct VmFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DeadlockError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExecutionOptions {
    std::uint64_t max_cycles = 1000000000ULL;      // timeout bound (10 s)
    std::uint64_t max_instructions = 50000000ULL;
    bool dds_jitter = false; // uniform [0,1) cycle on DDS commits
    std::uint64_t jitter_seed = 0;
};

struct ExecutionResult {
    EventTimeline timeline;
    BoxState final_state;
    std::uint64_t instructions_executed = 0;
};

/// Executes a compiled pulse program against the box model. `triggers`
/// drives the TTL inputs; `wait triggerX` blocks until the addressed input
/// (or any input) is high and fails with DeadlockError when that never
/// happens within the cycle bound.
ExecutionResult execute(const std::vector<std::uint8_t>& binary, const BoxState& initial,
                        const std::vector<TriggerEdge>& triggers = {},
                        const ExecutionOptions& options = {});

} // namespace iontrap::vm
