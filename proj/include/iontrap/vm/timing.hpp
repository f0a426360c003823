#pragma once

#include <algorithm>
#include <cstdint>

// Clock rules shared by the code generator's cycle prediction and the
// virtual machine. Output instructions take effect at the current clock and
// cost one cycle. A wait of k cycles schedules the next effect k cycles
// after the reference point, which is the most recent effect (or trigger
// edge); chained waits accumulate. This makes "set, wait k, set" produce
// edges exactly k cycles apart while every instruction still occupies the
// processor for at least its issue cycle.

namespace iontrap::vm {

struct ClockModel {
    std::uint64_t clock = 0; // next issue cycle
    std::uint64_t reference = 0;

    /// TTL/DAC/DDS writes, profile selects, updates. Returns the stamp cycle.
    std::uint64_t effect()
    {
        const std::uint64_t stamp = clock;
        reference = stamp;
        clock += 1;
        return stamp;
    }

    void wait(std::uint32_t cycles)
    {
        clock = std::max(clock, reference + cycles);
        reference = clock;
    }

    /// Control flow (loop bookkeeping, call/return, halt) is handled in the
    /// sequencer pipeline and costs no observable time; loop periods stay
    /// exactly the sum of their waits.
    void control() {}

    /// Trigger arrival at `arrival` (>= clock): resynchronises the
    /// reference and charges one cycle.
    void trigger(std::uint64_t arrival)
    {
        reference = std::max(arrival, clock);
        clock = reference + 1;
    }
};

} // namespace iontrap::vm
