#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace iontrap::pulse {

// Limits of the pulse control hardware.
inline constexpr int ttl_count = 16;
inline constexpr int dac_count = 4;
inline constexpr int dds_board_count = 4;
inline constexpr int dds_profile_count = 4;
inline constexpr int trigger_count = 8;
inline constexpr int max_loop_nesting = 32;
inline constexpr double clock_hz = 100.0e6;      // one cycle is 10 ns
inline constexpr double dds_reference_mhz = 1200.0;
inline constexpr double max_frequency_mhz = dds_reference_mhz / 2.0;

struct TtlSet {
    int index = 0;
    int value = 0;
};

struct DacSet {
    int index = 0;
    double value = 0.0; // in [0, 1]
};

struct DdsFreq {
    int board = 0;
    int profile = 0;
    double mhz = 0.0;
};

struct DdsPhase {
    int board = 0;
    int profile = 0;
    double rad = 0.0;
};

struct DdsProfileSelect {
    int board = 0;
    int profile = 0;
};

struct DdsUpdate {
    int board = -1; // -1 = all boards
};

struct Wait {
    std::uint32_t cycles = 0;
};

struct WaitTrigger {
    int input = -1; // -1 = any input
};

struct SubCall {
    std::string name;
};

struct Loop;

using Statement = std::variant<TtlSet, DacSet, DdsFreq, DdsPhase, DdsProfileSelect, DdsUpdate,
                               Wait, WaitTrigger, SubCall, Loop>;

struct Loop {
    bool infinite = false;
    std::uint32_t count = 0;
    std::vector<Statement> body;
};

struct SubDef {
    std::string name;
    std::vector<Statement> body;
};

struct Program {
    std::vector<SubDef> subs;
    std::vector<Statement> main;
    std::vector<std::string> warnings;
};

} // namespace iontrap::pulse
