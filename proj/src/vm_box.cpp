#include "iontrap/vm/box.hpp"

#include <algorithm>
#include <random>

namespace iontrap::vm {

namespace {

struct LoopFrame {
    std::uint32_t begin_index = 0;
    std::uint32_t remaining = 0;
    bool infinite = false;
};

} // namespace

ExecutionResult execute(const std::vector<std::uint8_t>& binary, const BoxState& initial,
                        const std::vector<TriggerEdge>& triggers, const ExecutionOptions& options)
{
    const pulse::Binary program = pulse::decode(binary);

    ExecutionResult result;
    result.final_state = initial;
    BoxState& box = result.final_state;

    std::vector<TriggerEdge> trace = triggers;
    std::stable_sort(trace.begin(), trace.end(),
                     [](const TriggerEdge& a, const TriggerEdge& b) { return a.cycle < b.cycle; });
    std::size_t trace_pos = 0;

    ClockModel clock;
    clock.clock = box.clock;
    clock.reference = box.clock;

    std::mt19937_64 jitter_rng(options.jitter_seed);
    std::uniform_real_distribution<double> jitter_dist(0.0, 1.0);

    std::vector<LoopFrame> loop_stack;
    std::vector<std::uint32_t> call_stack;

    // replay input edges up to and including `cycle`
    auto advance_inputs = [&](std::uint64_t cycle) {
        while (trace_pos < trace.size() && trace[trace_pos].cycle <= cycle) {
            const auto& e = trace[trace_pos];
            if (e.input < 0 || e.input >= static_cast<int>(box.ttl_in.size()))
                throw VmFault("trigger trace addresses input " + std::to_string(e.input));
            box.ttl_in[static_cast<std::size_t>(e.input)] = e.level;
            ++trace_pos;
        }
    };

    auto input_high = [&](int input) {
        if (input < 0) {
            for (bool b : box.ttl_in)
                if (b)
                    return true;
            return false;
        }
        return box.ttl_in[static_cast<std::size_t>(input)];
    };

    std::uint32_t pc = program.entry_index;
    bool halted = false;
    while (!halted) {
        if (pc >= program.instructions.size())
            throw VmFault("program counter ran off the end");
        if (result.instructions_executed++ >= options.max_instructions)
            throw DeadlockError("instruction budget exhausted (infinite loop?)");
        if (clock.clock > options.max_cycles)
            throw DeadlockError("cycle budget exhausted at cycle "
                                + std::to_string(clock.clock));
        advance_inputs(clock.clock);

        const pulse::Instruction ins = program.instructions[pc];
        switch (ins.opcode) {
        case pulse::opcode_ttl: {
            const auto index = static_cast<std::size_t>(ins.target);
            if (index >= box.ttl_out.size())
                throw VmFault("ttl index out of range");
            const bool level = ins.operand != 0;
            const std::uint64_t stamp = clock.effect();
            if (box.ttl_out[index] != level) {
                box.ttl_out[index] = level;
                result.timeline.push_back(
                    {stamp, EventKind::ttl_edge, static_cast<int>(index), level ? 1.0 : 0.0});
            }
            ++pc;
            break;
        }
        case pulse::opcode_dac: {
            const auto index = static_cast<std::size_t>(ins.target);
            if (index >= box.dac.size())
                throw VmFault("dac index out of range");
            const double value = pulse::dac_value(ins.operand);
            const std::uint64_t stamp = clock.effect();
            box.dac[index] = value;
            result.timeline.push_back({stamp, EventKind::dac_set, static_cast<int>(index), value});
            ++pc;
            break;
        }
        case pulse::opcode_dds_freq:
        case pulse::opcode_dds_phase: {
            const auto board = static_cast<std::size_t>(ins.target & 0x0F);
            const auto profile = static_cast<std::size_t>(ins.target >> 4);
            if (board >= box.dds.size() || profile >= box.dds[board].pending.size())
                throw VmFault("dds register address out of range");
            auto& regs = box.dds[board].pending[profile];
            if (ins.opcode == pulse::opcode_dds_freq)
                regs.frequency_word = ins.operand;
            else
                regs.phase_word = ins.operand;
            clock.effect(); // register write, no observable output change
            ++pc;
            break;
        }
        case pulse::opcode_dds_profile: {
            const auto board = static_cast<std::size_t>(ins.target);
            if (board >= box.dds.size() || ins.operand >= 4)
                throw VmFault("dds profile select out of range");
            box.dds[board].pending_profile = static_cast<int>(ins.operand);
            clock.effect();
            ++pc;
            break;
        }
        case pulse::opcode_dds_update: {
            const std::uint64_t stamp = clock.effect();
            auto commit = [&](std::size_t board) {
                auto& d = box.dds[board];
                d.live = d.pending;
                d.live_profile = d.pending_profile;
                Event e{stamp, EventKind::dds_commit, static_cast<int>(board), 0.0,
                        d.live[static_cast<std::size_t>(d.live_profile)].frequency_word,
                        d.live[static_cast<std::size_t>(d.live_profile)].phase_word,
                        d.live_profile, 0.0};
                if (options.dds_jitter)
                    e.jitter = jitter_dist(jitter_rng);
                result.timeline.push_back(e);
            };
            if (ins.target == pulse::target_all_boards) {
                for (std::size_t b = 0; b < box.dds.size(); ++b)
                    commit(b);
            } else {
                if (ins.target >= box.dds.size())
                    throw VmFault("dds board out of range");
                commit(ins.target);
            }
            ++pc;
            break;
        }
        case pulse::opcode_wait:
            clock.wait(ins.operand);
            ++pc;
            break;
        case pulse::opcode_wait_trigger: {
            const int input = ins.target == pulse::target_any_input ? -1 : ins.target;
            if (input >= static_cast<int>(box.ttl_in.size()))
                throw VmFault("trigger input out of range");
            advance_inputs(clock.clock);
            std::uint64_t arrival = clock.clock;
            if (!input_high(input)) {
                // scan the future trace for the first rising edge that satisfies us
                bool found = false;
                BoxState probe = box;
                for (std::size_t k = trace_pos; k < trace.size(); ++k) {
                    probe.ttl_in[static_cast<std::size_t>(trace[k].input)] = trace[k].level;
                    const bool hit = input < 0
                        ? std::any_of(probe.ttl_in.begin(), probe.ttl_in.end(),
                                      [](bool b) { return b; })
                        : probe.ttl_in[static_cast<std::size_t>(input)];
                    if (hit && trace[k].cycle >= clock.clock) {
                        arrival = trace[k].cycle;
                        found = true;
                        break;
                    }
                }
                if (!found)
                    throw DeadlockError("wait trigger"
                                        + (input < 0 ? std::string("X") : std::to_string(input))
                                        + " never satisfied");
                if (arrival > options.max_cycles)
                    throw DeadlockError("trigger arrives only after the cycle budget");
                advance_inputs(arrival);
            }
            clock.trigger(arrival);
            ++pc;
            break;
        }
        case pulse::opcode_loop_begin: {
            if (loop_stack.size() >= pulse::max_loop_nesting)
                throw VmFault("loop stack overflow");
            const bool infinite = (ins.target & pulse::loop_flag_infinite) != 0;
            loop_stack.push_back({pc, infinite ? 0 : ins.operand, infinite});
            clock.control();
            ++pc;
            break;
        }
        case pulse::opcode_loop_end: {
            if (loop_stack.empty() || loop_stack.back().begin_index != ins.operand)
                throw VmFault("loop end without matching begin");
            auto& frame = loop_stack.back();
            clock.control();
            if (frame.infinite) {
                pc = frame.begin_index + 1;
            } else if (frame.remaining > 1) {
                --frame.remaining;
                pc = frame.begin_index + 1;
            } else {
                loop_stack.pop_back();
                ++pc;
            }
            break;
        }
        case pulse::opcode_call:
            if (call_stack.size() >= 64)
                throw VmFault("call stack overflow");
            if (ins.operand >= program.instructions.size())
                throw VmFault("call target out of range");
            call_stack.push_back(pc + 1);
            clock.control();
            pc = ins.operand;
            break;
        case pulse::opcode_return:
            if (call_stack.empty())
                throw VmFault("return without call");
            clock.control();
            pc = call_stack.back();
            call_stack.pop_back();
            break;
        case pulse::opcode_halt:
            clock.control();
            halted = true;
            break;
        default:
            throw VmFault("unknown opcode 0x" + std::to_string(ins.opcode));
        }
    }

    box.clock = clock.clock;
    return result;
}

} // namespace iontrap::vm
