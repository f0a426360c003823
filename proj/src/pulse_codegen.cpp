#include "iontrap/pulse/compiler.hpp"

#include "iontrap/constants.hpp"
#include "iontrap/vm/timing.hpp"

#include <cmath>
#include <cstring>
#include <iomanip>
#include <map>
#include <sstream>

namespace iontrap::pulse {

std::uint32_t frequency_word(double mhz)
{
    if (mhz < 0.0 || mhz >= max_frequency_mhz)
        throw CompileError(0, 0, "frequency out of range");
    return static_cast<std::uint32_t>(std::llround(mhz * 4294967296.0 / dds_reference_mhz));
}

double frequency_mhz(std::uint32_t word)
{
    return static_cast<double>(word) * dds_reference_mhz / 4294967296.0;
}

std::uint32_t phase_word(double rad)
{
    const double turns = rad / constants::two_pi;
    const double wrapped = turns - std::floor(turns);
    auto w = static_cast<std::uint64_t>(std::llround(wrapped * 4294967296.0));
    return static_cast<std::uint32_t>(w & 0xFFFFFFFFull);
}

double phase_rad(std::uint32_t word)
{
    return static_cast<double>(word) * constants::two_pi / 4294967296.0;
}

std::uint32_t dac_word(double value)
{
    if (value < 0.0 || value > 1.0)
        throw CompileError(0, 0, "dac value out of range");
    return static_cast<std::uint32_t>(std::llround(value * 4294967295.0));
}

double dac_value(std::uint32_t word)
{
    return static_cast<double>(word) / 4294967295.0;
}

namespace {

class CodeGen {
public:
    Binary run(const Program& program)
    {
        for (const auto& sub : program.subs) {
            sub_entries_[sub.name] = static_cast<std::uint32_t>(code_.size());
            emit_block(sub.body, 0);
            code_.push_back({opcode_return, 0, 0});
        }
        Binary b;
        b.entry_index = static_cast<std::uint32_t>(code_.size());
        emit_block(program.main, 0);
        code_.push_back({opcode_halt, 0, 0});
        b.instructions = std::move(code_);
        return b;
    }

private:
    std::vector<Instruction> code_;
    std::map<std::string, std::uint32_t> sub_entries_;

    void emit_block(const std::vector<Statement>& body, int depth)
    {
        if (depth > max_loop_nesting)
            throw CompileError(0, 0, "loop nesting exceeds "
                                         + std::to_string(max_loop_nesting) + " levels");
        for (const auto& stmt : body)
            std::visit([&](const auto& s) { emit(s, depth); }, stmt);
    }

    void emit(const TtlSet& s, int)
    {
        code_.push_back({opcode_ttl, static_cast<std::uint8_t>(s.index),
                         static_cast<std::uint32_t>(s.value)});
    }
    void emit(const DacSet& s, int)
    {
        code_.push_back({opcode_dac, static_cast<std::uint8_t>(s.index), dac_word(s.value)});
    }
    void emit(const DdsFreq& s, int)
    {
        const auto target = static_cast<std::uint8_t>(s.board | (s.profile << 4));
        code_.push_back({opcode_dds_freq, target, frequency_word(s.mhz)});
    }
    void emit(const DdsPhase& s, int)
    {
        const auto target = static_cast<std::uint8_t>(s.board | (s.profile << 4));
        code_.push_back({opcode_dds_phase, target, phase_word(s.rad)});
    }
    void emit(const DdsProfileSelect& s, int)
    {
        code_.push_back({opcode_dds_profile, static_cast<std::uint8_t>(s.board),
                         static_cast<std::uint32_t>(s.profile)});
    }
    void emit(const DdsUpdate& s, int)
    {
        code_.push_back({opcode_dds_update,
                         s.board < 0 ? target_all_boards : static_cast<std::uint8_t>(s.board), 0});
    }
    void emit(const Wait& s, int) { code_.push_back({opcode_wait, 0, s.cycles}); }
    void emit(const WaitTrigger& s, int)
    {
        code_.push_back({opcode_wait_trigger,
                         s.input < 0 ? target_any_input : static_cast<std::uint8_t>(s.input), 0});
    }
    void emit(const SubCall& s, int)
    {
        const auto it = sub_entries_.find(s.name);
        if (it == sub_entries_.end())
            throw CompileError(0, 0, "call of undefined subroutine '" + s.name + "'");
        code_.push_back({opcode_call, 0, it->second});
    }
    void emit(const Loop& s, int depth)
    {
        const auto begin_index = static_cast<std::uint32_t>(code_.size());
        code_.push_back({opcode_loop_begin,
                         static_cast<std::uint8_t>(s.infinite ? loop_flag_infinite : 0),
                         s.infinite ? 0 : s.count});
        emit_block(s.body, depth + 1);
        code_.push_back({opcode_loop_end, 0, begin_index});
    }
};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t at)
{
    return static_cast<std::uint32_t>(in[at]) | (static_cast<std::uint32_t>(in[at + 1]) << 8)
        | (static_cast<std::uint32_t>(in[at + 2]) << 16)
        | (static_cast<std::uint32_t>(in[at + 3]) << 24);
}

constexpr char magic[4] = {'P', 'B', 'X', '1'};
constexpr std::uint32_t format_version = 1;

std::string format_value(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

} // namespace

std::vector<std::uint8_t> encode(const Binary& binary)
{
    std::vector<std::uint8_t> out;
    out.reserve(16 + 8 * binary.instructions.size());
    out.insert(out.end(), magic, magic + 4);
    put_u32(out, format_version);
    put_u32(out, static_cast<std::uint32_t>(binary.instructions.size()));
    put_u32(out, binary.entry_index);
    for (const auto& ins : binary.instructions) {
        out.push_back(ins.opcode);
        out.push_back(ins.target);
        out.push_back(0);
        out.push_back(0);
        put_u32(out, ins.operand);
    }
    return out;
}

Binary decode(const std::vector<std::uint8_t>& bytes)
{
    if (bytes.size() < 16 || std::memcmp(bytes.data(), magic, 4) != 0)
        throw std::runtime_error("not a pulse program binary");
    if (get_u32(bytes, 4) != format_version)
        throw std::runtime_error("unsupported pulse binary version");
    const std::uint32_t count = get_u32(bytes, 8);
    if (bytes.size() != 16 + 8 * static_cast<std::size_t>(count))
        throw std::runtime_error("truncated pulse binary");
    Binary b;
    b.entry_index = get_u32(bytes, 12);
    if (b.entry_index > count)
        throw std::runtime_error("corrupt entry index");
    b.instructions.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::size_t at = 16 + 8 * static_cast<std::size_t>(i);
        b.instructions.push_back({bytes[at], bytes[at + 1], get_u32(bytes, at + 4)});
    }
    return b;
}

CompileOutput compile(const Program& program)
{
    CodeGen gen;
    CompileOutput out;
    out.bytes = encode(gen.run(program));
    out.warnings = program.warnings;
    return out;
}

CompileOutput compile_source(const std::string& source)
{
    return compile(parse(source));
}

std::string disassemble(const std::vector<std::uint8_t>& bytes)
{
    const Binary b = decode(bytes);
    std::ostringstream os;

    // map sub entry points to canonical names
    std::map<std::uint32_t, std::string> sub_names;
    {
        std::uint32_t start = 0;
        int k = 0;
        for (std::uint32_t i = 0; i < b.entry_index; ++i) {
            if (b.instructions[i].opcode == opcode_return) {
                sub_names[start] = "sub" + std::to_string(k++);
                start = i + 1;
            }
        }
        if (start != b.entry_index)
            throw std::runtime_error("malformed subroutine region");
    }

    int indent = 0;
    auto line = [&](const std::string& text) {
        for (int i = 0; i < indent; ++i)
            os << "    ";
        os << text << "\r\n";
    };

    auto emit_instruction = [&](const Instruction& ins) {
        switch (ins.opcode) {
        case opcode_ttl:
            line("ttl" + std::to_string(ins.target) + " = " + std::to_string(ins.operand));
            break;
        case opcode_dac:
            line("dac" + std::to_string(ins.target) + " = " + format_value(dac_value(ins.operand)));
            break;
        case opcode_dds_freq:
            line("dds" + std::to_string(ins.target & 0x0F) + ".profile"
                 + std::to_string(ins.target >> 4)
                 + ".frequency = " + format_value(frequency_mhz(ins.operand)));
            break;
        case opcode_dds_phase:
            line("dds" + std::to_string(ins.target & 0x0F) + ".profile"
                 + std::to_string(ins.target >> 4)
                 + ".phase = " + format_value(phase_rad(ins.operand)));
            break;
        case opcode_dds_profile:
            line("dds" + std::to_string(ins.target) + ".profile = " + std::to_string(ins.operand));
            break;
        case opcode_dds_update:
            line(ins.target == target_all_boards
                     ? std::string("ddsX.update()")
                     : "dds" + std::to_string(ins.target) + ".update()");
            break;
        case opcode_wait:
            line("wait " + std::to_string(ins.operand));
            break;
        case opcode_wait_trigger:
            line(ins.target == target_any_input
                     ? std::string("wait triggerX")
                     : "wait trigger" + std::to_string(ins.target));
            break;
        case opcode_loop_begin:
            if (ins.target & loop_flag_infinite)
                line("loop {");
            else
                line("loop (" + std::to_string(ins.operand) + ") {");
            ++indent;
            break;
        case opcode_loop_end:
            --indent;
            line("}");
            break;
        case opcode_call: {
            const auto it = sub_names.find(ins.operand);
            if (it == sub_names.end())
                throw std::runtime_error("call into the middle of a subroutine");
            line(it->second + "()");
            break;
        }
        default:
            throw std::runtime_error("unknown opcode in binary");
        }
    };

    std::uint32_t i = 0;
    while (i < b.entry_index) {
        line("sub " + sub_names.at(i) + " {");
        ++indent;
        while (b.instructions[i].opcode != opcode_return) {
            emit_instruction(b.instructions[i]);
            ++i;
        }
        ++i; // the return
        --indent;
        line("}");
    }
    for (; i < b.instructions.size(); ++i) {
        if (b.instructions[i].opcode == opcode_halt)
            break;
        emit_instruction(b.instructions[i]);
    }
    return os.str();
}

std::optional<std::uint64_t> predicted_cycles(const std::vector<std::uint8_t>& bytes)
{
    const Binary b = decode(bytes);
    vm::ClockModel clock;
    for (std::uint32_t i = b.entry_index; i < b.instructions.size(); ++i) {
        const auto& ins = b.instructions[i];
        switch (ins.opcode) {
        case opcode_ttl:
        case opcode_dac:
        case opcode_dds_freq:
        case opcode_dds_phase:
        case opcode_dds_profile:
        case opcode_dds_update:
            clock.effect();
            break;
        case opcode_wait:
            clock.wait(ins.operand);
            break;
        case opcode_halt:
            clock.control();
            return clock.clock;
        default:
            return std::nullopt; // loops, calls, triggers: not straight-line
        }
    }
    return clock.clock;
}

} // namespace iontrap::pulse
