#pragma once

#include "iontrap/pulse/ast.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Front end and code generator for the pulse description language: source
// text -> tokens -> Program -> fixed-width instruction stream, plus the
// disassembler producing a canonical listing that recompiles byte-exactly.

namespace iontrap::pulse {

struct CompileError : std::runtime_error {
    long line;
    long col;
    std::string message;
    CompileError(long line_, long col_, const std::string& msg)
        : std::runtime_error(std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg),
          line(line_), col(col_), message(msg)
    {
    }
};

enum class TokenKind { identifier, number, punct, newline, end };

struct Token {
    TokenKind kind = TokenKind::end;
    std::string text;        // identifier text or punct character
    double value = 0.0;      // numbers
    bool integral = false;   // number written as an integer literal
    long line = 1;
    long col = 1;
};

struct TokenStream {
    std::vector<Token> tokens;
    std::vector<std::string> warnings;
};

TokenStream tokenize(const std::string& source);

Program parse(const std::string& source);
Program parse(const TokenStream& stream);

/// Evaluates a constant expression such as "2+3*4" or "pi/2".
double eval_expr(const std::string& text);

/// Parses a wait operand ("250", "1us", "1.5 ms") to processor cycles.
/// Sub-cycle nonzero durations round up to one cycle with a warning.
std::uint32_t parse_duration(const std::string& text, std::vector<std::string>* warnings = nullptr);

// --- binary format -----------------------------------------------------------

// 16-byte header: magic "PBX1", u32 version, u32 instruction count,
// u32 entry index; then 8 bytes per instruction (opcode, target, two
// reserved bytes, u32 operand), all little-endian.
inline constexpr std::uint8_t opcode_ttl = 0x01;
inline constexpr std::uint8_t opcode_dac = 0x02;
inline constexpr std::uint8_t opcode_dds_freq = 0x03;
inline constexpr std::uint8_t opcode_dds_phase = 0x04;
inline constexpr std::uint8_t opcode_dds_profile = 0x05;
inline constexpr std::uint8_t opcode_dds_update = 0x06;
inline constexpr std::uint8_t opcode_wait = 0x07;
inline constexpr std::uint8_t opcode_wait_trigger = 0x08;
inline constexpr std::uint8_t opcode_loop_begin = 0x09;
inline constexpr std::uint8_t opcode_loop_end = 0x0A;
inline constexpr std::uint8_t opcode_call = 0x0B;
inline constexpr std::uint8_t opcode_return = 0x0C;
inline constexpr std::uint8_t opcode_halt = 0x0D;

inline constexpr std::uint8_t target_all_boards = 0xFF;
inline constexpr std::uint8_t target_any_input = 0xFF;
inline constexpr std::uint8_t loop_flag_infinite = 0x01;

struct Instruction {
    std::uint8_t opcode = 0;
    std::uint8_t target = 0;
    std::uint32_t operand = 0;
};

struct Binary {
    std::vector<Instruction> instructions;
    std::uint32_t entry_index = 0;
};

/// DDS frequency tuning word against the 1.2 GHz reference.
std::uint32_t frequency_word(double mhz);
double frequency_mhz(std::uint32_t word);

/// Phase word, full turn = 2^32.
std::uint32_t phase_word(double rad);
double phase_rad(std::uint32_t word);

/// DAC word, 1.0 = 0xFFFFFFFF.
std::uint32_t dac_word(double value);
double dac_value(std::uint32_t word);

struct CompileOutput {
    std::vector<std::uint8_t> bytes;
    std::vector<std::string> warnings;
};

CompileOutput compile(const Program& program);
CompileOutput compile_source(const std::string& source);

Binary decode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode(const Binary& binary);

/// Canonical listing (CRLF line endings) that recompiles to identical bytes.
std::string disassemble(const std::vector<std::uint8_t>& bytes);

/// Total clock cycles of a straight-line program (no loops, calls or
/// triggers); nullopt when the program is not straight-line.
std::optional<std::uint64_t> predicted_cycles(const std::vector<std::uint8_t>& bytes);

} // namespace iontrap::pulse
