#include "iontrap/pulse/compiler.hpp"

#include "iontrap/constants.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace iontrap::pulse {

namespace {

constexpr double max_u32 = 4294967295.0;

class Parser {
public:
    Parser(const TokenStream& stream) : toks_(stream.tokens)
    {
        prog_.warnings = stream.warnings;
    }

    Program run()
    {
        prog_.main = statements(true, nullptr);
        expect_kind(TokenKind::end, "end of input");
        return std::move(prog_);
    }

    double run_expression()
    {
        skip_newlines();
        const double v = parse_expr();
        skip_newlines();
        expect_kind(TokenKind::end, "end of expression");
        return v;
    }

    std::pair<std::uint32_t, std::vector<std::string>> run_duration()
    {
        skip_newlines();
        const Statement s = parse_wait_operand();
        skip_newlines();
        expect_kind(TokenKind::end, "end of duration");
        if (!std::holds_alternative<Wait>(s))
            fail(peek(), "expected a duration, not a trigger");
        return {std::get<Wait>(s).cycles, prog_.warnings};
    }

private:
    const std::vector<Token>& toks_;
    std::size_t pos_ = 0;
    Program prog_;
    std::set<std::string> sub_names_;

    const Token& peek(int ahead = 0) const
    {
        const std::size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }

    const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const
    {
        throw CompileError(t.line, t.col, msg);
    }

    void expect_punct(const std::string& p)
    {
        const Token& t = peek();
        if (t.kind != TokenKind::punct || t.text != p)
            fail(t, "expected '" + p + "'" + (t.text.empty() ? "" : ", got '" + t.text + "'"));
        advance();
    }

    void expect_kind(TokenKind k, const std::string& what)
    {
        if (peek().kind != k)
            fail(peek(), "expected " + what);
    }

    bool at_punct(const std::string& p) const
    {
        return peek().kind == TokenKind::punct && peek().text == p;
    }

    void skip_newlines()
    {
        while (peek().kind == TokenKind::newline)
            advance();
    }

    void end_statement()
    {
        const Token& t = peek();
        if (t.kind == TokenKind::newline) {
            advance();
            return;
        }
        if (t.kind == TokenKind::end || at_punct("}"))
            return;
        fail(t, "expected end of line after statement");
    }

    // index suffix of e.g. "ttl12": canonical decimal, no leading zeroes
    int parse_index(const Token& t, const std::string& text, std::size_t prefix_len, int max,
                    const std::string& what)
    {
        const std::string digits = text.substr(prefix_len);
        if (digits.empty())
            fail(t, what + " index missing");
        for (char c : digits)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                fail(t, "malformed " + what + " index '" + digits + "'");
        if (digits.size() > 1 && digits[0] == '0')
            fail(t, what + " index must not carry leading zeroes");
        if (digits.size() > 6)
            fail(t, what + " index out of range");
        const long idx = std::stol(digits);
        if (idx > max)
            fail(t, what + " index " + std::to_string(idx) + " out of range 0.."
                     + std::to_string(max));
        return static_cast<int>(idx);
    }

    // --- expressions ---------------------------------------------------------

    double parse_factor()
    {
        const Token& t = peek();
        if (t.kind == TokenKind::number) {
            advance();
            return t.value;
        }
        if (t.kind == TokenKind::identifier && t.text == "pi") {
            advance();
            return constants::pi;
        }
        if (at_punct("(")) {
            advance();
            const double v = parse_expr();
            expect_punct(")");
            return v;
        }
        if (at_punct("-")) {
            advance();
            return -parse_factor();
        }
        fail(t, "expected a number, 'pi', or '('");
    }

    double parse_term()
    {
        double v = parse_factor();
        while (at_punct("*") || at_punct("/")) {
            const Token op = peek();
            advance();
            const double rhs = parse_factor();
            if (op.text == "*") {
                v *= rhs;
            } else {
                if (rhs == 0.0)
                    fail(op, "division by zero in constant expression");
                v /= rhs;
            }
        }
        return v;
    }

    double parse_expr()
    {
        double v = parse_term();
        while (at_punct("+") || at_punct("-")) {
            const bool add = peek().text == "+";
            advance();
            const double rhs = parse_term();
            v = add ? v + rhs : v - rhs;
        }
        return v;
    }

    // --- statements ----------------------------------------------------------

    std::vector<Statement> statements(bool top_level, int* loop_depth)
    {
        std::vector<Statement> out;
        for (;;) {
            skip_newlines();
            const Token& t = peek();
            if (t.kind == TokenKind::end || at_punct("}"))
                return out;
            if (t.kind != TokenKind::identifier)
                fail(t, "expected a statement");

            if (t.text == "sub") {
                if (!top_level)
                    fail(t, "subroutine definitions must appear at top level");
                parse_sub();
                continue;
            }
            out.push_back(statement(loop_depth));
        }
    }

    Statement statement(int* loop_depth)
    {
        const Token t = peek();
        if (t.text == "wait")
            return parse_wait();
        if (t.text == "loop")
            return parse_loop(loop_depth);
        if (t.text.rfind("ttl", 0) == 0 && peek(1).kind == TokenKind::punct
            && peek(1).text == "=")
            return parse_ttl();
        if (t.text.rfind("dac", 0) == 0 && peek(1).kind == TokenKind::punct
            && peek(1).text == "=")
            return parse_dac();
        if (t.text.rfind("dds", 0) == 0 && peek(1).kind == TokenKind::punct
            && peek(1).text == ".")
            return parse_dds();
        // subroutine call: name()
        if (peek(1).kind == TokenKind::punct && peek(1).text == "(") {
            advance();
            expect_punct("(");
            expect_punct(")");
            if (!sub_names_.count(t.text))
                fail(t, "subroutine '" + t.text + "' called before its definition");
            end_statement();
            return SubCall{t.text};
        }
        fail(t, "unknown statement '" + t.text + "'");
    }

    Statement parse_ttl()
    {
        const Token t = advance();
        const int index = parse_index(t, t.text, 3, ttl_count - 1, "ttl");
        expect_punct("=");
        const Token vt = peek();
        const double v = parse_expr();
        if (v != 0.0 && v != 1.0)
            fail(vt, "ttl value must be 0 or 1");
        end_statement();
        return TtlSet{index, static_cast<int>(v)};
    }

    Statement parse_dac()
    {
        const Token t = advance();
        const int index = parse_index(t, t.text, 3, dac_count - 1, "dac");
        expect_punct("=");
        const Token vt = peek();
        const double v = parse_expr();
        if (v < 0.0 || v > 1.0)
            fail(vt, "dac value must lie in [0, 1]");
        end_statement();
        return DacSet{index, v};
    }

    Statement parse_dds()
    {
        const Token t = advance();
        const std::string suffix = t.text.substr(3);
        const bool all_boards = suffix == "X";
        int board = -1;
        if (!all_boards)
            board = parse_index(t, t.text, 3, dds_board_count - 1, "dds board");
        expect_punct(".");
        expect_kind(TokenKind::identifier, "'profileN', 'profile', 'frequency', 'phase', or 'update'");
        const Token member = advance();

        if (member.text == "update") {
            expect_punct("(");
            expect_punct(")");
            end_statement();
            return DdsUpdate{all_boards ? -1 : board};
        }
        if (all_boards)
            fail(t, "only update() may address all dds boards");

        int profile = 0;
        const Token* reg = &member;
        Token reg_storage;
        if (member.text.rfind("profile", 0) == 0 && member.text != "profile") {
            profile = parse_index(member, member.text, 7, dds_profile_count - 1, "dds profile");
            expect_punct(".");
            expect_kind(TokenKind::identifier, "'frequency' or 'phase'");
            reg_storage = advance();
            reg = &reg_storage;
        } else if (member.text == "profile") {
            // active-profile select: ddsN.profile = Y
            expect_punct("=");
            const Token vt = peek();
            const double v = parse_expr();
            if (std::abs(v - std::round(v)) > 1e-9 || v < 0.0 || v > dds_profile_count - 1)
                fail(vt, "profile selector must be an integer in 0..3");
            end_statement();
            return DdsProfileSelect{board, static_cast<int>(std::lround(v))};
        }

        if (reg->text == "frequency") {
            expect_punct("=");
            const Token vt = peek();
            const double mhz = parse_expr();
            if (mhz < 0.0)
                fail(vt, "frequency must be non-negative");
            if (mhz >= max_frequency_mhz)
                fail(vt, "frequency must stay below half the 1200 MHz reference");
            end_statement();
            return DdsFreq{board, profile, mhz};
        }
        if (reg->text == "phase") {
            expect_punct("=");
            const double rad = parse_expr();
            end_statement();
            return DdsPhase{board, profile, rad};
        }
        fail(*reg, "expected 'frequency' or 'phase'");
    }

    Statement parse_wait()
    {
        advance(); // 'wait'
        Statement s = parse_wait_operand();
        end_statement();
        return s;
    }

    Statement parse_wait_operand()
    {
        const Token& t = peek();
        if (t.kind == TokenKind::identifier && t.text.rfind("trigger", 0) == 0) {
            advance();
            if (t.text == "triggerX")
                return WaitTrigger{-1};
            const int input = parse_index(t, t.text, 7, trigger_count - 1, "trigger");
            return WaitTrigger{input};
        }

        const Token vt = peek();
        const double value = parse_expr();
        double unit = 0.0; // 0 = bare cycles
        if (peek().kind == TokenKind::identifier) {
            const std::string& u = peek().text;
            if (u == "s")
                unit = 1.0;
            else if (u == "ms")
                unit = 1e-3;
            else if (u == "us")
                unit = 1e-6;
            else if (u == "ns")
                unit = 1e-9;
            else
                fail(peek(), "unknown time unit '" + u + "'");
            advance();
        }
        if (value < 0.0)
            fail(vt, "wait duration must be non-negative");

        std::uint32_t cycles = 0;
        if (unit > 0.0) {
            const double exact = value * unit * clock_hz;
            if (exact > max_u32)
                fail(vt, "wait duration exceeds the 32-bit cycle counter");
            cycles = static_cast<std::uint32_t>(std::llround(exact));
            if (cycles == 0 && value > 0.0) {
                prog_.warnings.push_back("line " + std::to_string(vt.line)
                                         + ": sub-cycle wait rounded up to one 10 ns cycle");
                cycles = 1;
            }
        } else {
            if (std::abs(value - std::round(value)) > 1e-9)
                fail(vt, "bare wait takes an integer number of cycles (append a unit otherwise)");
            if (value > max_u32)
                fail(vt, "wait duration exceeds the 32-bit cycle counter");
            cycles = static_cast<std::uint32_t>(std::llround(value));
        }
        return Wait{cycles};
    }

    Statement parse_loop(int* loop_depth)
    {
        advance(); // 'loop'
        Loop loop;
        if (at_punct("(")) {
            advance();
            const Token vt = peek();
            const double v = parse_expr();
            expect_punct(")");
            if (std::abs(v - std::round(v)) > 1e-9 || v < 1.0)
                fail(vt, "loop count must be a positive integer");
            if (v > max_u32)
                fail(vt, "loop count exceeds the 32-bit counter");
            loop.count = static_cast<std::uint32_t>(std::llround(v));
        } else {
            loop.infinite = true;
        }
        expect_punct("{");
        int depth_storage = 0;
        int* depth = loop_depth ? loop_depth : &depth_storage;
        ++*depth;
        if (*depth > max_loop_nesting)
            fail(peek(), "loop nesting exceeds " + std::to_string(max_loop_nesting) + " levels");
        loop.body = statements(false, depth);
        --*depth;
        expect_punct("}");
        end_statement();
        return loop;
    }

    void parse_sub()
    {
        advance(); // 'sub'
        expect_kind(TokenKind::identifier, "a subroutine name");
        const Token name = advance();
        if (!std::isalpha(static_cast<unsigned char>(name.text[0])))
            fail(name, "subroutine names must start with a letter");
        if (name.text == "dds_update")
            fail(name, "'dds_update' is a reserved word");
        if (sub_names_.count(name.text))
            fail(name, "subroutine '" + name.text + "' is already defined");
        expect_punct("{");
        SubDef def;
        def.name = name.text;
        int depth = 0;
        def.body = statements(false, &depth);
        expect_punct("}");
        end_statement();
        sub_names_.insert(def.name);
        prog_.subs.push_back(std::move(def));
    }
};

} // namespace

Program parse(const TokenStream& stream)
{
    return Parser(stream).run();
}

Program parse(const std::string& source)
{
    return parse(tokenize(source));
}

double eval_expr(const std::string& text)
{
    const TokenStream ts = tokenize(text);
    Parser p(ts);
    return p.run_expression();
}

std::uint32_t parse_duration(const std::string& text, std::vector<std::string>* warnings)
{
    const TokenStream ts = tokenize(text);
    Parser p(ts);
    auto [cycles, warns] = p.run_duration();
    if (warnings)
        warnings->insert(warnings->end(), warns.begin(), warns.end());
    return cycles;
}

} // namespace iontrap::pulse
