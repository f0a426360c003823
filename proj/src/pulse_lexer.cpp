#include "iontrap/pulse/compiler.hpp"

#include <cctype>

namespace iontrap::pulse {

namespace {

bool ident_start(char c)
{
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

} // namespace

TokenStream tokenize(const std::string& source)
{
    TokenStream out;
    long line = 1;
    long col = 1;
    std::size_t i = 0;
    const std::size_t n = source.size();
    bool warned_bare_lf = false;

    auto push = [&](TokenKind kind, std::string text, double value = 0.0, bool integral = false,
                    long at_col = -1) {
        out.tokens.push_back({kind, std::move(text), value, integral, line,
                              at_col < 0 ? col : at_col});
    };

    while (i < n) {
        const char c = source[i];
        if (c == ' ' || c == '\t') {
            ++i;
            ++col;
            continue;
        }
        if (c == '#') { // comment to end of line
            while (i < n && source[i] != '\n' && source[i] != '\r')
                ++i;
            continue;
        }
        if (c == '\r' || c == '\n') {
            if (c == '\n' && !warned_bare_lf) {
                out.warnings.push_back("line " + std::to_string(line)
                                       + ": bare LF line ending (expected CRLF)");
                warned_bare_lf = true;
            }
            push(TokenKind::newline, "\n");
            if (c == '\r' && i + 1 < n && source[i + 1] == '\n')
                ++i;
            ++i;
            ++line;
            col = 1;
            continue;
        }
        if (ident_start(c)) {
            const long start_col = col;
            std::size_t j = i;
            while (j < n && ident_char(source[j]))
                ++j;
            push(TokenKind::identifier, source.substr(i, j - i), 0.0, false, start_col);
            col += static_cast<long>(j - i);
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < n
            && std::isdigit(static_cast<unsigned char>(source[i + 1])))) {
            const long start_col = col;
            std::size_t j = i;
            bool is_hex = false;
            bool has_dot = false;
            if (source[j] == '0' && j + 1 < n && (source[j + 1] == 'x' || source[j + 1] == 'X')) {
                is_hex = true;
                j += 2;
                const std::size_t digits = j;
                while (j < n && std::isxdigit(static_cast<unsigned char>(source[j])))
                    ++j;
                if (j == digits)
                    throw CompileError(line, start_col, "hexadecimal literal needs digits");
            } else {
                while (j < n && std::isdigit(static_cast<unsigned char>(source[j])))
                    ++j;
                if (j < n && source[j] == '.') {
                    has_dot = true;
                    ++j;
                    while (j < n && std::isdigit(static_cast<unsigned char>(source[j])))
                        ++j;
                }
            }
            const std::string text = source.substr(i, j - i);
            double value = 0.0;
            bool integral = false;
            try {
                if (is_hex) {
                    value = static_cast<double>(std::stoull(text.substr(2), nullptr, 16));
                    integral = true;
                } else if (has_dot) {
                    value = std::stod(text);
                } else if (text.size() > 1 && text[0] == '0') {
                    for (char d : text)
                        if (d > '7')
                            throw CompileError(line, start_col,
                                               "invalid digit '" + std::string(1, d)
                                                   + "' in octal literal");
                    value = static_cast<double>(std::stoull(text, nullptr, 8));
                    integral = true;
                } else {
                    value = static_cast<double>(std::stoull(text));
                    integral = true;
                }
            } catch (const std::out_of_range&) {
                throw CompileError(line, start_col, "number literal out of range");
            }
            Token t{TokenKind::number, text, value, integral, line, start_col};
            out.tokens.push_back(std::move(t));
            col += static_cast<long>(j - i);
            i = j;
            continue;
        }
        if (std::string("=.(){}+-*/").find(c) != std::string::npos) {
            push(TokenKind::punct, std::string(1, c));
            ++i;
            ++col;
            continue;
        }
        throw CompileError(line, col, "illegal character '" + std::string(1, c) + "'");
    }
    push(TokenKind::end, "");
    return out;
}

} // namespace iontrap::pulse
