// SPDX-License-Identifier: Apache-2.0
#include "lexer.hpp"

#include <cctype>

namespace remodel::detail {

namespace {

bool identStart(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool identChar(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

}  // namespace

std::vector<Token> lex(const std::string& s, std::vector<LexError>& errors) {
    std::vector<Token> out;
    std::size_t i = 0;
    int line = 1;
    std::size_t lineStart = 0;
    int lastTokenLine = 0;

    auto advanceNewline = [&](std::size_t at) {
        ++line;
        lineStart = at + 1;
    };

    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (c == '\n') {
            advanceNewline(i);
            ++i;
            continue;
        }
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
            while (i < s.size() && s[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
            int startLine = line;
            int startCol = static_cast<int>(i - lineStart) + 1;
            i += 2;
            while (i + 1 < s.size() && !(s[i] == '*' && s[i + 1] == '/')) {
                if (s[i] == '\n') advanceNewline(i);
                ++i;
            }
            if (i + 1 >= s.size()) {
                errors.push_back({"unterminated block comment", startLine, startCol});
                i = s.size();
            } else {
                i += 2;
            }
            continue;
        }

        Token t;
        t.line = line;
        t.col = static_cast<int>(i - lineStart) + 1;
        t.firstOnLine = lastTokenLine != line;
        std::size_t start = i;

        if (identStart(c)) {
            while (i < s.size() && identChar(static_cast<unsigned char>(s[i]))) ++i;
            t.kind = Token::Kind::Ident;
        } else if (std::isdigit(c)) {
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            if (i + 1 < s.size() && s[i] == '.' && std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
                ++i;
                while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            }
            t.kind = Token::Kind::Number;
        } else if (c == '"' || c == '\'') {
            char quote = static_cast<char>(c);
            ++i;
            while (i < s.size() && s[i] != quote && s[i] != '\n') {
                if (s[i] == '\\' && i + 1 < s.size()) ++i;
                ++i;
            }
            if (i >= s.size() || s[i] != quote) {
                errors.push_back({"unterminated string literal", t.line, t.col});
            } else {
                ++i;
            }
            t.kind = Token::Kind::String;
        } else {
            static const char* multi[] = {"->", "::", "<>", "<=", ">="};
            t.kind = Token::Kind::Punct;
            i += 1;
            for (const char* m : multi) {
                if (s.compare(start, 2, m) == 0) {
                    i = start + 2;
                    break;
                }
            }
        }
        t.text = s.substr(start, i - start);
        lastTokenLine = line;
        out.push_back(std::move(t));
    }

    Token end;
    end.kind = Token::Kind::End;
    end.line = line;
    end.col = static_cast<int>(i - lineStart) + 1;
    end.firstOnLine = true;
    out.push_back(end);
    return out;
}

}  // namespace remodel::detail
