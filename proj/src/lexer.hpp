// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace remodel::detail {

struct Token {
    enum class Kind { Ident, Number, String, Punct, End };
    Kind kind = Kind::End;
    std::string text;  // raw lexeme; strings keep their quotes
    int line = 1;
    int col = 1;
    bool firstOnLine = false;
};

struct LexError {
    std::string message;
    int line;
    int col;
};

// Splits REModel source into tokens. `//` and `/* */` comments are dropped.
std::vector<Token> lex(const std::string& text, std::vector<LexError>& errors);

}  // namespace remodel::detail
