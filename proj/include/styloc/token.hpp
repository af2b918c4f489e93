#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace styloc {

enum class TokenKind {
    Identifier,
    Keyword,
    IntLiteral,
    FloatLiteral,
    CharLiteral,
    StringLiteral,
    Operator,
    Punctuator,
    PreprocessorLine,
    Comment,
};

const char* token_kind_name(TokenKind k);

struct Token {
    TokenKind kind;
    std::string text;     // exact source slice, comments keep their delimiters
    int line = 1;         // 1-based
    int column = 1;       // 1-based
    std::size_t offset = 0;  // byte offset into the source
    bool error = false;   // unterminated literal/comment or stray byte

    bool same_lexeme(const Token& o) const {
        return kind == o.kind && text == o.text;
    }
};

// Splits source into tokens. Total: every byte lands in exactly one token or
// is whitespace. Never throws; malformed input sets Token::error instead.
std::vector<Token> tokenize(std::string_view source);

// Removes comments: line comments vanish, block comments become one space,
// everything else is preserved byte for byte.
std::string strip_comments(std::string_view source);

bool is_c_keyword(std::string_view word);

}  // namespace styloc
