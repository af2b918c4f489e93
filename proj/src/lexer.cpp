#include "styloc/token.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

namespace styloc {

const char* token_kind_name(TokenKind k) {
    switch (k) {
        case TokenKind::Identifier: return "Identifier";
        case TokenKind::Keyword: return "Keyword";
        case TokenKind::IntLiteral: return "IntLiteral";
        case TokenKind::FloatLiteral: return "FloatLiteral";
        case TokenKind::CharLiteral: return "CharLiteral";
        case TokenKind::StringLiteral: return "StringLiteral";
        case TokenKind::Operator: return "Operator";
        case TokenKind::Punctuator: return "Punctuator";
        case TokenKind::PreprocessorLine: return "PreprocessorLine";
        case TokenKind::Comment: return "Comment";
    }
    return "?";
}

bool is_c_keyword(std::string_view word) {
    static const std::unordered_set<std::string_view> kw = {
        "auto", "break", "case", "char", "const", "continue", "default",
        "do", "double", "else", "enum", "extern", "float", "for", "goto",
        "if", "inline", "int", "long", "register", "restrict", "return",
        "short", "signed", "sizeof", "static", "struct", "switch",
        "typedef", "union", "unsigned", "void", "volatile", "while",
        "_Bool", "_Complex", "_Imaginary",
    };
    return kw.count(word) > 0;
}

namespace {

// Structural delimiters; everything else symbolic is an Operator token.
bool is_punctuator_text(std::string_view t) {
    return t == "(" || t == ")" || t == "{" || t == "}" || t == "[" ||
           t == "]" || t == "," || t == ";";
}

struct Lexer {
    std::string_view src;
    std::size_t pos = 0;
    int line = 1;
    int col = 1;
    bool at_line_start = true;
    std::vector<Token> out;

    explicit Lexer(std::string_view s) : src(s) {}

    char peek(std::size_t ahead = 0) const {
        return pos + ahead < src.size() ? src[pos + ahead] : '\0';
    }
    bool eof() const { return pos >= src.size(); }

    void advance() {
        if (eof()) return;
        if (src[pos] == '\n') {
            ++line;
            col = 1;
            at_line_start = true;
        } else {
            ++col;
        }
        ++pos;
    }

    void emit(TokenKind kind, std::size_t start, int tline, int tcol,
              bool error = false) {
        Token t;
        t.kind = kind;
        t.text = std::string(src.substr(start, pos - start));
        t.line = tline;
        t.column = tcol;
        t.offset = start;
        t.error = error;
        out.push_back(std::move(t));
    }

    static bool is_ident_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }
    static bool is_ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }
    static bool is_space(char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
               c == '\f';
    }

    void run() {
        while (!eof()) {
            char c = peek();
            if (is_space(c)) {
                advance();
                continue;
            }
            std::size_t start = pos;
            int tline = line, tcol = col;
            bool line_start = at_line_start;
            at_line_start = false;
            if (c == '#' && line_start) {
                lex_preprocessor(start, tline, tcol);
            } else if (c == '/' && peek(1) == '/') {
                lex_line_comment(start, tline, tcol);
            } else if (c == '/' && peek(1) == '*') {
                lex_block_comment(start, tline, tcol);
            } else if (c == '"') {
                lex_string('"', TokenKind::StringLiteral, start, tline, tcol);
            } else if (c == '\'') {
                lex_string('\'', TokenKind::CharLiteral, start, tline, tcol);
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       (c == '.' &&
                        std::isdigit(static_cast<unsigned char>(peek(1))))) {
                lex_number(start, tline, tcol);
            } else if (is_ident_start(c)) {
                while (is_ident_char(peek())) advance();
                std::string_view word = src.substr(start, pos - start);
                emit(is_c_keyword(word) ? TokenKind::Keyword
                                        : TokenKind::Identifier,
                     start, tline, tcol);
            } else {
                lex_symbol(start, tline, tcol);
            }
        }
    }

    // '#' first on its line through end of line, honoring backslash splices.
    void lex_preprocessor(std::size_t start, int tline, int tcol) {
        while (!eof() && peek() != '\n') {
            if (peek() == '\\') {
                advance();
                if (peek() == '\r') advance();
                if (peek() == '\n') advance();
                continue;
            }
            advance();
        }
        // trim trailing '\r' of a CRLF line out of the token text
        std::size_t end = pos;
        if (end > start && src[end - 1] == '\r') --end;
        Token t;
        t.kind = TokenKind::PreprocessorLine;
        t.text = std::string(src.substr(start, end - start));
        t.line = tline;
        t.column = tcol;
        t.offset = start;
        out.push_back(std::move(t));
    }

    void lex_line_comment(std::size_t start, int tline, int tcol) {
        while (!eof() && peek() != '\n') {
            if (peek() == '\\') {
                // a trailing backslash splices the next line into the comment
                std::size_t look = pos + 1;
                if (look < src.size() && src[look] == '\r') ++look;
                if (look < src.size() && src[look] == '\n') {
                    while (pos <= look) advance();
                    continue;
                }
            }
            advance();
        }
        std::size_t end = pos;
        if (end > start && src[end - 1] == '\r') --end;
        Token t;
        t.kind = TokenKind::Comment;
        t.text = std::string(src.substr(start, end - start));
        t.line = tline;
        t.column = tcol;
        t.offset = start;
        out.push_back(std::move(t));
    }

    void lex_block_comment(std::size_t start, int tline, int tcol) {
        advance();  // '/'
        advance();  // '*'
        bool closed = false;
        while (!eof()) {
            if (peek() == '*' && peek(1) == '/') {
                advance();
                advance();
                closed = true;
                break;
            }
            advance();
        }
        emit(TokenKind::Comment, start, tline, tcol, !closed);
    }

    void lex_string(char quote, TokenKind kind, std::size_t start, int tline,
                    int tcol) {
        advance();  // opening quote
        bool closed = false;
        while (!eof() && peek() != '\n') {
            if (peek() == '\\') {
                advance();
                if (!eof() && peek() != '\n') advance();
                continue;
            }
            if (peek() == quote) {
                advance();
                closed = true;
                break;
            }
            advance();
        }
        emit(kind, start, tline, tcol, !closed);
    }

    void lex_number(std::size_t start, int tline, int tcol) {
        bool is_float = false;
        if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
            advance();
            advance();
            while (std::isxdigit(static_cast<unsigned char>(peek()))) advance();
            if (peek() == '.') {
                is_float = true;
                advance();
                while (std::isxdigit(static_cast<unsigned char>(peek())))
                    advance();
            }
            if (peek() == 'p' || peek() == 'P') {
                is_float = true;
                advance();
                if (peek() == '+' || peek() == '-') advance();
                while (std::isdigit(static_cast<unsigned char>(peek())))
                    advance();
            }
        } else if (peek() == '0' && (peek(1) == 'b' || peek(1) == 'B') &&
                   (peek(2) == '0' || peek(2) == '1')) {
            advance();
            advance();
            while (peek() == '0' || peek() == '1') advance();
        } else {
            while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
            if (peek() == '.') {
                is_float = true;
                advance();
                while (std::isdigit(static_cast<unsigned char>(peek())))
                    advance();
            }
            if (peek() == 'e' || peek() == 'E') {
                char sign = peek(1);
                char digit = (sign == '+' || sign == '-') ? peek(2) : sign;
                if (std::isdigit(static_cast<unsigned char>(digit))) {
                    is_float = true;
                    advance();
                    if (peek() == '+' || peek() == '-') advance();
                    while (std::isdigit(static_cast<unsigned char>(peek())))
                        advance();
                }
            }
        }
        // suffixes: uUlL for ints, fFlL for floats
        while (peek() == 'u' || peek() == 'U' || peek() == 'l' ||
               peek() == 'L' || ((peek() == 'f' || peek() == 'F') && is_float)) {
            advance();
        }
        emit(is_float ? TokenKind::FloatLiteral : TokenKind::IntLiteral, start,
             tline, tcol);
    }

    void lex_symbol(std::size_t start, int tline, int tcol) {
        static const std::array<std::string_view, 5> three = {
            "<<=", ">>=", "...", "->*", "::*"};
        static const std::array<std::string_view, 19> two = {
            "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&",
            "||", "+=", "-=", "*=", "/=", "%=", "&=", "^=", "|="};
        static const std::string_view singles = "+-*/%&|^~!<>=?:.,;()[]{}#";

        std::string_view rest = src.substr(pos);
        for (auto t : three) {
            if (rest.substr(0, 3) == t) {
                advance();
                advance();
                advance();
                emit(TokenKind::Operator, start, tline, tcol);
                return;
            }
        }
        for (auto t : two) {
            if (rest.substr(0, 2) == t) {
                advance();
                advance();
                emit(TokenKind::Operator, start, tline, tcol);
                return;
            }
        }
        char c = peek();
        advance();
        if (singles.find(c) != std::string_view::npos) {
            std::string_view t = src.substr(start, 1);
            emit(is_punctuator_text(t) ? TokenKind::Punctuator
                                       : TokenKind::Operator,
                 start, tline, tcol);
        } else {
            // byte outside the C character set: keep it so the stream stays
            // total, flag it for diagnostics
            emit(TokenKind::Operator, start, tline, tcol, true);
        }
    }
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) {
    Lexer lx(source);
    lx.run();
    return lx.out;
}

std::string strip_comments(std::string_view source) {
    std::vector<Token> tokens = tokenize(source);
    std::string out;
    out.reserve(source.size());
    std::size_t cursor = 0;
    for (const Token& t : tokens) {
        if (t.kind != TokenKind::Comment) continue;
        out.append(source.substr(cursor, t.offset - cursor));
        if (t.text.size() >= 2 && t.text[1] == '*') out.push_back(' ');
        cursor = t.offset + t.text.size();
    }
    out.append(source.substr(cursor));
    return out;
}

}  // namespace styloc
