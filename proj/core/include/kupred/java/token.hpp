#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kupred::java {

enum class TokenKind : uint8_t {
    Identifier,
    Keyword,
    IntLiteral,
    LongLiteral,
    FloatLiteral,
    DoubleLiteral,
    CharLiteral,
    StringLiteral,
    BoolLiteral,
    NullLiteral,
    Operator,   // all operators and separators, spelling in text
    EndOfFile,
};

struct Token {
    TokenKind kind = TokenKind::EndOfFile;
    std::string_view text;  // view into the source buffer
    uint32_t begin = 0;     // byte offset
    uint32_t end = 0;       // byte offset one past the token
    uint32_t line = 0;      // 1-based line of the first byte
};

struct CommentSpan {
    uint32_t begin = 0;
    uint32_t end = 0;
    uint32_t line_begin = 0;
    uint32_t line_end = 0;
    bool block = false;  // true for /* */ and /** */, false for //
};

struct LexError {
    std::string message;
    uint32_t line = 0;
    uint32_t offset = 0;
};

struct LexResult {
    std::vector<Token> tokens;        // terminated by EndOfFile
    std::vector<CommentSpan> comments;
    std::vector<LexError> errors;
    uint32_t line_count = 0;          // physical lines in the file
    uint32_t semicolon_count = 0;     // ';' tokens outside comments/strings
};

// Tokenizes Java SE 8 source. Malformed input produces best-effort tokens
// plus error records; the lexer never throws.
LexResult lex(std::string_view source);

bool is_java_keyword(std::string_view word);

} // namespace kupred::java
