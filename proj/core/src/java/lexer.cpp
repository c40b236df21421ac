#include "kupred/java/token.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

namespace kupred::java {

namespace {

const std::unordered_set<std::string_view>& keyword_set() {
    static const std::unordered_set<std::string_view> kw = {
        "abstract", "assert",   "boolean",    "break",      "byte",
        "case",     "catch",    "char",       "class",      "const",
        "continue", "default",  "do",         "double",     "else",
        "enum",     "extends",  "final",      "finally",    "float",
        "for",      "goto",     "if",         "implements", "import",
        "instanceof", "int",    "interface",  "long",       "native",
        "new",      "package",  "private",    "protected",  "public",
        "return",   "short",    "static",     "strictfp",   "super",
        "switch",   "synchronized", "this",   "throw",      "throws",
        "transient", "try",     "void",       "volatile",   "while",
    };
    return kw;
}

inline bool ident_start(unsigned char c) {
    return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}
inline bool ident_part(unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '$' || c >= 0x80;
}
inline bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
inline bool is_hex(unsigned char c) {
    return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

// Longest-match operator table, ordered by length.
constexpr std::array<std::string_view, 38> kOps3Plus = {
    ">>>=", "<<=", ">>=", ">>>", "...", "->",  "::",  "==", "!=", "<=",
    ">=",   "&&",  "||",  "++",  "--",  "+=",  "-=",  "*=", "/=", "&=",
    "|=",   "^=",  "%=",  "<<",  ">>",  "(",   ")",   "{",  "}",  "[",
    "]",    ";",   ",",   ".",   "@",   "<",   ">",   "?",
};

} // namespace

bool is_java_keyword(std::string_view word) {
    return keyword_set().count(word) > 0;
}

LexResult lex(std::string_view src) {
    LexResult out;
    size_t i = 0;
    uint32_t line = 1;
    const size_t n = src.size();
    if (src.substr(0, 3) == "\xEF\xBB\xBF") i = 3;  // UTF-8 byte-order mark

    auto push = [&](TokenKind k, size_t b, size_t e, uint32_t ln) {
        out.tokens.push_back(Token{k, src.substr(b, e - b),
                                   static_cast<uint32_t>(b),
                                   static_cast<uint32_t>(e), ln});
    };

    while (i < n) {
        unsigned char c = src[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r' || c == '\f') {
            ++i;
            continue;
        }
        // comments
        if (c == '/' && i + 1 < n && (src[i + 1] == '/' || src[i + 1] == '*')) {
            size_t b = i;
            uint32_t lb = line;
            if (src[i + 1] == '/') {
                i += 2;
                while (i < n && src[i] != '\n') ++i;
                out.comments.push_back({static_cast<uint32_t>(b),
                                        static_cast<uint32_t>(i), lb, line,
                                        false});
            } else {
                i += 2;
                bool closed = false;
                while (i < n) {
                    if (src[i] == '\n') ++line;
                    if (src[i] == '*' && i + 1 < n && src[i + 1] == '/') {
                        i += 2;
                        closed = true;
                        break;
                    }
                    ++i;
                }
                if (!closed)
                    out.errors.push_back({"unterminated block comment", lb,
                                          static_cast<uint32_t>(b)});
                out.comments.push_back({static_cast<uint32_t>(b),
                                        static_cast<uint32_t>(i), lb, line,
                                        true});
            }
            continue;
        }
        // string literal
        if (c == '"') {
            size_t b = i;
            uint32_t lb = line;
            ++i;
            bool closed = false;
            while (i < n) {
                if (src[i] == '\\' && i + 1 < n) {
                    i += 2;
                    continue;
                }
                if (src[i] == '\n') break;  // strings cannot span lines
                if (src[i] == '"') {
                    ++i;
                    closed = true;
                    break;
                }
                ++i;
            }
            if (!closed)
                out.errors.push_back({"unterminated string literal", lb,
                                      static_cast<uint32_t>(b)});
            push(TokenKind::StringLiteral, b, i, lb);
            continue;
        }
        // char literal
        if (c == '\'') {
            size_t b = i;
            uint32_t lb = line;
            ++i;
            bool closed = false;
            while (i < n) {
                if (src[i] == '\\' && i + 1 < n) {
                    i += 2;
                    continue;
                }
                if (src[i] == '\n') break;
                if (src[i] == '\'') {
                    ++i;
                    closed = true;
                    break;
                }
                ++i;
            }
            if (!closed)
                out.errors.push_back({"unterminated char literal", lb,
                                      static_cast<uint32_t>(b)});
            push(TokenKind::CharLiteral, b, i, lb);
            continue;
        }
        // numbers
        if (is_digit(c) || (c == '.' && i + 1 < n && is_digit(src[i + 1]))) {
            size_t b = i;
            bool is_fp = false;
            if (c == '0' && i + 1 < n && (src[i + 1] == 'x' || src[i + 1] == 'X')) {
                i += 2;
                while (i < n && (is_hex(src[i]) || src[i] == '_')) ++i;
            } else if (c == '0' && i + 1 < n &&
                       (src[i + 1] == 'b' || src[i + 1] == 'B')) {
                i += 2;
                while (i < n && (src[i] == '0' || src[i] == '1' || src[i] == '_'))
                    ++i;
            } else {
                while (i < n && (is_digit(src[i]) || src[i] == '_')) ++i;
                if (i < n && src[i] == '.') {
                    is_fp = true;
                    ++i;
                    while (i < n && (is_digit(src[i]) || src[i] == '_')) ++i;
                }
                if (i < n && (src[i] == 'e' || src[i] == 'E')) {
                    is_fp = true;
                    ++i;
                    if (i < n && (src[i] == '+' || src[i] == '-')) ++i;
                    while (i < n && is_digit(src[i])) ++i;
                }
            }
            TokenKind k = is_fp ? TokenKind::DoubleLiteral : TokenKind::IntLiteral;
            if (i < n) {
                if (src[i] == 'l' || src[i] == 'L') {
                    k = TokenKind::LongLiteral;
                    ++i;
                } else if (src[i] == 'f' || src[i] == 'F') {
                    k = TokenKind::FloatLiteral;
                    ++i;
                } else if (src[i] == 'd' || src[i] == 'D') {
                    k = TokenKind::DoubleLiteral;
                    ++i;
                }
            }
            push(k, b, i, line);
            continue;
        }
        // identifiers & keywords
        if (ident_start(c)) {
            size_t b = i;
            ++i;
            while (i < n && ident_part(src[i])) ++i;
            std::string_view word = src.substr(b, i - b);
            if (word == "true" || word == "false") {
                push(TokenKind::BoolLiteral, b, i, line);
            } else if (word == "null") {
                push(TokenKind::NullLiteral, b, i, line);
            } else if (is_java_keyword(word)) {
                push(TokenKind::Keyword, b, i, line);
            } else {
                push(TokenKind::Identifier, b, i, line);
            }
            continue;
        }
        // operators / separators, longest match
        {
            bool matched = false;
            for (std::string_view op : kOps3Plus) {
                if (src.compare(i, op.size(), op) == 0) {
                    if (op == ";") ++out.semicolon_count;
                    push(TokenKind::Operator, i, i + op.size(), line);
                    i += op.size();
                    matched = true;
                    break;
                }
            }
            if (matched) continue;
            // single-char operators not in the multi table
            static const std::string_view singles = "+-*/%&|^!~=:";
            if (singles.find(static_cast<char>(c)) != std::string_view::npos) {
                push(TokenKind::Operator, i, i + 1, line);
                ++i;
                continue;
            }
            out.errors.push_back({"unexpected character", line,
                                  static_cast<uint32_t>(i)});
            ++i;
        }
    }

    // physical line count: last line counts even without trailing newline
    if (n == 0) {
        out.line_count = 0;
    } else {
        out.line_count = line - (src.back() == '\n' ? 1 : 0);
    }
    push(TokenKind::EndOfFile, n, n, line);
    return out;
}

} // namespace kupred::java
