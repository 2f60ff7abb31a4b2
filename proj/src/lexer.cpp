#include "rtm/lexer.hpp"

#include <cctype>
#include <limits>

namespace rtm {

std::string Token::describe() const {
    switch (kind) {
        case TokenKind::Ident: return "identifier '" + text + "'";
        case TokenKind::Int: return "integer " + std::to_string(int_value);
        case TokenKind::String: return "string " + quote_string(text);
        case TokenKind::Date: return "date " + format_date(date_value);
        case TokenKind::Punct: return "'" + text + "'";
        case TokenKind::End: return "end of input";
    }
    return "?";
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#';
}
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    explicit Lexer(std::string_view text) : src_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.loc = loc();
            if (pos_ >= src_.size()) {
                out.push_back(t);
                return out;
            }
            char c = src_[pos_];
            if (ident_start(c)) {
                std::size_t b = pos_;
                while (pos_ < src_.size() && ident_char(src_[pos_])) advance();
                t.kind = TokenKind::Ident;
                t.text = std::string(src_.substr(b, pos_ - b));
            } else if (digit(c)) {
                lex_number(t);
            } else if (c == '"') {
                lex_string(t);
            } else {
                lex_punct(t);
            }
            out.push_back(std::move(t));
        }
    }

private:
    SourceLoc loc() const { return {line_, col_}; }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else if ((static_cast<unsigned char>(src_[pos_]) & 0xC0) != 0x80) {
            ++col_;  // count code points, not UTF-8 continuation bytes
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    bool date_ahead() const {
        if (pos_ + 10 > src_.size()) return false;
        auto s = src_.substr(pos_, 10);
        for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
            if (!digit(s[i])) return false;
        if (s[4] != '-' || s[7] != '-') return false;
        return pos_ + 10 == src_.size() || !ident_char(src_[pos_ + 10]);
    }

    void lex_number(Token& t) {
        if (date_ahead()) {
            auto text = src_.substr(pos_, 10);
            auto d = parse_date(text);
            if (!d) throw SyntaxError("invalid date '" + std::string(text) + "'", t.loc);
            for (int i = 0; i < 10; ++i) advance();
            t.kind = TokenKind::Date;
            t.date_value = *d;
            t.text = std::string(text);
            return;
        }
        std::size_t b = pos_;
        std::uint64_t v = 0;
        constexpr auto kMax = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
        while (pos_ < src_.size() && digit(src_[pos_])) {
            v = v * 10 + static_cast<std::uint64_t>(src_[pos_] - '0');
            if (v > kMax) throw SyntaxError("integer literal out of range", t.loc);
            advance();
        }
        if (pos_ < src_.size() && ident_start(src_[pos_]))
            throw SyntaxError("malformed number", t.loc);
        t.kind = TokenKind::Int;
        t.int_value = static_cast<std::int64_t>(v);
        t.text = std::string(src_.substr(b, pos_ - b));
    }

    void lex_string(Token& t) {
        advance();  // opening quote
        std::string out;
        for (;;) {
            if (pos_ >= src_.size() || src_[pos_] == '\n')
                throw SyntaxError("unterminated string literal", t.loc);
            char c = src_[pos_];
            if (c == '"') {
                advance();
                break;
            }
            if (c == '\\') {
                advance();
                if (pos_ >= src_.size()) throw SyntaxError("unterminated string literal", t.loc);
                char e = src_[pos_];
                switch (e) {
                    case '"': out.push_back('"'); break;
                    case '\\': out.push_back('\\'); break;
                    case 'n': out.push_back('\n'); break;
                    case 't': out.push_back('\t'); break;
                    case 'r': out.push_back('\r'); break;
                    default: throw SyntaxError(std::string("unknown escape '\\") + e + "'", loc());
                }
                advance();
                continue;
            }
            out.push_back(c);
            advance();
        }
        t.kind = TokenKind::String;
        t.text = std::move(out);
    }

    void lex_punct(Token& t) {
        static constexpr std::string_view kTwo[] = {"==", "!=", "<=", ">=", ":=", "->", "=>"};
        auto rest = src_.substr(pos_);
        for (auto p : kTwo) {
            if (rest.substr(0, 2) == p) {
                advance();
                advance();
                t.kind = TokenKind::Punct;
                t.text = std::string(p);
                return;
            }
        }
        static constexpr std::string_view kOne = "{}(),:.=<>+-*/?;";
        if (kOne.find(rest[0]) == std::string_view::npos)
            throw SyntaxError(std::string("unexpected character '") + rest[0] + "'", t.loc);
        t.kind = TokenKind::Punct;
        t.text = std::string(1, rest[0]);
        advance();
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

const Token& TokenStream::peek(std::size_t ahead) const {
    std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
}

const Token& TokenStream::next() {
    const Token& t = peek();
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
}

bool TokenStream::accept(std::string_view punct) {
    if (!peek().is(punct)) return false;
    next();
    return true;
}

bool TokenStream::accept_ident(std::string_view word) {
    if (!peek().is_ident(word)) return false;
    next();
    return true;
}

const Token& TokenStream::expect(std::string_view punct) {
    if (!peek().is(punct)) fail("unexpected " + peek().describe(), {"'" + std::string(punct) + "'"});
    return next();
}

const Token& TokenStream::expect_ident(std::string_view word) {
    if (!peek().is_ident(word)) fail("unexpected " + peek().describe(), {"'" + std::string(word) + "'"});
    return next();
}

const Token& TokenStream::expect_name(std::string_view what) {
    if (peek().kind != TokenKind::Ident) fail("unexpected " + peek().describe(), {std::string(what)});
    return next();
}

void TokenStream::fail(std::string message, std::vector<std::string> expected) const {
    throw SyntaxError(std::move(message), peek().loc, std::move(expected));
}

}  // namespace rtm
