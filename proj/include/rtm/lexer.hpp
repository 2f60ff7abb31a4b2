#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rtm/diagnostics.hpp"
#include "rtm/value.hpp"

namespace rtm {

enum class TokenKind { Ident, Int, String, Date, Punct, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;      // identifier / punctuation spelling / decoded string
    std::int64_t int_value = 0;
    Date date_value{};
    SourceLoc loc;

    bool is(std::string_view punct) const { return kind == TokenKind::Punct && text == punct; }
    bool is_ident(std::string_view word) const { return kind == TokenKind::Ident && text == word; }
    std::string describe() const;
};

/// Tokenizer shared by the metamodel, instance and rule formats.
/// `//` starts a line comment. Identifiers are [A-Za-z_][A-Za-z0-9_#]*.
/// \d{4}-\d{2}-\d{2} lexes as a date; a leading '-' is always its own token.
std::vector<Token> tokenize(std::string_view text);

/// Cursor over a token vector with the expect/accept helpers every parser
/// in this project uses.
class TokenStream {
public:
    explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    const Token& peek(std::size_t ahead = 0) const;
    const Token& next();
    bool at_end() const { return peek().kind == TokenKind::End; }

    bool accept(std::string_view punct);
    bool accept_ident(std::string_view word);
    const Token& expect(std::string_view punct);
    const Token& expect_ident(std::string_view word);
    /// Any identifier.
    const Token& expect_name(std::string_view what = "identifier");

    [[noreturn]] void fail(std::string message, std::vector<std::string> expected = {}) const;

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

}  // namespace rtm
