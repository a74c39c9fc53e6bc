#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "srvscan/core.hpp"

namespace srvscan {

enum class TokenKind { Identifier, Number, String, Punct, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  std::uint32_t line = 1, column = 1;
  std::size_t offset = 0;

  bool is(std::string_view t) const { return text == t; }
  bool is_ident() const { return kind == TokenKind::Identifier; }
};

// Tokenizes Solidity source. Comments and whitespace are skipped; everything
// else (including keywords) comes out as Identifier/Number/String/Punct.
class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      Token t = next_token();
      bool end = t.kind == TokenKind::End;
      out.push_back(std::move(t));
      if (end) break;
    }
    return out;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1, col_ = 1;

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_trivia() {
    for (;;) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (peek() != '\n' && peek() != '\0') advance();
      } else if (c == '/' && peek(1) == '*') {
        advance();
        advance();
        while (!(peek() == '*' && peek(1) == '/')) {
          if (peek() == '\0')
            throw ParseError("unterminated block comment", line_, col_);
          advance();
        }
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  Token make(TokenKind k, std::string text, std::uint32_t l, std::uint32_t c,
             std::size_t off) {
    Token t;
    t.kind = k;
    t.text = std::move(text);
    t.line = l;
    t.column = c;
    t.offset = off;
    return t;
  }

  Token next_token() {
    std::uint32_t l = line_, c = col_;
    std::size_t off = pos_;
    char ch = peek();
    if (ch == '\0') return make(TokenKind::End, "", l, c, off);

    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_' || ch == '$') {
      std::string text;
      while (std::isalnum(static_cast<unsigned char>(peek())) ||
             peek() == '_' || peek() == '$')
        text.push_back(advance());
      return make(TokenKind::Identifier, std::move(text), l, c, off);
    }

    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::string text;
      if (ch == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
        text.push_back(advance());
        text.push_back(advance());
        while (std::isxdigit(static_cast<unsigned char>(peek())) || peek() == '_')
          text.push_back(advance());
      } else {
        while (std::isdigit(static_cast<unsigned char>(peek())) ||
               peek() == '_' || peek() == '.' || peek() == 'e')
          text.push_back(advance());
        // unit suffixes (ether, days, ...) lex as separate identifiers
      }
      return make(TokenKind::Number, std::move(text), l, c, off);
    }

    if (ch == '"' || ch == '\'') {
      char quote = advance();
      std::string text(1, quote);
      while (peek() != quote) {
        if (peek() == '\0' || peek() == '\n')
          throw ParseError("unterminated string literal", l, c);
        if (peek() == '\\') text.push_back(advance());
        text.push_back(advance());
      }
      text.push_back(advance());
      return make(TokenKind::String, std::move(text), l, c, off);
    }

    // multi-char operators, longest first
    static const char* kOps3[] = {">>=", "<<=", "**="};
    static const char* kOps2[] = {"==", "!=", "<=", ">=", "&&", "||", "->",
                                  "=>", "+=", "-=", "*=", "/=", "%=", "|=",
                                  "&=", "^=", "<<", ">>", "++", "--", "**",
                                  ":="};
    for (const char* op : kOps3) {
      if (src_.substr(pos_).starts_with(op)) {
        advance();
        advance();
        advance();
        return make(TokenKind::Punct, op, l, c, off);
      }
    }
    for (const char* op : kOps2) {
      if (src_.substr(pos_).starts_with(op)) {
        advance();
        advance();
        return make(TokenKind::Punct, op, l, c, off);
      }
    }
    advance();
    return make(TokenKind::Punct, std::string(1, ch), l, c, off);
  }
};

inline std::vector<Token> lex(std::string_view src) { return Lexer(src).run(); }

}  // namespace srvscan
