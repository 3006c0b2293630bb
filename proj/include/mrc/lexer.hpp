#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "mrc/error.hpp"

namespace mrc {

enum class TokenKind { identifier, keyword, punctuation, end };

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;
  std::string file;       // source file name (not a path)
  std::size_t offset = 0; // byte offset of the first character

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_punct(std::string_view t) const { return is(TokenKind::punctuation, t); }
  bool is_keyword(std::string_view t) const { return is(TokenKind::keyword, t); }
};

namespace detail {

constexpr std::array<std::string_view, 5> k_keywords = {
    "namespace", "struct", "extern", "using", "int"};

inline bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool is_ident_char(char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9');
}
inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}
inline bool is_single_punct(char c) {
  switch (c) {
    case '{': case '}': case ';': case '*': case '.': case '#':
    case '<': case '>': case '"': case '(': case ')': case '=': case ',':
      return true;
    default:
      return false;
  }
}

}  // namespace detail

inline bool is_keyword_text(std::string_view s) {
  for (auto k : detail::k_keywords)
    if (k == s) return true;
  return false;
}

/// Splits `source` into tokens. Total and deterministic: every byte is
/// either consumed or reported as a lex error with its offset. The cost
/// meter is not touched here; parsing charges it.
inline std::vector<Token> tokenize(std::string_view source, const std::string& file = "<input>") {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = source.size();
  while (i < n) {
    const char c = source[i];
    if (detail::is_space(c)) {
      ++i;
      continue;
    }
    if (detail::is_ident_start(c)) {
      std::size_t start = i;
      while (i < n && detail::is_ident_char(source[i])) ++i;
      std::string text(source.substr(start, i - start));
      TokenKind kind = is_keyword_text(text) ? TokenKind::keyword : TokenKind::identifier;
      out.push_back({kind, std::move(text), file, start});
      continue;
    }
    if (c == ':') {
      if (i + 1 < n && source[i + 1] == ':') {
        out.push_back({TokenKind::punctuation, "::", file, i});
        i += 2;
        continue;
      }
      fail(ErrorKind::lex_error,
           file + ": offset " + std::to_string(i) + ": stray ':' (expected '::')");
    }
    if (detail::is_single_punct(c)) {
      out.push_back({TokenKind::punctuation, std::string(1, c), file, i});
      ++i;
      continue;
    }
    if (c >= '0' && c <= '9')
      fail(ErrorKind::lex_error,
           file + ": offset " + std::to_string(i) + ": token may not start with a digit");
    fail(ErrorKind::lex_error, file + ": offset " + std::to_string(i) +
                                   ": byte outside the grammar alphabet");
  }
  return out;
}

inline std::size_t token_count(std::string_view source) { return tokenize(source).size(); }

}  // namespace mrc
