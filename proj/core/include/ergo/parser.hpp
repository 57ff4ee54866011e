#ifndef ERGO_PARSER_HPP
#define ERGO_PARSER_HPP

#include <string>
#include <string_view>
#include <vector>

#include "ergo/syntax.hpp"

namespace ergo {

enum class Tok {
  Ident, Nat,
  KwType, KwDecl, KwProc, KwCase, KwSend, KwRecv, KwClose, KwWait,
  KwAssert, KwAssume, KwPay, KwGet, KwWork, KwImpossible,
  LBrace, RBrace, LParen, RParen, Dot, Comma, Colon, Semi,
  Equal, Gt, Lt, Ge, Le, Plus, Minus, Star, Bar, Amp, Question, Bang, Tilde,
  Lolli, LArrow, DArrow, AndAnd, OrOr,
  Eof,
};

struct Token {
  Tok kind;
  std::string text;
  uint64_t nat = 0;
  Span span;
};

struct ParseError : std::runtime_error {
  Span span;
  ParseError(std::string msg, Span sp) : std::runtime_error(std::move(msg)), span(sp) {}
};

/// Tokenizes the surface syntax; '%' starts a line comment.
std::vector<Token> lex(std::string_view source);

Signature parse_signature(std::string_view source);

/// Parses a standalone type / proposition expression (used by the eq command).
Type parse_type_expr(std::string_view source);
Prop parse_prop_expr(std::string_view source);

// Pretty-printer: output re-parses to a structurally equal signature.
// Generated internal names render as their source form when `sig` is given.
std::string show_type(const Type& t, const Signature* sig = nullptr);
std::string show_process(const Process& p, int indent = 2);
std::string render_signature(const Signature& sig);

struct Diagnostic {
  std::string category;
  std::string message;  // e.g. the unprovable entailment in concrete syntax
  Span span;
};

/// Multi-line message: category, detail, offending source line, tilde underline.
std::string render_diagnostic(const Diagnostic& d, std::string_view source);

}  // namespace ergo

#endif  // ERGO_PARSER_HPP
