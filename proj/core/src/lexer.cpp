#include <cctype>
#include <map>

#include "ergo/parser.hpp"

namespace ergo {

namespace {

const std::map<std::string, Tok, std::less<>> kKeywords = {
    {"type", Tok::KwType},     {"decl", Tok::KwDecl},   {"proc", Tok::KwProc},
    {"case", Tok::KwCase},     {"send", Tok::KwSend},   {"recv", Tok::KwRecv},
    {"close", Tok::KwClose},   {"wait", Tok::KwWait},   {"assert", Tok::KwAssert},
    {"assume", Tok::KwAssume}, {"pay", Tok::KwPay},     {"get", Tok::KwGet},
    {"work", Tok::KwWork},     {"impossible", Tok::KwImpossible},
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
bool ident_cont(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

}  // namespace

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  size_t i = 0;
  const size_t n = src.size();
  auto push = [&](Tok k, size_t start, size_t end) {
    out.push_back(Token{k, std::string(src.substr(start, end - start)), 0,
                        Span{static_cast<uint32_t>(start), static_cast<uint32_t>(end)}});
  };
  while (i < n) {
    char c = src[i];
    if (c == '%') {  // line comment
      while (i < n && src[i] != '\n') ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    size_t start = i;
    if (ident_start(c)) {
      while (i < n && ident_cont(src[i])) ++i;
      std::string_view word = src.substr(start, i - start);
      auto kw = kKeywords.find(word);
      push(kw == kKeywords.end() ? Tok::Ident : kw->second, start, i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      uint64_t v = 0;
      while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) {
        v = v * 10 + static_cast<uint64_t>(src[i] - '0');
        ++i;
      }
      push(Tok::Nat, start, i);
      out.back().nat = v;
      continue;
    }
    auto two = [&](char next) { return i + 1 < n && src[i + 1] == next; };
    switch (c) {
      case '{': push(Tok::LBrace, start, ++i); break;
      case '}': push(Tok::RBrace, start, ++i); break;
      case '(': push(Tok::LParen, start, ++i); break;
      case ')': push(Tok::RParen, start, ++i); break;
      case '.': push(Tok::Dot, start, ++i); break;
      case ',': push(Tok::Comma, start, ++i); break;
      case ':': push(Tok::Colon, start, ++i); break;
      case ';': push(Tok::Semi, start, ++i); break;
      case '+': push(Tok::Plus, start, ++i); break;
      case '*': push(Tok::Star, start, ++i); break;
      case '|': push(Tok::Bar, start, ++i); break;
      case '&': push(Tok::Amp, start, ++i); break;
      case '?': push(Tok::Question, start, ++i); break;
      case '!': push(Tok::Bang, start, ++i); break;
      case '~': push(Tok::Tilde, start, ++i); break;
      case '=':
        if (two('>')) {
          i += 2;
          push(Tok::DArrow, start, i);
        } else {
          push(Tok::Equal, start, ++i);
        }
        break;
      case '>':
        if (two('=')) {
          i += 2;
          push(Tok::Ge, start, i);
        } else {
          push(Tok::Gt, start, ++i);
        }
        break;
      case '<':
        if (two('-')) {
          i += 2;
          push(Tok::LArrow, start, i);
        } else if (two('=')) {
          i += 2;
          push(Tok::Le, start, i);
        } else {
          push(Tok::Lt, start, ++i);
        }
        break;
      case '-':
        // '-o' is the lolli arrow unless the 'o' begins a longer identifier.
        if (two('o') && (i + 2 >= n || !ident_cont(src[i + 2]))) {
          i += 2;
          push(Tok::Lolli, start, i);
        } else {
          push(Tok::Minus, start, ++i);
        }
        break;
      case '/':
        if (two('\\')) {
          i += 2;
          push(Tok::AndAnd, start, i);
        } else {
          throw ParseError("illegal character '/'",
                           Span{static_cast<uint32_t>(start), static_cast<uint32_t>(start + 1)});
        }
        break;
      case '\\':
        if (two('/')) {
          i += 2;
          push(Tok::OrOr, start, i);
        } else {
          throw ParseError("illegal character '\\'",
                           Span{static_cast<uint32_t>(start), static_cast<uint32_t>(start + 1)});
        }
        break;
      default:
        throw ParseError(std::string("illegal character '") + c + "'",
                         Span{static_cast<uint32_t>(start), static_cast<uint32_t>(start + 1)});
    }
  }
  out.push_back(Token{Tok::Eof, "", 0, Span{static_cast<uint32_t>(n), static_cast<uint32_t>(n)}});
  return out;
}

}  // namespace ergo
