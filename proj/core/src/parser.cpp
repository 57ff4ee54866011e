#include <set>

#include "ergo/parser.hpp"

namespace ergo {

namespace {

struct Parser {
  std::vector<Token> toks;
  size_t pos = 0;
  std::set<std::string> all_idents;  // for fresh channel generation

  explicit Parser(std::string_view src) : toks(lex(src)) {
    for (auto& t : toks)
      if (t.kind == Tok::Ident) all_idents.insert(t.text);
  }

  const Token& cur() const { return toks[pos]; }
  const Token& peek(size_t k) const {
    return toks[std::min(pos + k, toks.size() - 1)];
  }
  bool at(Tok k) const { return cur().kind == k; }
  bool accept(Tok k) {
    if (!at(k)) return false;
    ++pos;
    return true;
  }
  Token eat(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    return toks[pos++];
  }
  [[noreturn]] void fail(const std::string& msg) const {
    if (cur().kind == Tok::Eof)
      throw ParseError("unexpected end of input: " + msg, cur().span);
    throw ParseError(msg + ", found '" + cur().text + "'", cur().span);
  }

  Span span_from(uint32_t start) const {
    uint32_t end = pos > 0 ? toks[pos - 1].span.end : start;
    return Span{start, end};
  }

  std::string ident(const char* what) { return eat(Tok::Ident, what).text; }

  std::string fresh_chan(const std::string& base) {
    std::string name = base + "'";
    while (all_idents.count(name)) name += '\'';
    all_idents.insert(name);
    return name;
  }

  // -- arithmetic ----------------------------------------------------------

  Exp parse_factor() {
    if (at(Tok::Nat)) {
      uint64_t v = cur().nat;
      ++pos;
      return Exp::num(v);
    }
    if (at(Tok::Ident)) return Exp::var(ident("index variable"));
    if (accept(Tok::LParen)) {
      Exp e = parse_exp();
      eat(Tok::RParen, "')'");
      return e;
    }
    fail("expected arithmetic expression");
  }

  Exp parse_term() {
    Exp acc = parse_factor();
    while (accept(Tok::Star)) {
      Exp rhs = parse_factor();
      bool la = acc.kind() == Exp::Kind::Const;
      bool rb = rhs.kind() == Exp::Kind::Const;
      if (la && rb)
        acc = Exp::num(acc.value() * rhs.value());
      else if (la)
        acc = Exp::mul(acc.value(), rhs);
      else if (rb)
        acc = Exp::mul(rhs.value(), acc);
      else
        throw ParseError("nonlinear constraint: product of two variable expressions",
                         cur().span);
    }
    return acc;
  }

  Exp parse_exp() {
    Exp acc = parse_term();
    for (;;) {
      if (accept(Tok::Plus))
        acc = Exp::add(acc, parse_term());
      else if (accept(Tok::Minus))
        acc = Exp::sub(acc, parse_term());
      else
        return acc;
    }
  }

  // -- propositions --------------------------------------------------------

  bool arith_follows(size_t k) const {
    switch (peek(k).kind) {
      case Tok::Plus:
      case Tok::Minus:
      case Tok::Star:
      case Tok::Equal:
      case Tok::Gt:
      case Tok::Lt:
      case Tok::Ge:
      case Tok::Le: return true;
      default: return false;
    }
  }

  Prop parse_prop_primary() {
    if (accept(Tok::Tilde)) return Prop::neg(parse_prop_primary());
    if (at(Tok::Question) && peek(1).kind == Tok::Ident && peek(2).kind == Tok::Dot) {
      ++pos;
      std::string v = ident("index variable");
      eat(Tok::Dot, "'.'");
      return Prop::exists(v, parse_prop());
    }
    if (at(Tok::Bang) && peek(1).kind == Tok::Ident && peek(2).kind == Tok::Dot) {
      ++pos;
      std::string v = ident("index variable");
      eat(Tok::Dot, "'.'");
      return Prop::forall(v, parse_prop());
    }
    if (at(Tok::Ident) && (cur().text == "true" || cur().text == "false") &&
        !arith_follows(1)) {
      bool t = cur().text == "true";
      ++pos;
      return t ? Prop::top() : Prop::bot();
    }
    // Attempt a comparison atom, falling back to a parenthesized proposition.
    size_t save = pos;
    try {
      Exp a = parse_exp();
      if (accept(Tok::Equal)) return Prop::eq(a, parse_exp());
      if (accept(Tok::Gt)) return Prop::gt(a, parse_exp());
      if (accept(Tok::Lt)) return Prop::lt(a, parse_exp());
      if (accept(Tok::Ge)) return Prop::ge(a, parse_exp());
      if (accept(Tok::Le)) return Prop::le(a, parse_exp());
      fail("expected comparison operator");
    } catch (const ParseError&) {
      pos = save;
    }
    if (accept(Tok::LParen)) {
      Prop p = parse_prop();
      eat(Tok::RParen, "')'");
      return p;
    }
    fail("expected proposition");
  }

  Prop parse_prop_and() {
    Prop a = parse_prop_primary();
    while (accept(Tok::AndAnd)) a = Prop::conj(a, parse_prop_primary());
    return a;
  }

  Prop parse_prop() {
    Prop a = parse_prop_and();
    while (accept(Tok::OrOr)) a = Prop::disj(a, parse_prop_and());
    return a;
  }

  // -- types ---------------------------------------------------------------

  Type parse_type() {
    uint32_t start = cur().span.start;
    if (at(Tok::Question)) {
      if (peek(1).kind == Tok::LBrace) {
        pos += 2;
        Prop phi = parse_prop();
        eat(Tok::RBrace, "'}'");
        eat(Tok::Dot, "'.'");
        Type a = parse_type();
        return Type::assert_t(phi, a, span_from(start));
      }
      if (peek(1).kind == Tok::Ident && peek(2).kind == Tok::Dot) {
        ++pos;
        std::string v = ident("index variable");
        eat(Tok::Dot, "'.'");
        Type a = parse_type();
        return Type::exists_t(v, a, span_from(start));
      }
      fail("expected '{' or index variable after '?'");
    }
    if (at(Tok::Bang)) {
      if (peek(1).kind == Tok::LBrace) {
        pos += 2;
        Prop phi = parse_prop();
        eat(Tok::RBrace, "'}'");
        eat(Tok::Dot, "'.'");
        Type a = parse_type();
        return Type::assume_t(phi, a, span_from(start));
      }
      if (peek(1).kind == Tok::Ident && peek(2).kind == Tok::Dot) {
        ++pos;
        std::string v = ident("index variable");
        eat(Tok::Dot, "'.'");
        Type a = parse_type();
        return Type::forall_t(v, a, span_from(start));
      }
      fail("expected '{' or index variable after '!'");
    }
    if (at(Tok::Bar)) {  // |{r}> A
      ++pos;
      eat(Tok::LBrace, "'{'");
      Exp r = parse_exp();
      eat(Tok::RBrace, "'}'");
      eat(Tok::Gt, "'>'");
      Type a = parse_type();
      return Type::paypot(r, a, span_from(start));
    }
    if (at(Tok::Lt)) {  // <{r}| A
      ++pos;
      eat(Tok::LBrace, "'{'");
      Exp r = parse_exp();
      eat(Tok::RBrace, "'}'");
      eat(Tok::Bar, "'|'");
      Type a = parse_type();
      return Type::getpot(r, a, span_from(start));
    }
    return parse_type_lolli();
  }

  bool at_type_prefix() const {
    if (at(Tok::Bar) || at(Tok::Lt)) return true;
    if (at(Tok::Question) || at(Tok::Bang))
      return peek(1).kind == Tok::LBrace ||
             (peek(1).kind == Tok::Ident && peek(2).kind == Tok::Dot);
    return false;
  }

  Type parse_type_lolli() {
    uint32_t start = cur().span.start;
    Type a = parse_type_tensor();
    if (accept(Tok::Lolli)) {
      Type b = parse_type();
      return Type::lolli(a, b, span_from(start));
    }
    return a;
  }

  Type parse_type_tensor() {
    uint32_t start = cur().span.start;
    Type a = parse_type_atom();
    if (accept(Tok::Star)) {
      Type b = parse_type_tensor_rhs();
      return Type::tensor(a, b, span_from(start));
    }
    return a;
  }

  // The right operand of '*' admits prefixes but not '-o' without parens.
  Type parse_type_tensor_rhs() {
    uint32_t start = cur().span.start;
    if (at(Tok::Question) || at(Tok::Bang) || at(Tok::Bar) || at(Tok::Lt)) {
      if (at_type_prefix()) {
        // reuse the prefix logic, limiting the body to tensor level
        if (at(Tok::Question) && peek(1).kind == Tok::LBrace) {
          pos += 2;
          Prop phi = parse_prop();
          eat(Tok::RBrace, "'}'");
          eat(Tok::Dot, "'.'");
          return Type::assert_t(phi, parse_type_tensor_rhs(), span_from(start));
        }
        if (at(Tok::Question)) {
          ++pos;
          std::string v = ident("index variable");
          eat(Tok::Dot, "'.'");
          return Type::exists_t(v, parse_type_tensor_rhs(), span_from(start));
        }
        if (at(Tok::Bang) && peek(1).kind == Tok::LBrace) {
          pos += 2;
          Prop phi = parse_prop();
          eat(Tok::RBrace, "'}'");
          eat(Tok::Dot, "'.'");
          return Type::assume_t(phi, parse_type_tensor_rhs(), span_from(start));
        }
        if (at(Tok::Bang)) {
          ++pos;
          std::string v = ident("index variable");
          eat(Tok::Dot, "'.'");
          return Type::forall_t(v, parse_type_tensor_rhs(), span_from(start));
        }
        if (at(Tok::Bar)) {
          ++pos;
          eat(Tok::LBrace, "'{'");
          Exp r = parse_exp();
          eat(Tok::RBrace, "'}'");
          eat(Tok::Gt, "'>'");
          return Type::paypot(r, parse_type_tensor_rhs(), span_from(start));
        }
        ++pos;  // '<'
        eat(Tok::LBrace, "'{'");
        Exp r = parse_exp();
        eat(Tok::RBrace, "'}'");
        eat(Tok::Bar, "'|'");
        return Type::getpot(r, parse_type_tensor_rhs(), span_from(start));
      }
    }
    Type a = parse_type_atom();
    if (accept(Tok::Star)) {
      Type b = parse_type_tensor_rhs();
      return Type::tensor(a, b, span_from(start));
    }
    return a;
  }

  Type parse_type_atom() {
    uint32_t start = cur().span.start;
    if (at(Tok::Nat)) {
      if (cur().nat != 1) fail("the only numeric type is 1");
      ++pos;
      return Type::one(span_from(start));
    }
    if (accept(Tok::Plus)) {
      eat(Tok::LBrace, "'{'");
      auto bs = parse_type_branches();
      eat(Tok::RBrace, "'}'");
      return Type::ichoice(std::move(bs), span_from(start));
    }
    if (accept(Tok::Amp)) {
      eat(Tok::LBrace, "'{'");
      auto bs = parse_type_branches();
      eat(Tok::RBrace, "'}'");
      return Type::echoice(std::move(bs), span_from(start));
    }
    if (accept(Tok::LParen)) {
      Type t = parse_type();
      eat(Tok::RParen, "')'");
      return t;
    }
    if (at(Tok::Ident)) {
      std::string id = ident("type name");
      std::vector<Exp> args;
      while (at(Tok::LBrace)) {
        ++pos;
        args.push_back(parse_exp());
        eat(Tok::RBrace, "'}'");
      }
      return Type::name(id, std::move(args), span_from(start));
    }
    fail("expected session type");
  }

  std::vector<std::pair<std::string, Type>> parse_type_branches() {
    std::vector<std::pair<std::string, Type>> bs;
    for (;;) {
      std::string label = ident("branch label");
      eat(Tok::Colon, "':'");
      bs.emplace_back(std::move(label), parse_type());
      if (!accept(Tok::Comma)) break;
    }
    return bs;
  }

  // -- processes -----------------------------------------------------------

  Process parse_process() {
    uint32_t start = cur().span.start;
    switch (cur().kind) {
      case Tok::KwCase: {
        ++pos;
        std::string x = ident("channel");
        Span head = span_from(start);
        eat(Tok::LParen, "'('");
        std::vector<std::pair<std::string, Process>> bs;
        for (;;) {
          std::string label = ident("branch label");
          eat(Tok::DArrow, "'=>'");
          bs.emplace_back(std::move(label), parse_process());
          if (!accept(Tok::Bar)) break;
        }
        eat(Tok::RParen, "')'");
        return Process::case_of(x, std::move(bs), head);
      }
      case Tok::KwSend: {
        ++pos;
        std::string x = ident("channel");
        if (accept(Tok::LBrace)) {
          Exp e = parse_exp();
          eat(Tok::RBrace, "'}'");
          Span sp = span_from(start);
          eat(Tok::Semi, "';'");
          return Process::send_idx(x, e, parse_process(), sp);
        }
        std::string w = ident("channel");
        Span sp = span_from(start);
        eat(Tok::Semi, "';'");
        return Process::send_chan(x, w, parse_process(), sp);
      }
      case Tok::KwClose: {
        ++pos;
        std::string x = ident("channel");
        return Process::close(x, span_from(start));
      }
      case Tok::KwWait: {
        ++pos;
        std::string x = ident("channel");
        Span sp = span_from(start);
        eat(Tok::Semi, "';'");
        return Process::wait(x, parse_process(), sp);
      }
      case Tok::KwAssert:
      case Tok::KwAssume: {
        bool is_assert = cur().kind == Tok::KwAssert;
        ++pos;
        std::string x = ident("channel");
        eat(Tok::LBrace, "'{'");
        Prop phi = parse_prop();
        eat(Tok::RBrace, "'}'");
        Span sp = span_from(start);
        eat(Tok::Semi, "';'");
        Process cont = parse_process();
        return is_assert ? Process::assert_p(x, phi, cont, sp)
                         : Process::assume_p(x, phi, cont, sp);
      }
      case Tok::KwPay:
      case Tok::KwGet: {
        bool is_pay = cur().kind == Tok::KwPay;
        ++pos;
        std::string x = ident("channel");
        eat(Tok::LBrace, "'{'");
        Exp r = parse_exp();
        eat(Tok::RBrace, "'}'");
        Span sp = span_from(start);
        eat(Tok::Semi, "';'");
        Process cont = parse_process();
        return is_pay ? Process::pay(x, r, cont, sp) : Process::get(x, r, cont, sp);
      }
      case Tok::KwWork: {
        ++pos;
        Exp r = Exp::num(1);
        if (accept(Tok::LBrace)) {
          r = parse_exp();
          eat(Tok::RBrace, "'}'");
        }
        Span sp = span_from(start);
        eat(Tok::Semi, "';'");
        return Process::work(r, parse_process(), sp);
      }
      case Tok::KwImpossible: {
        ++pos;
        return Process::impossible(span_from(start));
      }
      case Tok::LBrace: {  // {n} <- recv x
        ++pos;
        std::string n = ident("index variable");
        eat(Tok::RBrace, "'}'");
        eat(Tok::LArrow, "'<-'");
        eat(Tok::KwRecv, "'recv'");
        std::string x = ident("channel");
        Span sp = span_from(start);
        eat(Tok::Semi, "';'");
        return Process::recv_idx(x, n, parse_process(), sp);
      }
      case Tok::Ident: {
        std::string x = ident("channel");
        if (accept(Tok::Dot)) {
          std::string k = ident("label");
          Span sp = span_from(start);
          eat(Tok::Semi, "';'");
          return Process::send_label(x, k, parse_process(), sp);
        }
        eat(Tok::LArrow, "'<-'");
        if (accept(Tok::KwRecv)) {
          std::string src = ident("channel");
          Span sp = span_from(start);
          eat(Tok::Semi, "';'");
          return Process::recv_chan(src, x, parse_process(), sp);
        }
        std::string f = ident("process or channel name");
        std::vector<Exp> idx;
        while (at(Tok::LBrace)) {
          ++pos;
          idx.push_back(parse_exp());
          eat(Tok::RBrace, "'}'");
        }
        if (accept(Tok::LArrow)) {
          std::vector<std::string> args;
          while (at(Tok::Ident)) args.push_back(ident("channel"));
          Span sp = span_from(start);
          if (accept(Tok::Semi))
            return Process::spawn(x, f, std::move(idx), std::move(args), parse_process(), sp);
          // Tail call: spawn a fresh channel and forward to it.
          std::string fx = fresh_chan(x);
          return Process::spawn(fx, f, std::move(idx), std::move(args),
                                Process::fwd(x, fx, sp), sp);
        }
        if (!idx.empty()) fail("index arguments are only allowed on process calls");
        return Process::fwd(x, f, span_from(start));
      }
      default: fail("expected process expression");
    }
  }

  // -- top level -----------------------------------------------------------

  void parse_typedef(Signature& sig) {
    uint32_t start = cur().span.start;
    eat(Tok::KwType, "'type'");
    std::string name = ident("type name");
    std::vector<std::string> params;
    while (at(Tok::LBrace)) {
      ++pos;
      params.push_back(ident("index parameter"));
      eat(Tok::RBrace, "'}'");
    }
    eat(Tok::Equal, "'='");
    Type body = parse_type();
    sig.types.push_back(TypeDef{name, std::move(params), body, span_from(start), false});
  }

  void parse_decl(Signature& sig) {
    uint32_t start = cur().span.start;
    eat(Tok::KwDecl, "'decl'");
    std::string name = ident("process name");
    std::vector<std::string> params;
    Prop constraint = Prop::top();
    while (at(Tok::LBrace)) {
      ++pos;
      params.push_back(ident("index parameter"));
      if (accept(Tok::Bar)) constraint = Prop::conj(constraint, parse_prop());
      eat(Tok::RBrace, "'}'");
    }
    eat(Tok::Colon, "':'");
    std::vector<std::pair<std::string, Type>> channels;
    if (!accept(Tok::Dot)) {
      while (at(Tok::LParen)) {
        ++pos;
        std::string c = ident("channel");
        eat(Tok::Colon, "':'");
        Type ty = parse_type();
        eat(Tok::RParen, "')'");
        channels.emplace_back(std::move(c), ty);
      }
      if (channels.empty()) fail("expected '.' or '(channel : type)' context");
    }
    eat(Tok::Bar, "'|'");
    Exp pot = Exp::num(0);
    if (accept(Tok::LBrace)) {
      pot = parse_exp();
      eat(Tok::RBrace, "'}'");
    }
    eat(Tok::Minus, "'-'");
    eat(Tok::LParen, "'('");
    std::string oc = ident("channel");
    eat(Tok::Colon, "':'");
    Type offered = parse_type();
    eat(Tok::RParen, "')'");
    sig.decls.push_back(ProcDecl{name, std::move(params), constraint, std::move(channels),
                                 pot, std::move(oc), offered, span_from(start)});
  }

  void parse_procdef(Signature& sig) {
    uint32_t start = cur().span.start;
    eat(Tok::KwProc, "'proc'");
    std::string oc = ident("channel");
    eat(Tok::LArrow, "'<-'");
    std::string name = ident("process name");
    std::vector<std::string> params;
    while (at(Tok::LBrace)) {
      ++pos;
      params.push_back(ident("index parameter"));
      eat(Tok::RBrace, "'}'");
    }
    eat(Tok::LArrow, "'<-'");
    std::vector<std::string> chans;
    while (at(Tok::Ident)) chans.push_back(ident("channel"));
    eat(Tok::Equal, "'='");
    Process body = parse_process();
    Span sp = span_from(start);
    // The definition restates its declaration's index parameters.
    const ProcDecl* d = nullptr;
    for (auto& dd : sig.decls)
      if (dd.name == name) d = &dd;
    if (d && d->params != params)
      throw ParseError("definition of " + name +
                           " must repeat the declaration's index parameters",
                       sp);
    sig.defs.push_back(ProcDef{name, oc, std::move(chans), body, sp});
  }

  Signature parse_signature() {
    Signature sig;
    while (!at(Tok::Eof)) {
      switch (cur().kind) {
        case Tok::KwType: parse_typedef(sig); break;
        case Tok::KwDecl: parse_decl(sig); break;
        case Tok::KwProc: parse_procdef(sig); break;
        default: fail("expected 'type', 'decl', or 'proc'");
      }
    }
    return sig;
  }
};

}  // namespace

Signature parse_signature(std::string_view source) {
  Parser p(source);
  return p.parse_signature();
}

Type parse_type_expr(std::string_view source) {
  Parser p(source);
  Type t = p.parse_type();
  if (!p.at(Tok::Eof)) p.fail("trailing input after type");
  return t;
}

Prop parse_prop_expr(std::string_view source) {
  Parser p(source);
  Prop q = p.parse_prop();
  if (!p.at(Tok::Eof)) p.fail("trailing input after proposition");
  return q;
}

}  // namespace ergo
