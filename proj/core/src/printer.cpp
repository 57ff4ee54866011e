#include "ergo/parser.hpp"

namespace ergo {

namespace {

// Levels mirror the grammar: 0 full, 1 lolli-lhs (no prefix/lolli),
// 2 tensor-rhs (no lolli), 3 atom positions.
struct TypePrinter {
  const Signature* sig;

  void print(const Type& t, int level, std::string& out) {
    switch (t.kind()) {
      case Type::Kind::Assert:
      case Type::Kind::Assume:
      case Type::Kind::Exists:
      case Type::Kind::Forall:
      case Type::Kind::PayPot:
      case Type::Kind::GetPot: {
        bool paren = !(level == 0 || level == 2);
        if (paren) out += '(';
        int body_level = level == 2 && !paren ? 2 : 0;
        switch (t.kind()) {
          case Type::Kind::Assert:
            out += "?{" + show(t.prop()) + "}. ";
            break;
          case Type::Kind::Assume:
            out += "!{" + show(t.prop()) + "}. ";
            break;
          case Type::Kind::Exists:
            out += "?" + t.bound_var() + ". ";
            break;
          case Type::Kind::Forall:
            out += "!" + t.bound_var() + ". ";
            break;
          case Type::Kind::PayPot:
            out += "|{" + show(t.potential()) + "}> ";
            break;
          default:
            out += "<{" + show(t.potential()) + "}| ";
            break;
        }
        print(t.cont(), body_level, out);
        if (paren) out += ')';
        return;
      }
      case Type::Kind::Lolli: {
        bool paren = level > 0;
        if (paren) out += '(';
        print(t.left(), 1, out);
        out += " -o ";
        print(t.right(), 0, out);
        if (paren) out += ')';
        return;
      }
      case Type::Kind::Tensor: {
        bool paren = level > 2;
        if (paren) out += '(';
        print(t.left(), 3, out);
        out += " * ";
        print(t.right(), 2, out);
        if (paren) out += ')';
        return;
      }
      case Type::Kind::One: out += '1'; return;
      case Type::Kind::IChoice:
      case Type::Kind::EChoice: {
        out += t.kind() == Type::Kind::IChoice ? "+{" : "&{";
        bool first = true;
        for (auto& [l, b] : t.branches()) {
          if (!first) out += ", ";
          first = false;
          out += l + " : ";
          print(b, 0, out);
        }
        out += '}';
        return;
      }
      case Type::Kind::Name: {
        if (sig) {
          const TypeDef* def = sig->find_type(t.id());
          if (def && def->generated) {
            // Internal names display as the source form they stand for.
            print(unfold(*sig, t), level, out);
            return;
          }
        }
        out += t.id();
        for (auto& e : t.args()) out += "{" + show(e) + "}";
        return;
      }
    }
  }
};

std::string pad(int n) { return std::string(static_cast<size_t>(n), ' '); }

std::string stmt_head(const Process& p) {
  switch (p.kind()) {
    case Process::Kind::Fwd: return p.chan() + " <- " + p.chan2();
    case Process::Kind::Spawn: {
      std::string s = p.chan() + " <- " + p.callee();
      for (auto& e : p.idx_args()) s += "{" + show(e) + "}";
      s += " <-";
      for (auto& c : p.chan_args()) s += " " + c;
      return s;
    }
    case Process::Kind::SendLabel: return p.chan() + "." + p.label();
    case Process::Kind::SendChan: return "send " + p.chan() + " " + p.chan2();
    case Process::Kind::RecvChan: return p.chan2() + " <- recv " + p.chan();
    case Process::Kind::Close: return "close " + p.chan();
    case Process::Kind::Wait: return "wait " + p.chan();
    case Process::Kind::SendIdx: return "send " + p.chan() + " {" + show(p.exp()) + "}";
    case Process::Kind::RecvIdx: return "{" + p.chan2() + "} <- recv " + p.chan();
    case Process::Kind::AssertP: return "assert " + p.chan() + " {" + show(p.prop()) + "}";
    case Process::Kind::AssumeP: return "assume " + p.chan() + " {" + show(p.prop()) + "}";
    case Process::Kind::Pay: return "pay " + p.chan() + " {" + show(p.exp()) + "}";
    case Process::Kind::Get: return "get " + p.chan() + " {" + show(p.exp()) + "}";
    case Process::Kind::Work: {
      const Exp& r = p.exp();
      if (r.kind() == Exp::Kind::Const && r.value() == 1) return "work";
      return "work {" + show(r) + "}";
    }
    case Process::Kind::Impossible: return "impossible";
    case Process::Kind::Case: return "case " + p.chan();
  }
  return "?";
}

void emit_process(const Process& p, int ind, std::string& out) {
  if (p.kind() == Process::Kind::Case) {
    out += pad(ind) + stmt_head(p) + "\n";
    bool first = true;
    for (auto& [l, b] : p.branches()) {
      out += pad(ind) + (first ? "( " : "| ") + l + " =>\n";
      first = false;
      emit_process(b, ind + 4, out);
    }
    out += pad(ind) + ")\n";
    return;
  }
  bool terminal = p.kind() == Process::Kind::Fwd || p.kind() == Process::Kind::Close ||
                  p.kind() == Process::Kind::Impossible;
  if (terminal) {
    out += pad(ind) + stmt_head(p) + "\n";
    return;
  }
  out += pad(ind) + stmt_head(p) + " ;\n";
  emit_process(p.cont(), ind, out);
}

}  // namespace

std::string show_type(const Type& t, const Signature* sig) {
  TypePrinter tp{sig};
  std::string out;
  tp.print(t, 0, out);
  return out;
}

std::string show_process(const Process& p, int indent) {
  std::string out;
  emit_process(p, indent, out);
  return out;
}

std::string render_signature(const Signature& sig) {
  std::string out;
  for (auto& td : sig.types) {
    if (td.generated) continue;
    out += "type " + td.name;
    for (auto& p : td.params) out += "{" + p + "}";
    out += " = " + show_type(td.body, &sig) + "\n\n";
  }
  for (auto& d : sig.decls) {
    out += "decl " + d.name;
    for (size_t i = 0; i < d.params.size(); ++i) {
      out += "{" + d.params[i];
      if (i + 1 == d.params.size() && d.constraint.kind() != Prop::Kind::Top)
        out += "|" + show(d.constraint);
      out += "}";
    }
    out += " : ";
    if (d.channels.empty()) {
      out += ". ";
    } else {
      for (auto& [c, t] : d.channels) out += "(" + c + " : " + show_type(t, &sig) + ") ";
    }
    bool zero = d.potential.kind() == Exp::Kind::Const && d.potential.value() == 0;
    out += zero ? "|- " : "|{" + show(d.potential) + "}- ";
    out += "(" + d.offered_chan + " : " + show_type(d.offered, &sig) + ")\n";
    const ProcDef* def = sig.find_def(d.name);
    if (def) {
      out += "proc " + def->offered_chan + " <- " + def->name;
      for (auto& p : d.params) out += "{" + p + "}";
      out += " <-";
      for (auto& c : def->channel_names) out += " " + c;
      out += " =\n";
      out += show_process(def->body, 2);
    }
    out += "\n";
  }
  return out;
}

}  // namespace ergo
