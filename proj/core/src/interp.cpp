#include "ergo/interp.hpp"

#include <algorithm>

namespace ergo {

namespace {

Env no_env;

// Unfolds the tracked channel type to its next constructor.
Type head_type(const Signature& sig, const Configuration& cfg, const std::string& c) {
  auto it = cfg.chan_types.find(c);
  if (it == cfg.chan_types.end())
    throw std::logic_error("interp: no tracked type for channel " + c);
  return unfold(sig, it->second);
}

std::string render_msg(const Msg& m, const std::string& display) {
  switch (m.payload) {
    case Msg::Payload::Label: return display + "." + m.label;
    case Msg::Payload::Channel: return "send " + display + " " + m.chan;
    case Msg::Payload::Close: return "close " + display;
    case Msg::Payload::Index: return "send " + display + " {" + std::to_string(m.index) + "}";
    case Msg::Payload::Assert: return "assert " + display + " {" + show(m.prop) + "}";
    case Msg::Payload::Pay: return "pay " + display + " {" + std::to_string(m.amount) + "}";
  }
  return "?";
}

// The process form of a message, for configuration typing.
Process msg_process(const Msg& m) {
  switch (m.payload) {
    case Msg::Payload::Label: {
      Process f = m.from_provider ? Process::fwd(m.on, m.cont) : Process::fwd(m.cont, m.on);
      return Process::send_label(m.on, m.label, std::move(f));
    }
    case Msg::Payload::Channel: {
      Process f = m.from_provider ? Process::fwd(m.on, m.cont) : Process::fwd(m.cont, m.on);
      return Process::send_chan(m.on, m.chan, std::move(f));
    }
    case Msg::Payload::Close: return Process::close(m.on);
    case Msg::Payload::Index: {
      Process f = m.from_provider ? Process::fwd(m.on, m.cont) : Process::fwd(m.cont, m.on);
      return Process::send_idx(m.on, Exp::num(m.index), std::move(f));
    }
    case Msg::Payload::Assert: {
      Process f = m.from_provider ? Process::fwd(m.on, m.cont) : Process::fwd(m.cont, m.on);
      return Process::assert_p(m.on, m.prop, std::move(f));
    }
    case Msg::Payload::Pay: {
      Process f = m.from_provider ? Process::fwd(m.on, m.cont) : Process::fwd(m.cont, m.on);
      return Process::pay(m.on, Exp::num(m.amount), std::move(f));
    }
  }
  throw std::logic_error("msg_process: bad payload");
}

struct Stepper {
  Configuration& cfg;
  const Signature& sig;

  SemObject* find_msg(bool from_provider, const std::string& on) {
    for (auto& o : cfg.objects)
      if (o.is_msg && o.msg.from_provider == from_provider && o.msg.on == on) return &o;
    return nullptr;
  }

  void remove_object(const SemObject* o) {
    for (auto it = cfg.objects.begin(); it != cfg.objects.end(); ++it) {
      if (&*it == o) {
        cfg.objects.erase(it);
        return;
      }
    }
  }

  uint64_t eval_closed(const Exp& e) { return eval_exp(e, no_env); }

  // Sends never block; receives need a matching message.
  bool firable(const SemObject& o) {
    if (o.is_msg) return false;
    const Process& p = o.body;
    switch (p.kind()) {
      case Process::Kind::Fwd:
        return find_msg(true, p.chan2()) != nullptr || find_msg(false, p.chan()) != nullptr;
      case Process::Kind::Case:
        return find_msg(p.chan() != o.provides, p.chan()) != nullptr;
      case Process::Kind::RecvChan:
      case Process::Kind::RecvIdx:
      case Process::Kind::AssumeP:
      case Process::Kind::Get:
      case Process::Kind::Wait:
        return find_msg(p.chan() != o.provides, p.chan()) != nullptr;
      default: return true;  // sends, spawn, work, impossible
    }
  }

  // Executes the head rule of `o`; assumes firable.
  StepResult fire(SemObject& o) {
    const Process p = o.body;
    switch (p.kind()) {
      case Process::Kind::Spawn: return fire_spawn(o, p);
      case Process::Kind::Work: {
        uint64_t r = eval_closed(p.exp());
        if (o.potential < r)
          return {StepResult::Kind::Stuck, "work", "potential counter would go negative", {}};
        o.potential -= r;
        o.work += r;
        o.body = p.cont();
        return {StepResult::Kind::Stepped, "work", "", {o.provides}};
      }
      case Process::Kind::Impossible:
        return {StepResult::Kind::Stuck, "unsat", "impossible reached", {}};
      case Process::Kind::Fwd: return fire_fwd(o, p);
      case Process::Kind::SendLabel:
      case Process::Kind::SendChan:
      case Process::Kind::Close:
      case Process::Kind::SendIdx:
      case Process::Kind::AssertP:
      case Process::Kind::Pay: return fire_send(o, p);
      case Process::Kind::Case:
      case Process::Kind::RecvChan:
      case Process::Kind::RecvIdx:
      case Process::Kind::AssumeP:
      case Process::Kind::Get:
      case Process::Kind::Wait: return fire_recv(o, p);
    }
    throw std::logic_error("fire: bad kind");
  }

  StepResult fire_spawn(SemObject& o, const Process& p) {
    const ProcDecl* d = sig.find_decl(p.callee());
    const ProcDef* f = sig.find_def(p.callee());
    if (!d || !f)
      return {StepResult::Kind::Stuck, "defC", "unknown process " + p.callee(), {}};
    Subst inst;
    Env env;
    for (size_t i = 0; i < d->params.size(); ++i) {
      uint64_t v = eval_closed(p.idx_args()[i]);
      inst[d->params[i]] = Exp::num(v);
      env[d->params[i]] = v;
    }
    if (cfg.debug_checks && d->constraint.kind() != Prop::Kind::Top &&
        !eval_prop(d->constraint, env))
      return {StepResult::Kind::Stuck, "defC",
              "declaration constraint of " + p.callee() + " violated", {}};
    uint64_t need = eval_exp(d->potential, env);
    if (o.potential < need)
      return {StepResult::Kind::Stuck, "defC", "potential counter would go negative", {}};
    std::string a = cfg.fresh_chan();
    Process body = f->body;
    body = rename_chan(body, f->offered_chan, a);
    // Simultaneous renaming of formals to actuals: go through fresh
    // temporaries so an actual that collides with a later formal is safe.
    std::vector<std::string> temps;
    for (size_t i = 0; i < f->channel_names.size(); ++i) {
      temps.push_back(cfg.fresh_chan());
      body = rename_chan(body, f->channel_names[i], temps.back());
    }
    for (size_t i = 0; i < temps.size(); ++i)
      body = rename_chan(body, temps[i], p.chan_args()[i]);
    body = subst_idx(body, inst);
    o.potential -= need;
    o.body = rename_chan(p.cont(), p.chan(), a);
    cfg.chan_types[a] = subst_idx(d->offered, inst);
    SemObject child;
    child.provides = a;
    child.work = 0;
    child.potential = need;
    child.body = std::move(body);
    child.seq = cfg.seq_counter++;
    cfg.objects.push_back(std::move(child));
    return {StepResult::Kind::Stepped, "defC", "", {a}};
  }

  StepResult fire_fwd(SemObject& o, const Process& p) {
    // id+C: a provider message on the forwarded-from channel re-addresses.
    if (SemObject* m = find_msg(true, p.chan2())) {
      m->msg.on = p.chan();
      if (m->provides == p.chan2()) m->provides = p.chan();
      m->body = rename_chan(m->body, p.chan2(), p.chan());
      m->work += o.work;
      m->potential += o.potential;
      cfg.chan_types.erase(p.chan2());
      remove_object(&o);
      return {StepResult::Kind::Stepped, "id+C", "", {p.chan(), p.chan2()}};
    }
    // id-C: a client message addressed to the offered channel re-addresses.
    if (SemObject* m = find_msg(false, p.chan())) {
      m->msg.on = p.chan2();
      m->body = rename_chan(m->body, p.chan(), p.chan2());
      m->work += o.work;
      m->potential += o.potential;
      cfg.chan_types.erase(p.chan());
      remove_object(&o);
      return {StepResult::Kind::Stepped, "id-C", "", {p.chan(), p.chan2()}};
    }
    throw std::logic_error("fire_fwd: not firable");
  }

  StepResult fire_send(SemObject& o, const Process& p) {
    bool provider = p.chan() == o.provides;
    const std::string ch = p.chan();
    Type t = head_type(sig, cfg, ch);

    if (p.kind() == Process::Kind::Close) {
      // Leftover potential rides the close message so the energy invariant
      // holds; type_config flags the object since 1R demands zero.
      Msg m;
      m.payload = Msg::Payload::Close;
      m.on = ch;
      o.is_msg = true;
      o.msg = std::move(m);
      o.body = msg_process(o.msg);
      return {StepResult::Kind::Stepped, "1S", "", {ch}};
    }

    std::string c2 = cfg.fresh_chan();
    Msg m;
    m.from_provider = provider;
    m.on = ch;
    m.cont = c2;
    Type cont_type;
    std::string rule;
    switch (p.kind()) {
      case Process::Kind::SendLabel: {
        m.payload = Msg::Payload::Label;
        m.label = p.label();
        const Type* b = t.find_branch(p.label());
        if (!b) return {StepResult::Kind::Stuck, "+S", "label not in tracked type", {}};
        cont_type = *b;
        rule = provider ? "+S" : "&S";
        break;
      }
      case Process::Kind::SendChan: {
        m.payload = Msg::Payload::Channel;
        m.chan = p.chan2();
        cont_type = t.right();
        rule = provider ? "*S" : "-oS";
        break;
      }
      case Process::Kind::SendIdx: {
        m.payload = Msg::Payload::Index;
        m.index = eval_closed(p.exp());
        cont_type = subst_idx(t.cont(), Subst{{t.bound_var(), Exp::num(m.index)}});
        rule = provider ? "?nS" : "!nS";
        break;
      }
      case Process::Kind::AssertP: {
        m.payload = Msg::Payload::Assert;
        m.prop = p.prop();
        if (cfg.debug_checks && !eval_prop(p.prop()))
          return {StepResult::Kind::Stuck, "?S", "assertion evaluates to false: " +
                                                     show(p.prop()), {}};
        cont_type = t.cont();
        rule = provider ? "?S" : "!S";
        break;
      }
      case Process::Kind::Pay: {
        m.payload = Msg::Payload::Pay;
        m.amount = eval_closed(p.exp());
        if (o.potential < m.amount)
          return {StepResult::Kind::Stuck, ">S", "potential counter would go negative", {}};
        cont_type = t.cont();
        rule = provider ? ">S" : "<S";
        break;
      }
      default: throw std::logic_error("fire_send: bad kind");
    }

    SemObject mo;
    mo.is_msg = true;
    mo.provides = provider ? ch : c2;
    mo.msg = std::move(m);
    if (mo.msg.payload == Msg::Payload::Pay) {
      mo.potential = mo.msg.amount;
      o.potential -= mo.msg.amount;
    }
    mo.body = msg_process(mo.msg);
    mo.seq = cfg.seq_counter++;

    cfg.chan_types[c2] = cont_type;
    o.body = rename_chan(p.cont(), ch, c2);
    if (provider) o.provides = c2;

    cfg.objects.push_back(std::move(mo));
    return {StepResult::Kind::Stepped, rule, "", {ch, c2}};
  }

  StepResult fire_recv(SemObject& o, const Process& p) {
    bool provider_side = p.chan() == o.provides;
    SemObject* m = find_msg(!provider_side, p.chan());
    if (!m) throw std::logic_error("fire_recv: not firable");
    const Msg msg = m->msg;
    std::string rule;
    Process cont;
    switch (p.kind()) {
      case Process::Kind::Case: {
        if (msg.payload != Msg::Payload::Label)
          return {StepResult::Kind::Stuck, "+C", "message mismatch on " + p.chan(), {}};
        const Process* b = nullptr;
        for (auto& [l, body] : p.branches())
          if (l == msg.label) b = &body;
        if (!b)
          return {StepResult::Kind::Stuck, "+C", "no branch for label " + msg.label, {}};
        cont = *b;
        rule = provider_side ? "&C" : "+C";
        break;
      }
      case Process::Kind::RecvChan: {
        if (msg.payload != Msg::Payload::Channel)
          return {StepResult::Kind::Stuck, "*C", "message mismatch on " + p.chan(), {}};
        cont = rename_chan(p.cont(), p.chan2(), msg.chan);
        rule = provider_side ? "-oC" : "*C";
        break;
      }
      case Process::Kind::RecvIdx: {
        if (msg.payload != Msg::Payload::Index)
          return {StepResult::Kind::Stuck, "?nC", "message mismatch on " + p.chan(), {}};
        cont = subst_idx(p.cont(), Subst{{p.chan2(), Exp::num(msg.index)}});
        rule = provider_side ? "!nC" : "?nC";
        break;
      }
      case Process::Kind::AssumeP: {
        if (msg.payload != Msg::Payload::Assert)
          return {StepResult::Kind::Stuck, "?C", "message mismatch on " + p.chan(), {}};
        if (cfg.debug_checks && !eval_prop(p.prop()))
          return {StepResult::Kind::Stuck, "?C",
                  "assumption evaluates to false: " + show(p.prop()), {}};
        cont = p.cont();
        rule = provider_side ? "!C" : "?C";
        break;
      }
      case Process::Kind::Get: {
        if (msg.payload != Msg::Payload::Pay)
          return {StepResult::Kind::Stuck, "<C", "message mismatch on " + p.chan(), {}};
        cont = p.cont();
        rule = provider_side ? "<C" : ">C";
        break;
      }
      case Process::Kind::Wait: {
        if (msg.payload != Msg::Payload::Close)
          return {StepResult::Kind::Stuck, "1C", "message mismatch on " + p.chan(), {}};
        cont = p.cont();
        rule = "1C";
        break;
      }
      default: throw std::logic_error("fire_recv: bad kind");
    }
    o.work += m->work;
    o.potential += m->potential;
    if (msg.payload != Msg::Payload::Close) {
      cont = rename_chan(cont, p.chan(), msg.cont);
      if (provider_side) o.provides = msg.cont;
    }
    cfg.chan_types.erase(p.chan());
    o.body = std::move(cont);
    remove_object(m);
    return {StepResult::Kind::Stepped, rule, "", {p.chan()}};
  }
};

}  // namespace

uint64_t Configuration::total_work() const {
  uint64_t w = observed_work;
  for (auto& o : objects) w += o.work;
  return w;
}

uint64_t Configuration::total_potential() const {
  uint64_t p = observed_potential;
  for (auto& o : objects) p += o.potential;
  return p;
}

std::string Configuration::fresh_chan() {
  return "#" + std::to_string(fresh_counter++);
}

Configuration spawn_config(const Signature& sig, const std::string& proc,
                           const std::vector<uint64_t>& idx_args) {
  const ProcDecl* d = sig.find_decl(proc);
  const ProcDef* f = sig.find_def(proc);
  if (!d || !f) throw InterpError("UnknownName", "unknown process " + proc);
  if (!d->channels.empty())
    throw InterpError("NonEmptyContext",
                      "process " + proc + " uses channels and cannot be a root");
  if (d->params.size() != idx_args.size())
    throw InterpError("UnknownName", "process " + proc + " expects " +
                                         std::to_string(d->params.size()) + " indices");
  Subst inst;
  Env env;
  for (size_t i = 0; i < d->params.size(); ++i) {
    inst[d->params[i]] = Exp::num(idx_args[i]);
    env[d->params[i]] = idx_args[i];
  }
  if (d->constraint.kind() != Prop::Kind::Top && !eval_prop(d->constraint, env))
    throw InterpError("ConstraintUnsatisfied",
                      "declaration constraint of " + proc + " violated");

  Configuration cfg;
  cfg.sig = std::make_shared<Signature>(sig);
  cfg.sig_elab = std::make_shared<Signature>(elaborate_internal_names(sig));
  std::string root = cfg.fresh_chan();
  cfg.external = root;
  cfg.external_name = d->offered_chan;
  cfg.chan_types[root] = subst_idx(d->offered, inst);

  SemObject obj;
  obj.provides = root;
  obj.work = 0;
  obj.potential = eval_exp(d->potential, env);
  obj.body = subst_idx(rename_chan(f->body, f->offered_chan, root), inst);
  obj.seq = cfg.seq_counter++;
  cfg.objects.push_back(std::move(obj));
  return cfg;
}

StepResult step(Configuration& cfg) {
  Stepper st{cfg, *cfg.sig};
  for (auto& o : cfg.objects) {
    if (!st.firable(o)) continue;
    return st.fire(o);
  }
  return {StepResult::Kind::Poised, "", "", {}};
}

RunResult run(Configuration& cfg, uint64_t budget) {
  RunResult r;
  uint64_t invariant = cfg.total_work() + cfg.total_potential();
  auto drain_external = [&]() {
    for (;;) {
      bool progressed = false;
      for (auto it = cfg.objects.begin(); it != cfg.objects.end(); ++it) {
        if (!it->is_msg || !it->msg.from_provider || it->msg.on != cfg.external) continue;
        // Constraint and potential messages are conceptual; only real
        // communication shows up in the observable trace.
        if (it->msg.payload != Msg::Payload::Assert &&
            it->msg.payload != Msg::Payload::Pay)
          cfg.trace.push_back(render_msg(it->msg, cfg.external_name));
        cfg.observed_work += it->work;
        cfg.observed_potential += it->potential;
        cfg.chan_types.erase(cfg.external);
        cfg.external = it->msg.cont;  // empty after close
        cfg.objects.erase(it);
        progressed = true;
        break;
      }
      if (!progressed) return;
    }
  };

  for (;;) {
    drain_external();
    if (r.steps >= budget) {
      r.budget_exhausted = true;
      break;
    }
    StepResult sr = step(cfg);
    if (sr.kind == StepResult::Kind::Poised) {
      r.outcome = StepResult::Kind::Poised;
      break;
    }
    if (sr.kind == StepResult::Kind::Stuck) {
      r.outcome = StepResult::Kind::Stuck;
      r.detail = sr.rule + ": " + sr.detail;
      break;
    }
    ++r.steps;
    uint64_t now = cfg.total_work() + cfg.total_potential();
    if (now != invariant)
      throw std::logic_error("energy conservation violated: " + std::to_string(invariant) +
                             " -> " + std::to_string(now));
  }
  drain_external();
  r.work = cfg.total_work();
  r.potential = cfg.total_potential();
  r.trace = cfg.trace;
  return r;
}

std::optional<ConfigTypeError> type_config(const Configuration& cfg) {
  for (auto& o : cfg.objects) {
    auto it = cfg.chan_types.find(o.provides);
    if (it == cfg.chan_types.end())
      return ConfigTypeError{o.provides,
                             CheckError{ErrCat::UnknownName, {},
                                        "no tracked type for " + o.provides}};
    Sequent seq;
    seq.constraint = Prop::top();
    std::vector<std::string> used;
    o.body.free_chans(used);
    for (auto& c : used) {
      if (c == o.provides) continue;
      auto ct = cfg.chan_types.find(c);
      if (ct == cfg.chan_types.end())
        return ConfigTypeError{o.provides,
                               CheckError{ErrCat::UnknownName, {},
                                          "no tracked type for " + c}};
      seq.delta.emplace_back(c, ct->second);
    }
    seq.potential = Exp::num(o.potential);
    seq.offered_chan = o.provides;
    seq.offered = it->second;
    if (auto err = check_process(*cfg.sig_elab, std::move(seq), o.body))
      return ConfigTypeError{o.provides, *err};
  }
  return std::nullopt;
}

}  // namespace ergo
