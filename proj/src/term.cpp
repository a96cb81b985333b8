#include "ldmu/term.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace ldmu {

namespace {

size_t mix(size_t seed, size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

size_t type_hash(const Type& t) { return std::hash<std::string>{}(t.str()); }

}  // namespace

Term Term::make(Node n) {
  size_t h = static_cast<size_t>(n.kind) * 31;
  switch (n.kind) {
    case Kind::kVar:
    case Kind::kConst:
      h = mix(h, std::hash<std::string>{}(n.name));
      h = mix(h, type_hash(*n.type));
      break;
    case Kind::kBound: h = mix(h, n.index); break;
    case Kind::kApp:
      h = mix(h, n.left->hash());
      h = mix(h, n.right->hash());
      break;
    case Kind::kAbs:
      h = mix(h, type_hash(*n.type));
      h = mix(h, n.left->hash());
      break;
  }
  n.hash = h;
  return Term(std::make_shared<const Node>(std::move(n)));
}

Term Term::var(std::string name, Type type) {
  return make(Node{Kind::kVar, std::move(name), std::move(type), 0,
                   std::nullopt, std::nullopt, 0});
}

Term Term::constant(std::string name, Type type) {
  return make(Node{Kind::kConst, std::move(name), std::move(type), 0,
                   std::nullopt, std::nullopt, 0});
}

Term Term::bound(size_t index) {
  return make(Node{Kind::kBound, "", std::nullopt, index, std::nullopt,
                   std::nullopt, 0});
}

Term Term::app(Term fun, Term arg) {
  return make(Node{Kind::kApp, "", std::nullopt, 0, std::move(fun),
                   std::move(arg), 0});
}

Term Term::apps(Term head, const std::vector<Term>& args) {
  Term t = std::move(head);
  for (const auto& a : args) t = app(t, a);
  return t;
}

Term Term::abs(std::string hint, Type binder_type, Term body) {
  return make(Node{Kind::kAbs, std::move(hint), std::move(binder_type), 0,
                   std::move(body), std::nullopt, 0});
}

namespace {

Term abstract_var(const Term& t, const std::string& name, size_t depth) {
  switch (t.kind()) {
    case Term::Kind::kVar:
      return t.name() == name ? Term::bound(depth) : t;
    case Term::Kind::kConst:
    case Term::Kind::kBound: return t;
    case Term::Kind::kApp:
      return Term::app(abstract_var(t.fun(), name, depth),
                       abstract_var(t.arg(), name, depth));
    case Term::Kind::kAbs:
      return Term::abs(t.name(), t.type(),
                       abstract_var(t.body(), name, depth + 1));
  }
  return t;
}

}  // namespace

Term Term::lam(const std::string& name, const Type& type, const Term& body) {
  return abs(name, type, abstract_var(shift(body, 1), name, 0));
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::kVar:
    case Term::Kind::kConst:
      return a.name() == b.name() && a.type() == b.type();
    case Term::Kind::kBound: return a.index() == b.index();
    case Term::Kind::kApp: return a.fun() == b.fun() && a.arg() == b.arg();
    case Term::Kind::kAbs: return a.type() == b.type() && a.body() == b.body();
  }
  return false;
}

bool operator<(const Term& a, const Term& b) {
  if (a.kind() != b.kind()) return a.kind() < b.kind();
  switch (a.kind()) {
    case Term::Kind::kVar:
    case Term::Kind::kConst:
      if (a.name() != b.name()) return a.name() < b.name();
      return a.type() < b.type();
    case Term::Kind::kBound: return a.index() < b.index();
    case Term::Kind::kApp:
      if (a.fun() != b.fun()) return a.fun() < b.fun();
      return a.arg() < b.arg();
    case Term::Kind::kAbs:
      if (a.type() != b.type()) return a.type() < b.type();
      return a.body() < b.body();
  }
  return false;
}

std::pair<Term, std::vector<Term>> spine(const Term& t) {
  std::vector<Term> args;
  const Term* cur = &t;
  while (cur->is_app()) {
    args.push_back(cur->arg());
    cur = &cur->fun();
  }
  std::reverse(args.begin(), args.end());
  return {*cur, std::move(args)};
}

namespace {

void collect_free(const Term& t, std::vector<std::pair<std::string, Type>>& out,
                  std::set<std::string>& seen) {
  switch (t.kind()) {
    case Term::Kind::kVar:
      if (seen.insert(t.name()).second) out.emplace_back(t.name(), t.type());
      return;
    case Term::Kind::kConst:
    case Term::Kind::kBound: return;
    case Term::Kind::kApp:
      collect_free(t.fun(), out, seen);
      collect_free(t.arg(), out, seen);
      return;
    case Term::Kind::kAbs: collect_free(t.body(), out, seen); return;
  }
}

}  // namespace

std::vector<std::pair<std::string, Type>> free_vars_typed(const Term& t) {
  std::vector<std::pair<std::string, Type>> out;
  std::set<std::string> seen;
  collect_free(t, out, seen);
  return out;
}

std::vector<std::string> free_vars(const Term& t) {
  std::vector<std::string> out;
  for (auto& [n, ty] : free_vars_typed(t)) out.push_back(n);
  return out;
}

bool occurs_free(const std::string& name, const Term& t) {
  switch (t.kind()) {
    case Term::Kind::kVar: return t.name() == name;
    case Term::Kind::kConst:
    case Term::Kind::kBound: return false;
    case Term::Kind::kApp:
      return occurs_free(name, t.fun()) || occurs_free(name, t.arg());
    case Term::Kind::kAbs: return occurs_free(name, t.body());
  }
  return false;
}

bool mentions_constant(const Term& t, const std::string& name) {
  switch (t.kind()) {
    case Term::Kind::kConst: return t.name() == name;
    case Term::Kind::kVar:
    case Term::Kind::kBound: return false;
    case Term::Kind::kApp:
      return mentions_constant(t.fun(), name) ||
             mentions_constant(t.arg(), name);
    case Term::Kind::kAbs: return mentions_constant(t.body(), name);
  }
  return false;
}

namespace {
bool loose_above(const Term& t, size_t depth) {
  switch (t.kind()) {
    case Term::Kind::kBound: return t.index() >= depth;
    case Term::Kind::kApp:
      return loose_above(t.fun(), depth) || loose_above(t.arg(), depth);
    case Term::Kind::kAbs: return loose_above(t.body(), depth + 1);
    default: return false;
  }
}
}  // namespace

bool has_loose_bound(const Term& t) { return loose_above(t, 0); }

size_t term_size(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::kApp: return term_size(t.fun()) + term_size(t.arg());
    case Term::Kind::kAbs: return 1 + term_size(t.body());
    default: return 1;
  }
}

Term shift(const Term& t, long delta, size_t cutoff) {
  switch (t.kind()) {
    case Term::Kind::kBound:
      if (t.index() >= cutoff)
        return Term::bound(static_cast<size_t>(static_cast<long>(t.index()) + delta));
      return t;
    case Term::Kind::kApp: {
      Term f = shift(t.fun(), delta, cutoff);
      Term a = shift(t.arg(), delta, cutoff);
      return Term::app(f, a);
    }
    case Term::Kind::kAbs:
      return Term::abs(t.name(), t.type(), shift(t.body(), delta, cutoff + 1));
    default: return t;
  }
}

namespace {

Term subst_bound(const Term& t, size_t depth, const Term& value) {
  switch (t.kind()) {
    case Term::Kind::kBound:
      if (t.index() == depth) return shift(value, static_cast<long>(depth));
      if (t.index() > depth) return Term::bound(t.index() - 1);
      return t;
    case Term::Kind::kApp:
      return Term::app(subst_bound(t.fun(), depth, value),
                       subst_bound(t.arg(), depth, value));
    case Term::Kind::kAbs:
      return Term::abs(t.name(), t.type(),
                       subst_bound(t.body(), depth + 1, value));
    default: return t;
  }
}

}  // namespace

Term instantiate(const Term& body, const Term& value) {
  return subst_bound(body, 0, value);
}

Type type_of(const Term& t, const std::vector<Type>& outer) {
  std::vector<Type> env = outer;
  std::function<Type(const Term&)> go = [&](const Term& u) -> Type {
    switch (u.kind()) {
      case Term::Kind::kVar:
      case Term::Kind::kConst: return u.type();
      case Term::Kind::kBound:
        if (u.index() >= env.size()) throw Error("loose bound variable");
        return env[env.size() - 1 - u.index()];
      case Term::Kind::kApp: {
        Type f = go(u.fun());
        Type a = go(u.arg());
        if (!f.is_arrow() || f.dom() != a) {
          throw Error("application type mismatch: cannot apply " +
                      u.fun().str() + " : " + f.str() + " to " + u.arg().str() +
                      " : " + a.str());
        }
        return f.cod();
      }
      case Term::Kind::kAbs: {
        env.push_back(u.type());
        Type b = go(u.body());
        env.pop_back();
        return Type::arrow(u.type(), b);
      }
    }
    throw Error("bad term");
  };
  return go(t);
}

namespace {

void check_logical_instance(const std::string& name, const Type& t) {
  const Type o = Type::prop();
  bool ok = false;
  if (name == logic::kTop || name == logic::kBot) {
    ok = t == o;
  } else if (name == logic::kAnd || name == logic::kOr || name == logic::kImp) {
    ok = t == Type::arrows({o, o}, o);
  } else if (name == logic::kAll || name == logic::kEx) {
    ok = t.is_arrow() && t.dom().is_arrow() && t.dom().dom().first_order() &&
         t.dom().cod() == o && t.cod() == o;
  } else if (name == logic::kEq) {
    ok = t.is_arrow() && t.dom().first_order() &&
         t == Type::arrows({t.dom(), t.dom()}, o);
  }
  if (!ok)
    throw Error("logical constant '" + name + "' used at ill-formed type " +
                t.str());
}

void check_annotations(const Signature& sig, const VarContext& ctx,
                       const Term& t) {
  switch (t.kind()) {
    case Term::Kind::kVar: {
      auto ty = ctx.lookup(t.name());
      if (!ty) throw Error("unbound identifier '" + t.name() + "'");
      if (*ty != t.type())
        throw Error("variable '" + t.name() + "' used at type " +
                    t.type().str() + " but declared " + ty->str());
      return;
    }
    case Term::Kind::kConst: {
      if (logic::is_logical(t.name())) {
        check_logical_instance(t.name(), t.type());
        sig.check_type(t.type());
        return;
      }
      auto ty = sig.lookup(t.name());
      if (!ty) throw Error("unbound identifier '" + t.name() + "'");
      if (*ty != t.type())
        throw Error("constant '" + t.name() + "' used at type " +
                    t.type().str() + " but declared " + ty->str());
      return;
    }
    case Term::Kind::kBound: return;
    case Term::Kind::kApp:
      check_annotations(sig, ctx, t.fun());
      check_annotations(sig, ctx, t.arg());
      return;
    case Term::Kind::kAbs:
      try {
        sig.check_type(t.type());
      } catch (const Error& e) {
        throw Error(std::string("binder type mismatch: ") + e.what());
      }
      check_annotations(sig, ctx, t.body());
      return;
  }
}

Term beta(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::kApp: {
      Term f = beta(t.fun());
      Term a = beta(t.arg());
      if (f.is_abs()) return beta(instantiate(f.body(), a));
      return Term::app(f, a);
    }
    case Term::Kind::kAbs:
      return Term::abs(t.name(), t.type(), beta(t.body()));
    default: return t;
  }
}

Term eta_long(const Term& t, const Type& ty, std::vector<Type>& env);

// Expands a beta-normal non-abstraction `r` of type `ty` to long form, its
// arguments being already long.
Term eta_expand(const Term& r, const Type& ty, std::vector<Type>& env) {
  if (!ty.is_arrow()) return r;
  env.push_back(ty.dom());
  Term x = eta_expand(Term::bound(0), ty.dom(), env);
  Term applied = Term::app(shift(r, 1), x);
  Term body = eta_expand(applied, ty.cod(), env);
  env.pop_back();
  return Term::abs("x", ty.dom(), body);
}

Term eta_long(const Term& t, const Type& ty, std::vector<Type>& env) {
  if (t.is_abs()) {
    env.push_back(t.type());
    Term body = eta_long(t.body(), ty.cod(), env);
    env.pop_back();
    return Term::abs(t.name(), t.type(), body);
  }
  auto [head, args] = spine(t);
  Type htype = head.is_bound() ? env[env.size() - 1 - head.index()]
                               : head.type();
  std::vector<Term> long_args;
  Type cur = htype;
  for (const auto& a : args) {
    long_args.push_back(eta_long(a, cur.dom(), env));
    cur = cur.cod();
  }
  return eta_expand(Term::apps(head, long_args), ty, env);
}

}  // namespace

Type infer_type(const Signature& sig, const VarContext& ctx, const Term& t) {
  check_annotations(sig, ctx, t);
  return type_of(t);
}

Term normalize(const Term& t) {
  Type ty = type_of(t);
  std::vector<Type> env;
  return eta_long(beta(t), ty, env);
}

bool is_normal(const Term& t) { return normalize(t) == t; }

Term replace_var(const Term& t, const std::string& name, const Term& value) {
  switch (t.kind()) {
    case Term::Kind::kVar: return t.name() == name ? value : t;
    case Term::Kind::kApp:
      return Term::app(replace_var(t.fun(), name, value),
                       replace_var(t.arg(), name, value));
    case Term::Kind::kAbs:
      return Term::abs(t.name(), t.type(), replace_var(t.body(), name, value));
    default: return t;
  }
}

namespace mk {

namespace {
Type binop_type() {
  const Type o = Type::prop();
  return Type::arrows({o, o}, o);
}
Term binop(const char* name, const Term& a, const Term& b) {
  return Term::apps(Term::constant(name, binop_type()), {a, b});
}
}  // namespace

Term top() { return Term::constant(logic::kTop, Type::prop()); }
Term bot() { return Term::constant(logic::kBot, Type::prop()); }
Term conj(const Term& a, const Term& b) { return binop(logic::kAnd, a, b); }
Term disj(const Term& a, const Term& b) { return binop(logic::kOr, a, b); }
Term imp(const Term& a, const Term& b) { return binop(logic::kImp, a, b); }

Term quantifier_const(bool universal, const Type& t) {
  const Type o = Type::prop();
  return Term::constant(universal ? logic::kAll : logic::kEx,
                        Type::arrow(Type::arrow(t, o), o));
}

Term forall(const std::string& x, const Type& t, const Term& body) {
  return Term::app(quantifier_const(true, t), Term::lam(x, t, body));
}

Term exists(const std::string& x, const Type& t, const Term& body) {
  return Term::app(quantifier_const(false, t), Term::lam(x, t, body));
}

Term eq_const(const Type& t) {
  return Term::constant(logic::kEq, Type::arrows({t, t}, Type::prop()));
}

Term eq(const Term& a, const Term& b) {
  return Term::apps(eq_const(type_of(a)), {a, b});
}

Term conj_all(const std::vector<Term>& fs) {
  if (fs.empty()) return top();
  Term out = fs.back();
  for (size_t i = fs.size() - 1; i-- > 0;) out = conj(fs[i], out);
  return out;
}

Term disj_all(const std::vector<Term>& fs) {
  if (fs.empty()) return bot();
  Term out = fs.back();
  for (size_t i = fs.size() - 1; i-- > 0;) out = disj(fs[i], out);
  return out;
}

}  // namespace mk

FormulaView view(const Term& f) {
  FormulaView v;
  auto [head, args] = spine(f);
  if (!head.is_const()) return v;
  const std::string& n = head.name();
  using K = FormulaView::Kind;
  if (n == logic::kTop && args.empty()) {
    v.kind = K::kTop;
  } else if (n == logic::kBot && args.empty()) {
    v.kind = K::kBot;
  } else if ((n == logic::kAnd || n == logic::kOr || n == logic::kImp) &&
             args.size() == 2) {
    v.kind = n == logic::kAnd ? K::kAnd : n == logic::kOr ? K::kOr : K::kImp;
    v.lhs = args[0];
    v.rhs = args[1];
  } else if ((n == logic::kAll || n == logic::kEx) && args.size() == 1 &&
             args[0].is_abs()) {
    v.kind = n == logic::kAll ? K::kAll : K::kEx;
    v.qtype = args[0].type();
    v.qbody = args[0];
  } else if (!logic::is_logical(n) || n == logic::kEq) {
    if (head.type().predicate() &&
        head.type().arg_types().size() == args.size()) {
      v.kind = K::kAtom;
      v.pred = n;
      v.args = std::move(args);
    }
  }
  return v;
}

bool is_atom(const Term& f) { return view(f).kind == FormulaView::Kind::kAtom; }

Term open_quantifier(const Term& abstraction, const Term& t) {
  return normalize(instantiate(abstraction.body(), t));
}

// ---------------------------------------------------------------------------
// Printing

namespace {

bool is_symbolic(const std::string& n) {
  return n == logic::kAnd || n == logic::kOr || n == logic::kImp;
}

struct Printer {
  std::set<std::string> taken;
  std::vector<std::string> env;
  std::ostringstream os;

  std::string fresh(const std::string& hint) {
    std::string base = hint.empty() ? "x" : hint;
    std::string name = base;
    for (int i = 1; taken.count(name) ||
                    std::find(env.begin(), env.end(), name) != env.end();
         ++i)
      name = base + std::to_string(i);
    return name;
  }

  void binder(const char* kw, const Term& abs) {
    std::string x = fresh(abs.name());
    os << kw << x << ":" << abs.type().str() << ", ";
    env.push_back(x);
    print(abs.body(), 0);
    env.pop_back();
  }

  void print(const Term& t, int prec) {
    auto [head, args] = spine(t);
    if (head.is_const()) {
      const std::string& n = head.name();
      if (is_symbolic(n) && args.size() == 2) {
        int p = n == logic::kImp ? 1 : n == logic::kOr ? 2 : 3;
        if (prec > p) os << "(";
        print(args[0], p + 1);
        os << " " << n << " ";
        print(args[1], p);
        if (prec > p) os << ")";
        return;
      }
      if ((n == logic::kAll || n == logic::kEx) && args.size() == 1 &&
          args[0].is_abs()) {
        if (prec > 0) os << "(";
        binder(n == logic::kAll ? "forall " : "exists ", args[0]);
        if (prec > 0) os << ")";
        return;
      }
    }
    if (!args.empty()) {
      if (prec > 10) os << "(";
      atom(head, 11);
      for (const auto& a : args) {
        os << " ";
        print(a, 11);
      }
      if (prec > 10) os << ")";
      return;
    }
    atom(head, prec);
  }

  void atom(const Term& t, int prec) {
    switch (t.kind()) {
      case Term::Kind::kVar: os << t.name(); return;
      case Term::Kind::kConst:
        if (is_symbolic(t.name()))
          os << "(" << t.name() << ")";
        else
          os << t.name();
        return;
      case Term::Kind::kBound:
        if (t.index() < env.size())
          os << env[env.size() - 1 - t.index()];
        else
          os << "#" << t.index();
        return;
      case Term::Kind::kAbs:
        if (prec > 0) os << "(";
        binder("\\", t);
        if (prec > 0) os << ")";
        return;
      case Term::Kind::kApp: print(t, prec); return;
    }
  }
};

}  // namespace

std::string Term::str() const {
  Printer p;
  for (const auto& n : free_vars(*this)) p.taken.insert(n);
  std::function<void(const Term&)> consts = [&](const Term& t) {
    if (t.is_const()) p.taken.insert(t.name());
    if (t.is_app()) {
      consts(t.fun());
      consts(t.arg());
    }
    if (t.is_abs()) consts(t.body());
  };
  consts(*this);
  p.print(*this, 0);
  return p.os.str();
}

}  // namespace ldmu
