#include "ldmu/unify.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

namespace ldmu {

namespace {

// Binders are opened with "local" variables; user identifiers never start
// with '#', so these cannot clash with anything in the input.
bool is_local(const Term& t) { return t.is_var() && t.name()[0] == '#'; }

class Locals {
 public:
  Term fresh(const Type& ty) {
    return Term::var("#" + std::to_string(next_++), ty);
  }

 private:
  size_t next_ = 0;
};

// If `a` is the eta-long form of a local variable, that variable.
std::optional<Term> as_local(const Term& a) {
  Term t = a;
  while (t.is_abs()) t = t.body();
  Term head = spine(t).first;
  if (is_local(head) && normalize(head) == a) return head;
  return std::nullopt;
}

bool check_pattern(const Term& t, const VarContext& ctx, Locals& locals) {
  if (t.is_abs()) {
    Term x = locals.fresh(t.type());
    return check_pattern(instantiate(t.body(), x), ctx, locals);
  }
  auto [head, args] = spine(t);
  if (head.is_var() && ctx.contains(head.name())) {
    std::set<std::string> seen;
    for (const auto& a : args) {
      auto l = as_local(a);
      if (!l || !seen.insert(l->name()).second) return false;
    }
    return true;
  }
  for (const auto& a : args)
    if (!check_pattern(a, ctx, locals)) return false;
  return true;
}

class Unifier {
 public:
  Unifier(VarContext flex, std::map<std::string, int> rank,
          std::set<std::string> used)
      : domain_(flex), flex_(std::move(flex)), rank_(std::move(rank)),
        used_(std::move(used)) {}

  bool unify(const Term& s0, const Term& t0) {
    Term s = apply(s0), t = apply(t0);
    if (s == t) return true;
    if (s.is_abs() != t.is_abs()) throw Error("unify: type mismatch");
    if (s.is_abs()) {
      Term x = locals_.fresh(s.type());
      return unify(instantiate(s.body(), x), instantiate(t.body(), x));
    }
    auto [hs, as] = spine(s);
    auto [ht, at] = spine(t);
    bool fs = is_flex(hs), ft = is_flex(ht);
    if (fs && ft) {
      if (hs.name() == ht.name()) return flex_same(hs, as, at);
      // Bind the higher-ranked variable; ties go to the s side.
      if (rank_of(ht.name()) > rank_of(hs.name())) return solve(ht, at, s);
      return solve(hs, as, t);
    }
    if (fs) return solve(hs, as, t);
    if (ft) return solve(ht, at, s);
    if (!same_rigid(hs, ht) || as.size() != at.size()) return false;
    for (size_t i = 0; i < as.size(); ++i)
      if (!unify(as[i], at[i])) return false;
    return true;
  }

  Substitution result() const {
    Substitution out(domain_);
    for (const auto& [x, ty] : domain_) {
      auto it = sol_.find(x);
      if (it != sol_.end()) out.bind(x, it->second);
    }
    return out;
  }

 private:
  bool is_flex(const Term& h) const {
    return h.is_var() && flex_.contains(h.name()) && !sol_.count(h.name());
  }
  int rank_of(const std::string& n) const {
    auto it = rank_.find(n);
    return it == rank_.end() ? 0 : it->second;
  }
  static bool same_rigid(const Term& a, const Term& b) {
    if (a.kind() != b.kind()) return false;
    return a.name() == b.name() && a.type() == b.type();
  }

  Term apply(const Term& t) const {
    if (sol_.empty()) return t;
    std::function<Term(const Term&)> rep = [&](const Term& u) -> Term {
      switch (u.kind()) {
        case Term::Kind::kVar: {
          auto it = sol_.find(u.name());
          return it == sol_.end() ? u : it->second;
        }
        case Term::Kind::kApp: return Term::app(rep(u.fun()), rep(u.arg()));
        case Term::Kind::kAbs:
          return Term::abs(u.name(), u.type(), rep(u.body()));
        default: return u;
      }
    };
    return normalize(rep(t));
  }

  std::vector<Term> locals_of(const std::vector<Term>& args) const {
    std::vector<Term> out;
    std::set<std::string> seen;
    for (const auto& a : args) {
      auto l = as_local(a);
      if (!l || !seen.insert(l->name()).second)
        throw NonPatternError("non-pattern: variable applied to " +
                              std::string(l ? "repeated" : "non-bound") +
                              " argument " + a.str());
      out.push_back(*l);
    }
    return out;
  }

  std::string fresh_var(const std::string& hint) {
    std::string base = hint;
    while (!base.empty() && (std::isdigit(static_cast<unsigned char>(base.back()))))
      base.pop_back();
    if (base.empty()) base = "H";
    for (int i = 1;; ++i) {
      std::string n = base + std::to_string(i);
      if (!used_.count(n)) {
        used_.insert(n);
        return n;
      }
    }
  }

  // Record F := value and keep the solution idempotent.
  void assign(const std::string& f, const Term& value) {
    sol_.insert_or_assign(f, value);
    for (auto& [k, v] : sol_)
      if (k != f) v = normalize(replace_var(v, f, value));
  }

  // F a1..an := lam(args). H (kept args)
  Term restrict(const Term& f, const std::vector<Term>& args,
                const std::vector<bool>& keep) {
    std::vector<Type> kept_types;
    std::vector<Term> kept;
    for (size_t i = 0; i < args.size(); ++i)
      if (keep[i]) {
        kept_types.push_back(args[i].type());
        kept.push_back(args[i]);
      }
    Type target = f.type();
    for (size_t i = 0; i < args.size(); ++i) target = target.cod();
    std::string h = fresh_var(f.name());
    Type ht = Type::arrows(kept_types, target);
    flex_.add(h, ht);
    Term body = Term::apps(Term::var(h, ht), std::vector<Term>(kept.begin(), kept.end()));
    Term val = body;
    for (size_t i = args.size(); i-- > 0;)
      val = Term::lam(args[i].name(), args[i].type(), val);
    return normalize(val);
  }

  bool flex_same(const Term& f, const std::vector<Term>& as,
                 const std::vector<Term>& at) {
    auto ls = locals_of(as), lt = locals_of(at);
    std::vector<bool> keep(ls.size());
    bool all = true;
    for (size_t i = 0; i < ls.size(); ++i) {
      keep[i] = ls[i] == lt[i];
      all = all && keep[i];
    }
    if (all) return true;
    assign(f.name(), restrict(f, ls, keep));
    return true;
  }

  // Removes from `t` every flexible argument position holding a local outside
  // `allowed`; fails on rigid occurrences of such locals or of `f` itself.
  bool prune(const Term& t, const std::string& f, std::set<std::string> allowed) {
    if (t.is_abs()) {
      Term x = locals_.fresh(t.type());
      allowed.insert(x.name());
      return prune(instantiate(t.body(), x), f, allowed);
    }
    auto [head, args] = spine(t);
    if (head.is_var() && head.name() == f) return false;  // occurs check
    if (is_flex(head)) {
      auto ls = locals_of(args);
      std::vector<bool> keep(ls.size());
      bool all = true;
      for (size_t i = 0; i < ls.size(); ++i) {
        keep[i] = allowed.count(ls[i].name()) > 0;
        all = all && keep[i];
      }
      if (!all) assign(head.name(), restrict(head, ls, keep));
      return true;
    }
    if (is_local(head) && !allowed.count(head.name())) return false;
    for (const auto& a : args)
      if (!prune(apply(a), f, allowed)) return false;
    return true;
  }

  bool solve(const Term& f, const std::vector<Term>& args, const Term& t) {
    auto ls = locals_of(args);
    std::set<std::string> allowed;
    for (const auto& l : ls) allowed.insert(l.name());
    if (!prune(t, f.name(), allowed)) return false;
    Term val = apply(t);
    for (size_t i = ls.size(); i-- > 0;)
      val = Term::lam(ls[i].name(), ls[i].type(), val);
    assign(f.name(), normalize(val));
    return true;
  }

  VarContext domain_;
  VarContext flex_;
  std::map<std::string, int> rank_;
  std::set<std::string> used_;
  std::map<std::string, Term> sol_;
  Locals locals_;
};

void require_pattern(const Term& t, const VarContext& ctx) {
  if (!is_pattern(t, ctx))
    throw NonPatternError("non-pattern: " + t.str() +
                          " is outside the higher-order pattern fragment");
}

}  // namespace

bool is_pattern(const Term& t, const VarContext& ctx) {
  Locals locals;
  return check_pattern(t, ctx, locals);
}

std::optional<Substitution> pattern_unify(const Term& s, const Term& t,
                                          const VarContext& flex,
                                          const std::map<std::string, int>& rank) {
  require_pattern(s, flex);
  require_pattern(t, flex);
  if (type_of(s) != type_of(t)) return std::nullopt;
  std::set<std::string> used;
  for (const auto& n : free_vars(s)) used.insert(n);
  for (const auto& n : free_vars(t)) used.insert(n);
  for (const auto& [n, ty] : flex) used.insert(n);
  Unifier u(flex, rank, used);
  if (!u.unify(normalize(s), normalize(t))) return std::nullopt;
  return u.result();
}

std::optional<Substitution> pattern_match(const Term& h, const VarContext& x,
                                          const Term& a) {
  require_pattern(h, x);
  // Rename the pattern variables apart from the free variables of `a`.
  VarContext renamed;
  std::map<std::string, std::string> back;
  Term hr = h;
  for (const auto& [n, ty] : x) {
    std::string m = "?" + n;
    renamed.add(m, ty);
    back[m] = n;
    hr = replace_var(hr, n, Term::var(m, ty));
  }
  auto sigma = pattern_unify(hr, a, renamed);
  if (!sigma) return std::nullopt;
  Substitution rho(x);
  for (const auto& [m, ty] : renamed) {
    Term img = sigma->image(m);
    for (const auto& v : free_vars(img))
      if (renamed.contains(v))
        throw Error("pattern variable '" + back[m] +
                    "' is not determined by matching");
    rho.bind(back[m], img);
  }
  return rho;
}

}  // namespace ldmu
