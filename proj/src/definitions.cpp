#include "ldmu/definitions.hpp"

#include <algorithm>
#include <set>

#include "ldmu/unify.hpp"

namespace ldmu {

const char* to_string(PredKind k) {
  return k == PredKind::kInductive ? "inductive" : "fixed-point";
}

std::string Clause::pred() const { return spine(head).first.name(); }

std::string Clause::str() const {
  std::string s = head.str() + (kind == PredKind::kInductive ? " :=mu " : " := ");
  return s + body.str();
}

void DefinitionSet::define(const std::string& pred, PredKind kind) {
  if (pred == logic::kEq) throw Error("eq is built in and cannot be redefined");
  auto ty = sig_.lookup(pred);
  if (!ty) throw Error("unbound identifier '" + pred + "'");
  if (!ty->predicate() || ty->first_order())
    throw Error("'" + pred + "' does not have a predicate type");
  auto it = kinds_.find(pred);
  if (it != kinds_.end()) {
    if (it->second != kind)
      throw Error("clauses for '" + pred + "' mix fixed-point and inductive kinds");
    return;
  }
  kinds_[pred] = kind;
  order_.push_back(pred);
}

void DefinitionSet::add_clause(const Clause& c) {
  FormulaView v = view(c.head);
  if (v.kind != FormulaView::Kind::kAtom) throw Error("clause head is not atomic: " + c.head.str());
  define(v.pred, c.kind);
  infer_type(sig_, c.vars, c.head);
  Type bt = infer_type(sig_, c.vars, c.body);
  if (!bt.is_prop()) throw Error("clause body is not a formula: " + c.body.str());
  for (const auto& [x, ty] : c.vars)
    if (!occurs_free(x, c.head))
      throw Error("clause variable '" + x + "' does not occur in the head " + c.head.str());
  if (!is_pattern(c.head, c.vars))
    throw Error("clause head is not a higher-order pattern: " + c.head.str());
  Clause n = c;
  n.head = normalize(c.head);
  n.body = normalize(c.body);
  clauses_.push_back(n);
}

std::optional<PredKind> DefinitionSet::kind_of(const std::string& pred) const {
  if (pred == logic::kEq) return PredKind::kFixedPoint;
  auto it = kinds_.find(pred);
  if (it == kinds_.end()) return std::nullopt;
  return it->second;
}

std::vector<Clause> DefinitionSet::clauses_for(const std::string& pred) const {
  std::vector<Clause> out;
  for (const auto& c : clauses_)
    if (c.pred() == pred) out.push_back(c);
  return out;
}

std::vector<Clause> DefinitionSet::clauses_for_atom(const Term& atom) const {
  FormulaView v = view(atom);
  if (v.kind != FormulaView::Kind::kAtom) throw Error("not an atom: " + atom.str());
  if (v.pred == logic::kEq) return {eq_clause(type_of(v.args[0]))};
  return clauses_for(v.pred);
}

Clause eq_clause(const Type& alpha) {
  VarContext x{{"X", alpha}};
  Term var = normalize(Term::var("X", alpha));
  return Clause{PredKind::kFixedPoint, x, mk::eq(var, var), mk::top()};
}

std::optional<Term> defn_expand(const Clause& c, const Term& a,
                                const Substitution& theta) {
  Term at = apply_subst(theta, a);
  auto rho = pattern_match(c.head, c.vars, at);
  if (!rho) return std::nullopt;
  return apply_subst(*rho, c.body);
}

std::optional<DefnInstance> defn_unify(const Clause& c, const Term& a,
                                       const VarContext& y) {
  // Rename the clause variables apart from y.
  VarContext all = y;
  std::vector<std::pair<std::string, std::string>> renaming;
  Term head = c.head;
  Term body = c.body;
  for (const auto& [x, ty] : c.vars) {
    std::string fresh = all.fresh_name(x);
    all.add(fresh, ty);
    renaming.push_back({x, fresh});
  }
  // Two-phase replacement avoids clashes between old and new names.
  std::map<std::string, int> rank;
  for (const auto& [x, fresh] : renaming) {
    Type ty = *c.vars.lookup(x);
    head = replace_var(head, x, Term::var("#" + x, ty));
  }
  for (const auto& [x, fresh] : renaming) {
    Type ty = *c.vars.lookup(x);
    head = replace_var(head, "#" + x, Term::var(fresh, ty));
    rank[fresh] = 1;
  }
  auto sigma = pattern_unify(a, normalize(head), all, rank);
  if (!sigma) return std::nullopt;
  Substitution theta = sigma->restrict_to(y);
  Substitution rho(c.vars);
  for (const auto& [x, fresh] : renaming) rho.bind(x, sigma->image(fresh));
  Term b = apply_subst(rho, body);
  // The bindings of y may leave fresh variables from pruning; these lie in
  // range(theta) since every clause variable occurs in the head.
  return DefnInstance{theta, rho, b};
}

Term replace_const(const Term& t, const std::string& name, const Term& value) {
  switch (t.kind()) {
    case Term::Kind::kConst: return t.name() == name ? value : t;
    case Term::Kind::kApp:
      return Term::app(replace_const(t.fun(), name, value),
                       replace_const(t.arg(), name, value));
    case Term::Kind::kAbs:
      return Term::abs(t.name(), t.type(), replace_const(t.body(), name, value));
    default: return t;
  }
}

namespace {

bool is_var_arg(const Term& arg, const VarContext& vars, std::string* name) {
  Term t = arg;
  while (t.is_abs()) t = t.body();
  Term head = spine(t).first;
  if (!head.is_var() || !vars.contains(head.name())) return false;
  if (normalize(head) != arg) return false;
  *name = head.name();
  return true;
}

Term disjunct(const Clause& c, const std::vector<Term>& xs, const Term& p,
              OperatorForm form) {
  FormulaView hv = view(c.head);
  Term body = replace_const(c.body, hv.pred, p);
  std::vector<Term> args = hv.args;
  VarContext remaining = c.vars;
  if (form == OperatorForm::kCompact) {
    std::map<std::string, size_t> last;
    for (size_t j = 0; j < args.size(); ++j) {
      std::string n;
      if (is_var_arg(args[j], c.vars, &n)) last[n] = j;
    }
    VarContext keep;
    for (const auto& [x, ty] : c.vars)
      if (!last.count(x)) keep.add(x, ty);
    for (const auto& [x, j] : last) {
      for (auto& a : args) a = normalize(replace_var(a, x, xs[j]));
      body = replace_var(body, x, xs[j]);
    }
    remaining = keep;
  }
  std::vector<Term> conj;
  for (size_t j = 0; j < args.size(); ++j) {
    Term x = normalize(xs[j]);
    if (form == OperatorForm::kCompact && args[j] == x) continue;
    conj.push_back(mk::eq(x, args[j]));
  }
  Term inner = body;
  if (form == OperatorForm::kLiteral) {
    // With no arguments the equation part is the empty conjunction true.
    if (conj.empty()) {
      inner = mk::conj(mk::top(), body);
    } else {
      conj.push_back(body);
      inner = mk::conj_all(conj);
    }
  } else {
    if (!(view(body).kind == FormulaView::Kind::kTop && !conj.empty()))
      conj.push_back(body);
    inner = mk::conj_all(conj);
  }
  const auto& vs = remaining.vars();
  for (size_t i = vs.size(); i-- > 0;) inner = mk::exists(vs[i].first, vs[i].second, inner);
  return inner;
}

}  // namespace

FixedPointOperator to_fixed_point_operator(const DefinitionSet& defs,
                                           const std::string& pred,
                                           OperatorForm form) {
  if (!defs.is_inductive(pred)) throw Error("'" + pred + "' is not an inductive predicate");
  Type pt = *defs.signature().lookup(pred);
  std::vector<Type> arg_types = pt.arg_types();
  std::vector<Clause> cs = defs.clauses_for(pred);
  // Fresh argument names; clause variables are abstracted before these, so
  // only a clash of names could cause capture.
  VarContext taken;
  for (const auto& c : cs)
    for (const auto& [x, ty] : c.vars)
      if (!taken.contains(x)) taken.add(x, ty);
  std::string pname = "p";
  while (taken.contains(pname) || defs.signature().contains(pname)) pname += "'";
  Term p = Term::var(pname, pt);
  std::vector<Term> xs;
  std::vector<std::string> xnames;
  for (size_t j = 0; j < arg_types.size(); ++j) {
    std::string n = taken.fresh_name("x" + std::to_string(j + 1));
    taken.add(n, arg_types[j]);
    xnames.push_back(n);
    xs.push_back(Term::var(n, arg_types[j]));
  }
  std::vector<Term> ds;
  for (const auto& c : cs) ds.push_back(disjunct(c, xs, p, form));
  Term op = mk::disj_all(ds);
  for (size_t j = xs.size(); j-- > 0;) op = Term::lam(xnames[j], arg_types[j], op);
  op = normalize(Term::lam(pname, pt, op));
  return FixedPointOperator{pred, pt, arg_types, op};
}

bool PolarityReport::only_positive() const {
  return std::all_of(occurrences.begin(), occurrences.end(),
                     [](const Occurrence& o) { return o.positive; });
}

namespace {

void scan(const Term& f, const std::string& pred, std::vector<int>& path, int depth,
          int& fresh, PolarityReport& out) {
  FormulaView v = view(f);
  using K = FormulaView::Kind;
  switch (v.kind) {
    case K::kAnd:
    case K::kOr:
    case K::kImp:
      path.push_back(0);
      scan(*v.lhs, pred, path, depth + (v.kind == K::kImp ? 1 : 0), fresh, out);
      path.back() = 1;
      scan(*v.rhs, pred, path, depth, fresh, out);
      path.pop_back();
      return;
    case K::kAll:
    case K::kEx: {
      path.push_back(0);
      Term x = Term::var("#" + std::to_string(fresh++), *v.qtype);
      scan(instantiate(v.qbody->body(), x), pred, path, depth, fresh, out);
      path.pop_back();
      return;
    }
    case K::kAtom:
      if (v.pred == pred) out.occurrences.push_back({path, depth % 2 == 0, depth, f});
      return;
    default: {
      // Applications of bound predicate variables and the like: report any
      // occurrence of the predicate as a constant without descending further.
      if (mentions_constant(f, pred))
        out.occurrences.push_back({path, depth % 2 == 0, depth, f});
      return;
    }
  }
}

}  // namespace

PolarityReport polarity(const Term& f, const std::string& pred) {
  PolarityReport out;
  std::vector<int> path;
  int fresh = 0;
  scan(f, pred, path, 0, fresh, out);
  return out;
}

}  // namespace ldmu
