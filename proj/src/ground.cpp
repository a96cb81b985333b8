#include "ldmu/ground.hpp"

#include <algorithm>
#include <set>

#include "ldmu/enumerate.hpp"
#include "ldmu/syntax.hpp"
#include "ldmu/unify.hpp"

namespace ldmu {

const std::vector<Term>& FinitarySignature::ground(const Type& t) const {
  auto it = cache_.find(t);
  if (it != cache_.end()) return it->second;
  Finiteness f = analyze_finiteness(sig_, t);
  if (!f.finite) {
    std::string cyc;
    for (size_t i = 0; i < f.cycle.size(); ++i) cyc += (i ? " -> " : "") + f.cycle[i];
    throw Error("type " + t.str() + " is not finitary: constructor cycle " + cyc);
  }
  GroundTerms g = enumerate_ground(sig_, t, f.max_size);
  return cache_.emplace(t, std::move(g.terms)).first->second;
}

std::vector<std::vector<Term>> FinitarySignature::ground_tuples(
    const std::vector<Type>& ts) const {
  std::vector<std::vector<Term>> out{{}};
  for (const Type& t : ts) {
    std::vector<std::vector<Term>> next;
    for (const auto& prefix : out)
      for (const Term& g : ground(t)) {
        next.push_back(prefix);
        next.back().push_back(g);
      }
    out = std::move(next);
  }
  return out;
}

FinitarySignature check_finitary(const Signature& sig) {
  FinitarySignature f;
  f.sig_ = sig;
  for (const auto& b : sig.base_types()) f.ground(Type::base(b));
  return f;
}

std::string GroundSequent::str() const {
  std::string out;
  for (size_t i = 0; i < hyps.size(); ++i) out += (i ? ", " : "") + hyps[i].str();
  return out + (hyps.empty() ? "" : " ") + "|- " + concl.str();
}

bool same_ground_sequent(const GroundSequent& a, const GroundSequent& b) {
  return a.concl == b.concl && same_multiset(a.hyps, b.hyps);
}

size_t derivation_size(const GroundDerivation& d) {
  size_t n = 1;
  for (const auto& p : d->premises) n += derivation_size(p);
  return n;
}

size_t derivation_height(const GroundDerivation& d) {
  size_t h = 0;
  for (const auto& p : d->premises) h = std::max(h, derivation_height(p));
  return h + 1;
}

size_t count_rule(const GroundDerivation& d, Rule r) {
  size_t n = d->rule == r ? 1 : 0;
  for (const auto& p : d->premises) n += count_rule(p, r);
  return n;
}

bool is_cut_free(const GroundDerivation& d) { return count_rule(d, Rule::kMc) == 0; }

namespace {

using K = FormulaView::Kind;

std::vector<Term> remove_one(const std::vector<Term>& hs, const Term& f) {
  std::vector<Term> out = hs;
  auto it = std::find(out.begin(), out.end(), f);
  if (it == out.end()) throw RuleError("no hypothesis " + f.str());
  out.erase(it);
  return out;
}

std::vector<Term> plus(std::vector<Term> hs, const std::vector<Term>& more) {
  hs.insert(hs.end(), more.begin(), more.end());
  return hs;
}

// Multiset difference; throws when `sub` is not contained in `hs`.
std::vector<Term> minus(std::vector<Term> hs, const std::vector<Term>& sub) {
  for (const Term& f : sub) hs = remove_one(hs, f);
  return hs;
}

FormulaView expect(const Term& f, K k, const char* what) {
  FormulaView v = view(f);
  if (v.kind != k) throw RuleError(std::string("expected ") + what + ", found " + f.str());
  return v;
}

Term open_with(const FormulaView& v, const Term& t) {
  return normalize(open_quantifier(*v.qbody, t));
}

Term apply_all(const Term& f, const std::vector<Term>& args) {
  return normalize(Term::apps(f, args));
}

const Term& principal_of(const GroundNode& n) {
  if (!n.principal) throw RuleError(std::string(rule_name(n.rule)) + " needs a principal formula");
  return *n.principal;
}

void check_family(const std::vector<std::vector<Term>>& expected,
                  const std::vector<std::vector<Term>>& keys) {
  std::vector<std::vector<Term>> a = expected, b = keys;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (std::adjacent_find(b.begin(), b.end()) != b.end())
    throw RuleError("premise family has a repeated index");
  if (a != b)
    throw RuleError("premise family incomplete: expected " + std::to_string(a.size()) +
                    " members, found " + std::to_string(b.size()));
}

}  // namespace

std::vector<GroundSequent> ground_premises(const DefinitionSet& defs,
                                           const FinitarySignature& fsig, const GroundNode& n) {
  const Signature& sig = defs.signature();
  const std::vector<Term>& G = n.seq.hyps;
  const Term& C = n.seq.concl;
  std::vector<GroundSequent> out;
  auto premise = [&](std::vector<Term> hs, Term c) {
    out.push_back(GroundSequent{std::move(hs), std::move(c)});
  };
  auto left = [&]() {
    const Term& p = principal_of(n);
    return std::make_pair(p, remove_one(G, p));
  };
  switch (n.rule) {
    case Rule::kTopR:
      expect(C, K::kTop, "true");
      break;
    case Rule::kBotL: {
      auto [p, rest] = left();
      expect(p, K::kBot, "false");
      break;
    }
    case Rule::kAndL: {
      auto [p, rest] = left();
      FormulaView v = expect(p, K::kAnd, "a conjunction");
      premise(plus(rest, {*v.lhs, *v.rhs}), C);
      break;
    }
    case Rule::kAndR: {
      FormulaView v = expect(C, K::kAnd, "a conjunction");
      premise(G, *v.lhs);
      premise(G, *v.rhs);
      break;
    }
    case Rule::kOrL: {
      auto [p, rest] = left();
      FormulaView v = expect(p, K::kOr, "a disjunction");
      premise(plus(rest, {*v.lhs}), C);
      premise(plus(rest, {*v.rhs}), C);
      break;
    }
    case Rule::kOrR: {
      FormulaView v = expect(C, K::kOr, "a disjunction");
      premise(G, n.side == 0 ? *v.lhs : *v.rhs);
      break;
    }
    case Rule::kImpL: {
      auto [p, rest] = left();
      FormulaView v = expect(p, K::kImp, "an implication");
      premise(rest, *v.lhs);
      premise(plus(rest, {*v.rhs}), C);
      break;
    }
    case Rule::kImpR: {
      FormulaView v = expect(C, K::kImp, "an implication");
      premise(plus(G, {*v.lhs}), *v.rhs);
      break;
    }
    case Rule::kAllL:
    case Rule::kExR: {
      bool l = n.rule == Rule::kAllL;
      std::vector<Term> rest = G;
      Term f = C;
      if (l) std::tie(f, rest) = left();
      FormulaView v = expect(f, l ? K::kAll : K::kEx, l ? "a universal" : "an existential");
      if (!n.term) throw RuleError("missing witness");
      if (!free_vars(*n.term).empty() || type_of(*n.term) != *v.qtype)
        throw RuleError("ill-typed witness " + n.term->str());
      if (l)
        premise(plus(rest, {open_with(v, *n.term)}), C);
      else
        premise(G, open_with(v, *n.term));
      break;
    }
    case Rule::kAllR:
    case Rule::kExL: {
      bool l = n.rule == Rule::kExL;
      std::vector<Term> rest = G;
      Term f = C;
      if (l) std::tie(f, rest) = left();
      FormulaView v = expect(f, l ? K::kEx : K::kAll, l ? "an existential" : "a universal");
      std::vector<std::vector<Term>> expected;
      for (const Term& t : fsig.ground(*v.qtype)) expected.push_back({t});
      check_family(expected, n.keys);
      for (const auto& k : n.keys) {
        if (l)
          premise(plus(rest, {open_with(v, k[0])}), C);
        else
          premise(G, open_with(v, k[0]));
      }
      break;
    }
    case Rule::kAx:
      if (!is_atom(C)) throw RuleError("Ax on non-atomic formula " + C.str());
      if (G.size() != 1 || G[0] != C) throw RuleError("Ax needs exactly the hypothesis " + C.str());
      break;
    case Rule::kWeaken: {
      auto [p, rest] = left();
      premise(rest, C);
      break;
    }
    case Rule::kContract: {
      auto [p, rest] = left();
      premise(plus(G, {p}), C);
      break;
    }
    case Rule::kMc:
      throw RuleError("mc premises are determined by the premises themselves");
    case Rule::kDeltaL: {
      auto [a, rest] = left();
      FormulaView v = expect(a, K::kAtom, "an atom");
      auto kind = defs.kind_of(v.pred);
      if (!kind) throw RuleError("defL on undefined predicate " + v.pred);
      if (*kind == PredKind::kInductive) throw RuleError("defL on inductive predicate " + v.pred);
      std::vector<Clause> cs = defs.clauses_for_atom(a);
      std::vector<size_t> matching;
      std::vector<Term> bodies;
      for (size_t k = 0; k < cs.size(); ++k) {
        auto rho = pattern_match(cs[k].head, cs[k].vars, a);
        if (!rho) continue;
        matching.push_back(k);
        bodies.push_back(apply_subst(*rho, cs[k].body));
      }
      if (matching != n.clauses)
        throw RuleError("defL premise family incomplete: " + std::to_string(matching.size()) +
                        " clauses match " + a.str());
      for (const Term& b : bodies) premise(plus(rest, {b}), C);
      break;
    }
    case Rule::kDeltaR: {
      FormulaView v = expect(C, K::kAtom, "an atom");
      auto kind = defs.kind_of(v.pred);
      if (!kind) throw RuleError("defR on undefined predicate " + v.pred);
      if (*kind == PredKind::kInductive) throw RuleError("defR on inductive predicate " + v.pred);
      std::vector<Clause> cs = defs.clauses_for_atom(C);
      if (n.clause >= cs.size()) throw RuleError("defR clause out of range");
      auto rho = pattern_match(cs[n.clause].head, cs[n.clause].vars, C);
      if (!rho) throw RuleError("defR clause " + std::to_string(n.clause) + " does not match " + C.str());
      premise(G, apply_subst(*rho, cs[n.clause].body));
      break;
    }
    case Rule::kMuL: {
      auto [a, rest] = left();
      FormulaView v = expect(a, K::kAtom, "an atom");
      if (!defs.is_inductive(v.pred)) throw RuleError("muL on non-inductive predicate " + v.pred);
      if (!n.term) throw RuleError("muL needs an invariant");
      Type pt = *sig.lookup(v.pred);
      if (!free_vars(*n.term).empty()) throw RuleError("invariant not closed: " + n.term->str());
      if (type_of(*n.term) != pt) throw RuleError("invariant has the wrong type: " + n.term->str());
      FixedPointOperator op = to_fixed_point_operator(defs, v.pred);
      check_family(fsig.ground_tuples(op.arg_types), n.keys);
      Term bs = Term::app(op.op, *n.term);
      for (const auto& u : n.keys) premise({apply_all(bs, u)}, apply_all(*n.term, u));
      premise(plus(rest, {apply_all(*n.term, v.args)}), C);
      break;
    }
    case Rule::kMuR: {
      FormulaView v = expect(C, K::kAtom, "an atom");
      if (!defs.is_inductive(v.pred)) throw RuleError("muR on non-inductive predicate " + v.pred);
      FixedPointOperator op = to_fixed_point_operator(defs, v.pred);
      premise(G, apply_all(Term::app(op.op, Term::constant(v.pred, op.pred_type)), v.args));
      break;
    }
  }
  return out;
}

namespace {

// Nodes are immutable and carry their sequents, so a shared subderivation is
// checked once.
using Checked = std::set<const GroundNode*>;

CheckResult check_gnode(const DefinitionSet& defs, const FinitarySignature& fsig,
                        const GroundDerivation& d, const std::string& path, Checked& seen) {
  const GroundNode& n = *d;
  if (seen.count(&n)) return {};
  auto fail = [&](const std::string& why) {
    return CheckResult{false, path, std::string(rule_name(n.rule)) + ": " + why, n.seq.str()};
  };
  if (n.rule == Rule::kMc) {
    if (n.premises.empty()) return fail("rule-arity mismatch: mc needs a main premise");
    std::vector<Term> cuts, deltas;
    for (size_t i = 0; i + 1 < n.premises.size(); ++i) {
      cuts.push_back(n.premises[i]->seq.concl);
      deltas = plus(deltas, n.premises[i]->seq.hyps);
    }
    const GroundSequent& main = n.premises.back()->seq;
    try {
      std::vector<Term> gamma = minus(main.hyps, cuts);
      if (!same_multiset(plus(deltas, gamma), n.seq.hyps) || main.concl != n.seq.concl)
        return fail("partition mismatch: premises do not rebuild " + n.seq.str());
    } catch (const RuleError&) {
      return fail("main premise lacks a cut formula");
    }
  } else {
    std::vector<GroundSequent> ps;
    try {
      ps = ground_premises(defs, fsig, n);
    } catch (const Error& e) {
      return fail(e.what());
    }
    if (ps.size() != n.premises.size()) {
      std::string what = n.rule == Rule::kDeltaL ? "defL premise family incomplete"
                                                 : "rule-arity mismatch";
      return fail(what + ": expected " + std::to_string(ps.size()) + " premises, found " +
                  std::to_string(n.premises.size()));
    }
    for (size_t i = 0; i < ps.size(); ++i)
      if (!same_ground_sequent(ps[i], n.premises[i]->seq))
        return fail("premise " + std::to_string(i) + " is " + n.premises[i]->seq.str() +
                    ", expected " + ps[i].str());
  }
  for (size_t i = 0; i < n.premises.size(); ++i) {
    CheckResult r =
        check_gnode(defs, fsig, n.premises[i], path + "." + std::to_string(i), seen);
    if (!r) return r;
  }
  seen.insert(&n);
  return {};
}

}  // namespace

CheckResult check_ground_tree(const DefinitionSet& defs, const FinitarySignature& fsig,
                              const GroundDerivation& d, const GroundSequent& goal,
                              GroundCheckCache* cache) {
  auto check = [&](const Term& f) {
    if (!free_vars(f).empty()) return false;
    try {
      return infer_type(defs.signature(), {}, f).is_prop() && is_normal(f);
    } catch (const Error&) {
      return false;
    }
  };
  for (const Term& h : goal.hyps)
    if (!check(h)) return {false, "root", "ill-formed ground formula " + h.str(), ""};
  if (!check(goal.concl)) return {false, "root", "ill-formed ground formula " + goal.concl.str(), ""};
  if (!same_ground_sequent(d->seq, goal))
    return {false, "root", "derivation ends in " + d->seq.str() + ", expected " + goal.str(), ""};
  if (cache) return check_gnode(defs, fsig, d, "root", cache->verified);
  Checked seen;
  return check_gnode(defs, fsig, d, "root", seen);
}

CheckResult check_ground_derivation(const DefinitionSet& defs, const LevelMeasure& m,
                                    const FinitarySignature& fsig, const GroundDerivation& d,
                                    const GroundSequent& goal, bool unsafe_skip_strat,
                                    GroundCheckCache* cache) {
  if (!unsafe_skip_strat) {
    if (auto why = stratification_gate(defs, m))
      return {false, "", "definitions rejected by the stratification gate: " + *why, ""};
  }
  return check_ground_tree(defs, fsig, d, goal, cache);
}

namespace gmk {

namespace {
std::shared_ptr<GroundNode> fresh(Rule r, GroundSequent seq) {
  auto n = std::make_shared<GroundNode>(GroundNode{r, std::move(seq), {}, {}, 0, {}, 0, {}, {}});
  return n;
}
}  // namespace

GroundDerivation node(Rule r, GroundSequent seq, std::vector<GroundDerivation> premises) {
  auto n = fresh(r, std::move(seq));
  n->premises = std::move(premises);
  return n;
}

GroundDerivation weaken_with(const GroundDerivation& d, const std::vector<Term>& extra) {
  GroundDerivation cur = d;
  for (const Term& f : extra) {
    auto n = fresh(Rule::kWeaken, GroundSequent{plus(cur->seq.hyps, {f}), cur->seq.concl});
    n->principal = f;
    n->premises = {cur};
    cur = n;
  }
  return cur;
}

GroundDerivation contract_all(const GroundDerivation& d, const std::vector<Term>& dup) {
  GroundDerivation cur = d;
  for (const Term& f : dup) {
    auto n = fresh(Rule::kContract, GroundSequent{remove_one(cur->seq.hyps, f), cur->seq.concl});
    n->principal = f;
    n->premises = {cur};
    cur = n;
  }
  return cur;
}

GroundDerivation mc(std::vector<GroundDerivation> cuts, const GroundDerivation& main) {
  std::vector<Term> hs;
  std::vector<Term> cfs;
  for (const auto& c : cuts) {
    hs = plus(hs, c->seq.hyps);
    cfs.push_back(c->seq.concl);
  }
  hs = plus(hs, minus(main->seq.hyps, cfs));
  auto n = fresh(Rule::kMc, GroundSequent{hs, main->seq.concl});
  cuts.push_back(main);
  n->premises = std::move(cuts);
  return n;
}

}  // namespace gmk

namespace {

std::shared_ptr<GroundNode> make(Rule r, std::vector<Term> hyps, Term concl) {
  auto n = std::make_shared<GroundNode>(GroundNode{r, GroundSequent{std::move(hyps), std::move(concl)},
                                                   {}, {}, 0, {}, 0, {}, {}});
  return n;
}

}  // namespace

GroundDerivation identity(const DefinitionSet& defs, const FinitarySignature& fsig,
                          const Term& f) {
  FormulaView v = view(f);
  switch (v.kind) {
    case K::kTop: {
      auto n = make(Rule::kTopR, {f}, f);
      return n;
    }
    case K::kBot: {
      auto n = make(Rule::kBotL, {f}, f);
      n->principal = f;
      return n;
    }
    case K::kAtom:
      return make(Rule::kAx, {f}, f);
    case K::kAnd: {
      auto r = make(Rule::kAndR, {*v.lhs, *v.rhs}, f);
      r->premises = {gmk::weaken_with(identity(defs, fsig, *v.lhs), {*v.rhs}),
                     gmk::weaken_with(identity(defs, fsig, *v.rhs), {*v.lhs})};
      auto n = make(Rule::kAndL, {f}, f);
      n->principal = f;
      n->premises = {r};
      return n;
    }
    case K::kOr: {
      auto n = make(Rule::kOrL, {f}, f);
      n->principal = f;
      auto a = make(Rule::kOrR, {*v.lhs}, f);
      a->side = 0;
      a->premises = {identity(defs, fsig, *v.lhs)};
      auto b = make(Rule::kOrR, {*v.rhs}, f);
      b->side = 1;
      b->premises = {identity(defs, fsig, *v.rhs)};
      n->premises = {a, b};
      return n;
    }
    case K::kImp: {
      auto l = make(Rule::kImpL, {f, *v.lhs}, *v.rhs);
      l->principal = f;
      l->premises = {identity(defs, fsig, *v.lhs),
                     gmk::weaken_with(identity(defs, fsig, *v.rhs), {*v.lhs})};
      auto n = make(Rule::kImpR, {f}, f);
      n->premises = {l};
      return n;
    }
    case K::kAll: {
      auto n = make(Rule::kAllR, {f}, f);
      for (const Term& t : fsig.ground(*v.qtype)) {
        Term inst = open_with(v, t);
        auto l = make(Rule::kAllL, {f}, inst);
        l->principal = f;
        l->term = t;
        l->premises = {identity(defs, fsig, inst)};
        n->keys.push_back({t});
        n->premises.push_back(l);
      }
      return n;
    }
    case K::kEx: {
      auto n = make(Rule::kExL, {f}, f);
      n->principal = f;
      for (const Term& t : fsig.ground(*v.qtype)) {
        Term inst = open_with(v, t);
        auto r = make(Rule::kExR, {inst}, f);
        r->term = t;
        r->premises = {identity(defs, fsig, inst)};
        n->keys.push_back({t});
        n->premises.push_back(r);
      }
      return n;
    }
    case K::kOther:
      break;
  }
  throw Error("identity: not a formula: " + f.str());
}

namespace {

class GroundBuilder {
 public:
  GroundBuilder(const DefinitionSet& defs, const FinitarySignature& fsig)
      : defs_(defs), fsig_(fsig) {}

  GroundDerivation build(const ProofTree& t, const GroundSequent& goal, const std::string& path) {
    try {
      return build_node(t, goal, path);
    } catch (const ParseError&) {
      throw;
    } catch (const RuleError& e) {
      if (std::string(e.what()).rfind("at root", 0) == 0) throw;
      throw RuleError("at " + path + ": " + e.what());
    } catch (const Error& e) {
      if (std::string(e.what()).rfind("at root", 0) == 0) throw;
      throw RuleError("at " + path + ": " + e.what());
    }
  }

 private:
  Term parse(const TermRef& r, const Type& ty) {
    if (r.term) return normalize(*r.term);
    return parse_term(defs_.signature(), {}, r.text, ty);
  }

  Term hyp(const HypRef& h, const GroundSequent& goal) {
    if (h.index) {
      if (*h.index >= goal.hyps.size()) throw RuleError("hypothesis index out of range");
      return goal.hyps[*h.index];
    }
    return parse(*h.formula, Type::prop());
  }

  GroundDerivation build_node(const ProofTree& t, const GroundSequent& goal,
                              const std::string& path) {
    auto n = make(t.rule, goal.hyps, goal.concl);
    if (!t.hyps.empty()) n->principal = hyp(t.hyps[0], goal);
    if (t.rule == Rule::kWeaken && t.hyps.size() > 1) {
      ProofTree rest = t;
      rest.hyps.erase(rest.hyps.begin());
      GroundSequent g{remove_one(goal.hyps, *n->principal), goal.concl};
      n->premises = {build(rest, g, path + ".0")};
      return n;
    }
    if (t.rule == Rule::kMc) {
      std::vector<Term> cuts;
      for (const auto& c : t.cuts) cuts.push_back(parse(c, Type::prop()));
      std::vector<int> owner(goal.hyps.size(), -1);
      for (size_t k = 0; k < t.partition.size(); ++k)
        for (size_t i : t.partition[k]) {
          if (i >= goal.hyps.size() || owner[i] >= 0 || k >= cuts.size())
            throw RuleError("partition mismatch");
          owner[i] = static_cast<int>(k);
        }
      if (t.premises.size() != cuts.size() + 1) throw RuleError("rule-arity mismatch");
      std::vector<Term> gamma;
      for (size_t i = 0; i < goal.hyps.size(); ++i)
        if (owner[i] < 0) gamma.push_back(goal.hyps[i]);
      for (size_t k = 0; k < cuts.size(); ++k) {
        std::vector<Term> delta;
        for (size_t i = 0; i < goal.hyps.size(); ++i)
          if (owner[i] == static_cast<int>(k)) delta.push_back(goal.hyps[i]);
        n->premises.push_back(
            build(t.premises[k], GroundSequent{delta, cuts[k]}, path + "." + std::to_string(k)));
      }
      n->premises.push_back(build(t.premises.back(), GroundSequent{plus(gamma, cuts), goal.concl},
                                  path + "." + std::to_string(cuts.size())));
      return n;
    }
    if (t.side) n->side = *t.side;
    if (t.clause) n->clause = *t.clause;
    if (t.term) {
      Type ty = Type::prop();
      if (t.rule == Rule::kMuL) {
        FormulaView v = view(*n->principal);
        ty = *defs_.signature().lookup(v.pred);
      } else {
        FormulaView v = view(t.rule == Rule::kAllL ? *n->principal : goal.concl);
        if (!v.qtype) throw RuleError("witness given for a non-quantifier");
        ty = *v.qtype;
      }
      n->term = parse(*t.term, ty);
    }
    if (!t.family_keys.empty()) {
      std::vector<Type> tys;
      if (t.rule == Rule::kMuL) {
        tys = defs_.signature().lookup(view(*n->principal).pred)->arg_types();
      } else {
        FormulaView v = view(t.rule == Rule::kExL ? *n->principal : goal.concl);
        if (!v.qtype) throw RuleError("family given for a non-quantifier");
        tys = {*v.qtype};
      }
      for (const auto& k : t.family_keys) {
        if (k.size() != tys.size()) throw RuleError("family index has the wrong length");
        std::vector<Term> key;
        for (size_t i = 0; i < k.size(); ++i) key.push_back(parse(k[i], tys[i]));
        n->keys.push_back(key);
      }
    }
    if (t.rule == Rule::kDeltaL) {
      FormulaView v = view(*n->principal);
      if (v.kind == K::kAtom) {
        std::vector<Clause> cs = defs_.clauses_for_atom(*n->principal);
        for (size_t k = 0; k < cs.size(); ++k)
          if (pattern_match(cs[k].head, cs[k].vars, *n->principal)) n->clauses.push_back(k);
      }
    }
    if (t.rule == Rule::kDeltaR && !t.clause) {
      std::vector<Clause> cs = defs_.clauses_for_atom(goal.concl);
      size_t k = 0;
      while (k < cs.size() && !pattern_match(cs[k].head, cs[k].vars, goal.concl)) ++k;
      n->clause = k;
    }
    std::vector<GroundSequent> ps = ground_premises(defs_, fsig_, *n);
    if (ps.size() != t.premises.size())
      throw RuleError(std::string(rule_name(t.rule)) + ": rule-arity mismatch: expected " +
                      std::to_string(ps.size()) + " premises, found " +
                      std::to_string(t.premises.size()));
    for (size_t i = 0; i < ps.size(); ++i)
      n->premises.push_back(build(t.premises[i], ps[i], path + "." + std::to_string(i)));
    return n;
  }

  const DefinitionSet& defs_;
  const FinitarySignature& fsig_;
};

}  // namespace

GroundDerivation build_ground(const DefinitionSet& defs, const FinitarySignature& fsig,
                              const ProofTree& t, const GroundSequent& goal) {
  GroundBuilder b(defs, fsig);
  return b.build(t, goal, "root");
}

ProofTree ground_to_tree(const GroundDerivation& d) {
  const GroundNode& n = *d;
  ProofTree t;
  t.rule = n.rule;
  if (n.principal && n.rule != Rule::kAx) t.hyps.push_back(HypRef::of(*n.principal));
  if (n.term) t.term = TermRef::of(*n.term);
  if (n.rule == Rule::kDeltaR) t.clause = n.clause;
  if (n.rule == Rule::kOrR) t.side = n.side;
  for (const auto& k : n.keys) {
    std::vector<TermRef> key;
    for (const Term& x : k) key.push_back(TermRef::of(x));
    t.family_keys.push_back(key);
  }
  if (n.rule == Rule::kMc) {
    std::vector<bool> used(n.seq.hyps.size(), false);
    for (size_t i = 0; i + 1 < n.premises.size(); ++i) {
      t.cuts.push_back(TermRef::of(n.premises[i]->seq.concl));
      std::vector<size_t> group;
      for (const Term& h : n.premises[i]->seq.hyps) {
        for (size_t j = 0; j < n.seq.hyps.size(); ++j)
          if (!used[j] && n.seq.hyps[j] == h) {
            used[j] = true;
            group.push_back(j);
            break;
          }
      }
      t.partition.push_back(group);
    }
  }
  for (const auto& p : n.premises) t.premises.push_back(ground_to_tree(p));
  return t;
}

std::vector<Substitution> all_groundings(const FinitarySignature& fsig, const VarContext& ctx) {
  std::vector<Type> tys;
  for (const auto& [x, t] : ctx) tys.push_back(t);
  std::vector<Substitution> out;
  for (const auto& tuple : fsig.ground_tuples(tys)) {
    Substitution s(ctx);
    size_t i = 0;
    for (const auto& [x, t] : ctx) s.bind(x, tuple[i++]);
    out.push_back(s);
  }
  return out;
}

namespace {

class Interpreter {
 public:
  Interpreter(const DefinitionSet& defs, const FinitarySignature& fsig, InterpretStats* stats)
      : defs_(defs), fsig_(fsig), stats_(stats) {}

  // The source sequent of a node is fixed, so rule instances are cached per
  // node and ground results per node and grounding.
  GroundDerivation run(const ProofTree& t, const Sequent& s, const Substitution& delta) {
    std::string key;
    for (const auto& [x, ty] : s.ctx) key += delta.image(x).str() + ";";
    auto it = done_.find({&t, key});
    if (it != done_.end()) return it->second;
    GroundDerivation d = interpret(t, s, delta);
    done_.emplace(std::make_pair(&t, key), d);
    return d;
  }

 private:
  const RuleInstance& instance(const ProofTree& t, const Sequent& s) {
    auto it = instances_.find(&t);
    if (it == instances_.end()) it = instances_.emplace(&t, apply_rule(defs_, t, s)).first;
    return it->second;
  }

  GroundDerivation interpret(const ProofTree& t, const Sequent& s, const Substitution& delta) {
    const RuleInstance& inst = instance(t, s);
    if (inst.premises.size() != t.premises.size())
      throw Error("ground_interpret: the source derivation is not accepted");
    auto g = [&](const Term& f) { return apply_subst(delta, f); };
    std::vector<Term> hyps;
    for (const Term& h : s.hyps) hyps.push_back(g(h));
    auto n = make(t.rule, hyps, g(s.concl));
    if (!inst.principals.empty()) n->principal = g(inst.principals[0]);
    if (t.side) n->side = *t.side;

    switch (t.rule) {
      case Rule::kWeaken: {
        GroundDerivation p = run(t.premises[0], inst.premises[0], delta);
        std::vector<Term> extra;
        for (auto it = inst.principals.rbegin(); it != inst.principals.rend(); ++it)
          extra.push_back(g(*it));
        return gmk::weaken_with(p, extra);
      }
      case Rule::kAllR:
      case Rule::kExL: {
        const Sequent& ps = inst.premises[0];
        Type ty = *ps.ctx.lookup(inst.eigen);
        for (const Term& v : fsig_.ground(ty)) {
          Substitution d2(ps.ctx);
          for (const auto& [x, xt] : s.ctx) d2.bind(x, delta.image(x));
          d2.bind(inst.eigen, v);
          n->keys.push_back({v});
          n->premises.push_back(run(t.premises[0], ps, d2));
        }
        return n;
      }
      case Rule::kMuL: {
        n->term = inst.term;
        const Sequent& p1 = inst.premises[0];
        for (const Substitution& d1 : all_groundings(fsig_, p1.ctx)) {
          std::vector<Term> key;
          for (const auto& [x, xt] : p1.ctx) key.push_back(d1.image(x));
          n->keys.push_back(key);
          n->premises.push_back(run(t.premises[0], p1, d1));
        }
        n->premises.push_back(run(t.premises[1], inst.premises[1], delta));
        return n;
      }
      case Rule::kDeltaL: {
        size_t kept = 0;
        for (size_t j = 0; j < inst.premises.size(); ++j) {
          auto d2 = compatible(inst.thetas[j], delta, s.ctx);
          if (!d2) continue;
          ++kept;
          n->clauses.push_back(inst.clauses[j]);
          n->premises.push_back(run(t.premises[j], inst.premises[j], *d2));
        }
        if (stats_) stats_->delta_left.push_back({inst.premises.size(), kept});
        return n;
      }
      case Rule::kDeltaR:
        n->clause = inst.clauses[0];
        break;
      case Rule::kAllL:
      case Rule::kExR:
        n->term = g(*inst.term);
        break;
      default:
        break;
    }
    for (size_t i = 0; i < t.premises.size(); ++i)
      n->premises.push_back(run(t.premises[i], inst.premises[i], delta));
    return n;
  }

  // The grounding delta2 of range(theta) with theta;delta2 = delta, if any.
  std::optional<Substitution> compatible(const Substitution& theta, const Substitution& delta,
                                         const VarContext& ctx) {
    VarContext range = theta.range();
    std::vector<Term> pat, tgt;
    std::vector<Type> tys;
    for (const auto& [x, ty] : ctx) {
      pat.push_back(theta.image(x));
      tgt.push_back(delta.image(x));
      tys.push_back(ty);
    }
    Term tuple = Term::constant("#tuple", Type::arrows(tys, Type::prop()));
    auto rho = pattern_match(Term::apps(tuple, pat), range, Term::apps(tuple, tgt));
    return rho;
  }

  const DefinitionSet& defs_;
  const FinitarySignature& fsig_;
  InterpretStats* stats_;
  std::map<const ProofTree*, RuleInstance> instances_;
  std::map<std::pair<const ProofTree*, std::string>, GroundDerivation> done_;
};

}  // namespace

struct GroundInterpreter::Impl {
  Impl(const DefinitionSet& defs, const FinitarySignature& fsig, const ProofTree& tree,
       const Sequent& goal)
      : interp(defs, fsig, &stats), tree(tree), goal(goal) {}
  InterpretStats stats;
  Interpreter interp;
  const ProofTree& tree;
  Sequent goal;
};

GroundInterpreter::GroundInterpreter(const DefinitionSet& defs, const FinitarySignature& fsig,
                                     const ProofTree& tree, const Sequent& goal)
    : impl_(std::make_unique<Impl>(defs, fsig, tree, goal)) {
  for (const auto& [x, t] : goal.ctx) fsig.ground(t);
}

GroundInterpreter::~GroundInterpreter() = default;

GroundDerivation GroundInterpreter::run(const Substitution& delta) {
  for (const auto& [x, t] : impl_->goal.ctx)
    if (!delta.domain().contains(x)) throw Error("ground_interpret: '" + x + "' is not grounded");
  Substitution d = delta.restrict_to(impl_->goal.ctx);
  if (!d.grounding()) throw Error("ground_interpret: substitution is not grounding");
  return impl_->interp.run(impl_->tree, impl_->goal, d);
}

const InterpretStats& GroundInterpreter::stats() const { return impl_->stats; }

GroundDerivation ground_interpret(const DefinitionSet& defs, const FinitarySignature& fsig,
                                  const ProofTree& tree, const Sequent& goal,
                                  const Substitution& delta, InterpretStats* stats) {
  GroundInterpreter g(defs, fsig, tree, goal);
  GroundDerivation d = g.run(delta);
  if (stats) *stats = g.stats();
  return d;
}

namespace {

class GroundSearcher {
 public:
  GroundSearcher(const DefinitionSet& defs, const FinitarySignature& fsig)
      : defs_(defs), fsig_(fsig) {}

  GroundDerivation prove(const GroundSequent& s, int depth) {
    if (depth <= 0) return nullptr;
    const Term& C = s.concl;
    FormulaView c = view(C);
    if (c.kind == K::kTop) return make(Rule::kTopR, s.hyps, C);
    for (const Term& h : s.hyps)
      if (view(h).kind == K::kBot) {
        auto n = make(Rule::kBotL, s.hyps, C);
        n->principal = h;
        return n;
      }
    if (c.kind == K::kAtom && std::find(s.hyps.begin(), s.hyps.end(), C) != s.hyps.end())
      return gmk::weaken_with(make(Rule::kAx, {C}, C), remove_one(s.hyps, C));

    std::vector<std::shared_ptr<GroundNode>> cands;
    auto cand = [&](Rule r) {
      cands.push_back(make(r, s.hyps, C));
      return cands.back();
    };
    switch (c.kind) {
      case K::kAnd: cand(Rule::kAndR); break;
      case K::kImp: cand(Rule::kImpR); break;
      case K::kOr:
        cand(Rule::kOrR)->side = 0;
        cand(Rule::kOrR)->side = 1;
        break;
      case K::kAll: {
        auto n = cand(Rule::kAllR);
        for (const Term& t : fsig_.ground(*c.qtype)) n->keys.push_back({t});
        break;
      }
      case K::kEx:
        for (const Term& t : fsig_.ground(*c.qtype)) cand(Rule::kExR)->term = t;
        break;
      case K::kAtom:
        if (defs_.is_inductive(c.pred)) {
          cand(Rule::kMuR);
        } else if (defs_.is_defined(c.pred)) {
          size_t k = defs_.clauses_for_atom(C).size();
          for (size_t i = 0; i < k; ++i) cand(Rule::kDeltaR)->clause = i;
        }
        break;
      default:
        break;
    }
    for (size_t i = 0; i < s.hyps.size(); ++i) {
      const Term& h = s.hyps[i];
      if (std::find(s.hyps.begin(), s.hyps.begin() + static_cast<long>(i), h) !=
          s.hyps.begin() + static_cast<long>(i))
        continue;
      FormulaView v = view(h);
      auto on = [&](Rule r) {
        auto n = cand(r);
        n->principal = h;
        return n;
      };
      switch (v.kind) {
        case K::kAnd: on(Rule::kAndL); break;
        case K::kOr: on(Rule::kOrL); break;
        case K::kImp: on(Rule::kImpL); break;
        case K::kEx: {
          auto n = on(Rule::kExL);
          for (const Term& t : fsig_.ground(*v.qtype)) n->keys.push_back({t});
          break;
        }
        case K::kAll:
          for (const Term& t : fsig_.ground(*v.qtype)) on(Rule::kAllL)->term = t;
          break;
        case K::kAtom:
          if (defs_.is_defined(v.pred) && !defs_.is_inductive(v.pred)) {
            auto n = on(Rule::kDeltaL);
            std::vector<Clause> cs = defs_.clauses_for_atom(h);
            for (size_t k = 0; k < cs.size(); ++k)
              if (pattern_match(cs[k].head, cs[k].vars, h)) n->clauses.push_back(k);
          }
          break;
        default:
          break;
      }
    }
    for (auto& n : cands) {
      std::vector<GroundSequent> ps;
      try {
        ps = ground_premises(defs_, fsig_, *n);
      } catch (const Error&) {
        continue;
      }
      bool ok = true;
      for (const auto& p : ps) {
        GroundDerivation sub = prove(p, depth - 1);
        if (!sub) {
          ok = false;
          break;
        }
        n->premises.push_back(sub);
      }
      if (ok) return n;
    }
    return nullptr;
  }

 private:
  const DefinitionSet& defs_;
  const FinitarySignature& fsig_;
};

}  // namespace

GroundDerivation ground_search(const DefinitionSet& defs, const FinitarySignature& fsig,
                               const GroundSequent& goal, int depth) {
  GroundSearcher s(defs, fsig);
  for (int d = 1; d <= depth; ++d)
    if (auto r = s.prove(goal, d)) return r;
  return nullptr;
}

NoBotReport verify_no_bot(const DefinitionSet& defs, const FinitarySignature& fsig, int depth) {
  NoBotReport r;
  if (depth <= 0) {
    r.cases.push_back("depth 0: empty search");
    return r;
  }
  GroundSequent goal{{}, mk::bot()};
  // Each rule against the root sequent |- false.
  r.cases = {
      "topR: conclusion is false, not true",
      "andR, orR, impR, allR, exR: conclusion is not a compound formula",
      "defR, muR: conclusion is not an atom",
      "ax: no hypothesis",
      "botL, andL, orL, impL, allL, exL, defL, muL: no hypothesis",
      "weaken, contract: no hypothesis",
  };
  GroundDerivation found = ground_search(defs, fsig, goal, depth);
  if (found) {
    r.ok = false;
    r.counterexample = found;
  } else {
    r.cases.push_back("no applicable rule at root");
  }
  return r;
}

}  // namespace ldmu
