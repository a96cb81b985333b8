#include <algorithm>
#include <set>

#include "ldmu/sequent.hpp"
#include "ldmu/syntax.hpp"

namespace ldmu {

namespace {

std::string join(const std::vector<Term>& fs) {
  std::string out;
  for (size_t i = 0; i < fs.size(); ++i) out += (i ? ", " : "") + fs[i].str();
  return out;
}

}  // namespace

std::string Sequent::str() const {
  std::string out = ctx.str();
  out += (out.empty() ? "" : " ") + std::string("; ");
  out += join(hyps);
  out += (hyps.empty() ? "" : " ") + std::string("|- ") + concl.str();
  return out;
}

bool same_multiset(const std::vector<Term>& a, const std::vector<Term>& b) {
  if (a.size() != b.size()) return false;
  std::vector<Term> x = a, y = b;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return x == y;
}

bool same_sequent(const Sequent& a, const Sequent& b) {
  if (a.ctx.size() != b.ctx.size()) return false;
  for (const auto& [x, ty] : a.ctx)
    if (b.ctx.lookup(x) != ty) return false;
  return a.concl == b.concl && same_multiset(a.hyps, b.hyps);
}

namespace {

constexpr const char* kRuleNames[] = {
    "topR", "botL", "andL", "andR", "orL", "orR", "impL", "impR", "allL", "allR",
    "exL",  "exR",  "ax",   "mc",   "weaken", "contract", "defL", "defR", "muL", "muR"};

}  // namespace

const char* rule_name(Rule r) { return kRuleNames[static_cast<int>(r)]; }

std::optional<Rule> rule_from_name(const std::string& s) {
  for (int i = 0; i < static_cast<int>(std::size(kRuleNames)); ++i)
    if (s == kRuleNames[i]) return static_cast<Rule>(i);
  return std::nullopt;
}

std::string HypRef::str() const {
  if (index) return std::to_string(*index);
  return formula->str();
}

size_t ProofTree::size() const {
  size_t n = 1;
  for (const auto& p : premises) n += p.size();
  return n;
}

std::string fresh_eigen(const Signature& sig, const VarContext& ctx, const std::string& hint) {
  std::string base = hint.empty() ? "x" : hint;
  if (!ctx.contains(base) && !sig.contains(base) && !logic::is_logical(base)) return base;
  for (int i = 1;; ++i) {
    std::string c = base + std::to_string(i);
    if (!ctx.contains(c) && !sig.contains(c)) return c;
  }
}

void validate_sequent(const Signature& sig, const Sequent& s) {
  auto check = [&](const Term& f) {
    Type t = [&] {
      try {
        return infer_type(sig, s.ctx, f);
      } catch (const Error& e) {
        throw RuleError(std::string("ill-formed sequent: ") + e.what());
      }
    }();
    if (!t.is_prop()) throw RuleError("ill-formed sequent: " + f.str() + " is not a formula");
    if (!is_normal(f)) throw RuleError("ill-formed sequent: " + f.str() + " is not normal");
  };
  for (const auto& h : s.hyps) check(h);
  check(s.concl);
}

namespace {

Term resolve_term(const Signature& sig, const VarContext& ctx, const TermRef& r,
                  const Type& expected, const char* what) {
  try {
    if (r.term) {
      Type t = infer_type(sig, ctx, *r.term);
      if (t != expected)
        throw Error("has type " + t.str() + ", expected " + expected.str());
      return normalize(*r.term);
    }
    return parse_term(sig, ctx, r.text, expected);
  } catch (const Error& e) {
    throw RuleError(std::string(what) + " '" + r.str() + "': " + e.what());
  }
}

Term resolve_formula(const Signature& sig, const VarContext& ctx, const TermRef& r,
                     const char* what) {
  return resolve_term(sig, ctx, r, Type::prop(), what);
}

size_t resolve_hyp(const Signature& sig, const Sequent& s, const HypRef& h) {
  if (h.index) {
    if (*h.index >= s.hyps.size())
      throw RuleError("hypothesis index " + std::to_string(*h.index) + " out of range");
    return *h.index;
  }
  Term f = resolve_formula(sig, s.ctx, *h.formula, "hypothesis");
  for (size_t i = 0; i < s.hyps.size(); ++i)
    if (s.hyps[i] == f) return i;
  throw RuleError("no hypothesis " + f.str());
}

std::vector<Term> without(const std::vector<Term>& hs, size_t i) {
  std::vector<Term> out = hs;
  out.erase(out.begin() + static_cast<long>(i));
  return out;
}

std::vector<Term> with(std::vector<Term> hs, const Term& f) {
  hs.push_back(f);
  return hs;
}

const FormulaView& expect_kind(const FormulaView& v, FormulaView::Kind k, const Term& f,
                               const char* what) {
  if (v.kind != k) throw RuleError(std::string("expected ") + what + ", found " + f.str());
  return v;
}

Term open_with(const FormulaView& v, const Term& t) {
  return normalize(open_quantifier(*v.qbody, t));
}

Term apply_all(const Term& f, const std::vector<Term>& args) {
  return normalize(Term::apps(f, args));
}

}  // namespace

RuleInstance apply_rule(const DefinitionSet& defs, const ProofTree& node, const Sequent& goal) {
  const Signature& sig = defs.signature();
  RuleInstance out;
  using K = FormulaView::Kind;
  auto one_hyp = [&]() -> size_t {
    if (node.hyps.size() != 1) throw RuleError("left rule needs exactly one hypothesis selector");
    size_t i = resolve_hyp(sig, goal, node.hyps[0]);
    out.principals.push_back(goal.hyps[i]);
    return i;
  };
  auto premise = [&](VarContext ctx, std::vector<Term> hyps, Term concl) {
    out.premises.push_back(Sequent{std::move(ctx), std::move(hyps), std::move(concl)});
  };
  const VarContext& X = goal.ctx;
  const Term& C = goal.concl;
  if (!node.family_keys.empty()) throw RuleError("premise families only occur in ground derivations");

  switch (node.rule) {
    case Rule::kTopR:
      expect_kind(view(C), K::kTop, C, "true");
      break;
    case Rule::kBotL: {
      size_t i = one_hyp();
      expect_kind(view(goal.hyps[i]), K::kBot, goal.hyps[i], "false");
      break;
    }
    case Rule::kAndL: {
      size_t i = one_hyp();
      FormulaView v = view(goal.hyps[i]);
      expect_kind(v, K::kAnd, goal.hyps[i], "a conjunction");
      premise(X, with(with(without(goal.hyps, i), *v.lhs), *v.rhs), C);
      break;
    }
    case Rule::kAndR: {
      FormulaView v = view(C);
      expect_kind(v, K::kAnd, C, "a conjunction");
      premise(X, goal.hyps, *v.lhs);
      premise(X, goal.hyps, *v.rhs);
      break;
    }
    case Rule::kOrL: {
      size_t i = one_hyp();
      FormulaView v = view(goal.hyps[i]);
      expect_kind(v, K::kOr, goal.hyps[i], "a disjunction");
      premise(X, with(without(goal.hyps, i), *v.lhs), C);
      premise(X, with(without(goal.hyps, i), *v.rhs), C);
      break;
    }
    case Rule::kOrR: {
      FormulaView v = view(C);
      expect_kind(v, K::kOr, C, "a disjunction");
      if (!node.side) throw RuleError("orR needs a side");
      premise(X, goal.hyps, *node.side == 0 ? *v.lhs : *v.rhs);
      break;
    }
    case Rule::kImpL: {
      size_t i = one_hyp();
      FormulaView v = view(goal.hyps[i]);
      expect_kind(v, K::kImp, goal.hyps[i], "an implication");
      premise(X, without(goal.hyps, i), *v.lhs);
      premise(X, with(without(goal.hyps, i), *v.rhs), C);
      break;
    }
    case Rule::kImpR: {
      FormulaView v = view(C);
      expect_kind(v, K::kImp, C, "an implication");
      premise(X, with(goal.hyps, *v.lhs), *v.rhs);
      break;
    }
    case Rule::kAllL:
    case Rule::kExR: {
      bool left = node.rule == Rule::kAllL;
      size_t i = left ? one_hyp() : 0;
      const Term& f = left ? goal.hyps[i] : C;
      FormulaView v = view(f);
      expect_kind(v, left ? K::kAll : K::kEx, f, left ? "a universal" : "an existential");
      if (!node.term) throw RuleError("missing witness");
      Term w = resolve_term(sig, X, *node.term, *v.qtype, "ill-typed witness");
      out.term = w;
      if (left)
        premise(X, with(without(goal.hyps, i), open_with(v, w)), C);
      else
        premise(X, goal.hyps, open_with(v, w));
      break;
    }
    case Rule::kAllR:
    case Rule::kExL: {
      bool left = node.rule == Rule::kExL;
      size_t i = left ? one_hyp() : 0;
      const Term& f = left ? goal.hyps[i] : C;
      FormulaView v = view(f);
      expect_kind(v, left ? K::kEx : K::kAll, f, left ? "an existential" : "a universal");
      std::string y;
      if (node.name.empty()) {
        y = fresh_eigen(sig, X, v.qbody->name());
      } else {
        y = node.name;
        if (X.contains(y) || sig.contains(y) || logic::is_logical(y))
          throw RuleError("eigenvariable not fresh: " + y);
      }
      out.eigen = y;
      Term yv = normalize(Term::var(y, *v.qtype));
      VarContext X2 = X.extended(y, *v.qtype);
      if (left)
        premise(X2, with(without(goal.hyps, i), open_with(v, yv)), C);
      else
        premise(X2, goal.hyps, open_with(v, yv));
      break;
    }
    case Rule::kAx: {
      if (!is_atom(C)) throw RuleError("Ax on non-atomic formula " + C.str());
      if (goal.hyps.size() != 1 || goal.hyps[0] != C)
        throw RuleError("Ax needs exactly the hypothesis " + C.str());
      out.principals.push_back(C);
      break;
    }
    case Rule::kWeaken: {
      if (node.hyps.empty()) throw RuleError("weaken needs a hypothesis selector");
      Sequent cur = goal;
      for (const auto& h : node.hyps) {
        size_t i = resolve_hyp(sig, cur, h);
        out.principals.push_back(cur.hyps[i]);
        cur.hyps = without(cur.hyps, i);
      }
      out.premises.push_back(cur);
      break;
    }
    case Rule::kContract: {
      size_t i = one_hyp();
      premise(X, with(goal.hyps, goal.hyps[i]), C);
      break;
    }
    case Rule::kMc: {
      std::vector<Term> cuts;
      for (const auto& c : node.cuts) cuts.push_back(resolve_formula(sig, X, c, "cut formula"));
      if (node.partition.size() > cuts.size())
        throw RuleError("partition mismatch: more groups than cut formulas");
      std::vector<int> owner(goal.hyps.size(), -1);
      for (size_t k = 0; k < node.partition.size(); ++k) {
        for (size_t i : node.partition[k]) {
          if (i >= goal.hyps.size())
            throw RuleError("partition mismatch: index " + std::to_string(i) + " out of range");
          if (owner[i] >= 0)
            throw RuleError("partition mismatch: hypothesis " + std::to_string(i) +
                            " assigned twice");
          owner[i] = static_cast<int>(k);
        }
      }
      for (size_t k = 0; k < cuts.size(); ++k) {
        std::vector<Term> delta;
        for (size_t i = 0; i < goal.hyps.size(); ++i)
          if (owner[i] == static_cast<int>(k)) delta.push_back(goal.hyps[i]);
        premise(X, delta, cuts[k]);
      }
      std::vector<Term> gamma;
      for (size_t i = 0; i < goal.hyps.size(); ++i)
        if (owner[i] < 0) gamma.push_back(goal.hyps[i]);
      for (const auto& c : cuts) gamma.push_back(c);
      premise(X, gamma, C);
      out.cuts = cuts;
      break;
    }
    case Rule::kDeltaL: {
      size_t i = one_hyp();
      const Term& a = goal.hyps[i];
      FormulaView v = view(a);
      expect_kind(v, K::kAtom, a, "an atom");
      auto kind = defs.kind_of(v.pred);
      if (!kind) throw RuleError("defL on undefined predicate " + v.pred);
      if (*kind == PredKind::kInductive)
        throw RuleError("defL on inductive predicate " + v.pred + " (use muL)");
      std::vector<Clause> cs = defs.clauses_for_atom(a);
      std::vector<Term> rest = without(goal.hyps, i);
      for (size_t k = 0; k < cs.size(); ++k) {
        std::optional<DefnInstance> inst;
        try {
          inst = defn_unify(cs[k], a, X);
        } catch (const Error& e) {
          throw RuleError(std::string("defL: ") + e.what());
        }
        if (!inst) continue;
        std::vector<Term> hs;
        for (const auto& h : rest) hs.push_back(apply_subst(inst->theta, h));
        hs.push_back(inst->body);
        premise(inst->theta.range(), hs, apply_subst(inst->theta, C));
        out.clauses.push_back(k);
        out.thetas.push_back(inst->theta);
      }
      break;
    }
    case Rule::kDeltaR: {
      FormulaView v = view(C);
      expect_kind(v, K::kAtom, C, "an atom");
      auto kind = defs.kind_of(v.pred);
      if (!kind) throw RuleError("defR on undefined predicate " + v.pred);
      if (*kind == PredKind::kInductive)
        throw RuleError("defR on inductive predicate " + v.pred + " (use muR)");
      std::vector<Clause> cs = defs.clauses_for_atom(C);
      std::optional<Term> body;
      size_t k = 0;
      Substitution id(X);
      if (node.clause) {
        k = *node.clause;
        if (k >= cs.size()) throw RuleError("defR clause " + std::to_string(k) + " out of range");
        body = defn_expand(cs[k], C, id);
        if (!body) throw RuleError("defR clause " + std::to_string(k) + " does not match " + C.str());
      } else {
        for (k = 0; k < cs.size() && !body; ++k) body = defn_expand(cs[k], C, id);
        if (!body) throw RuleError("defR: no clause matches " + C.str());
        --k;
      }
      out.clauses.push_back(k);
      premise(X, goal.hyps, *body);
      break;
    }
    case Rule::kMuL: {
      size_t i = one_hyp();
      const Term& a = goal.hyps[i];
      FormulaView v = view(a);
      expect_kind(v, K::kAtom, a, "an atom");
      if (!defs.is_inductive(v.pred)) throw RuleError("muL on non-inductive predicate " + v.pred);
      if (!node.term) throw RuleError("muL needs an invariant");
      Type pt = *sig.lookup(v.pred);
      if (node.term->term && !free_vars(*node.term->term).empty())
        throw RuleError("invariant not closed: " + node.term->str());
      Term s = resolve_term(sig, X, *node.term, pt, "invariant");
      if (!free_vars(s).empty()) throw RuleError("invariant not closed: " + s.str());
      out.term = s;
      FixedPointOperator op = to_fixed_point_operator(defs, v.pred);
      VarContext xs;
      std::vector<Term> xv;
      for (size_t j = 0; j < op.arg_types.size(); ++j) {
        std::string n = fresh_eigen(sig, xs, "x" + std::to_string(j + 1));
        xs.add(n, op.arg_types[j]);
        xv.push_back(normalize(Term::var(n, op.arg_types[j])));
      }
      premise(xs, {apply_all(Term::app(op.op, s), xv)}, apply_all(s, xv));
      premise(X, with(without(goal.hyps, i), apply_all(s, v.args)), C);
      break;
    }
    case Rule::kMuR: {
      FormulaView v = view(C);
      expect_kind(v, K::kAtom, C, "an atom");
      if (!defs.is_inductive(v.pred)) throw RuleError("muR on non-inductive predicate " + v.pred);
      FixedPointOperator op = to_fixed_point_operator(defs, v.pred);
      Term p = Term::constant(v.pred, op.pred_type);
      premise(X, goal.hyps, apply_all(Term::app(op.op, p), v.args));
      break;
    }
  }
  return out;
}

std::optional<std::string> stratification_gate(const DefinitionSet& defs, const LevelMeasure& m) {
  for (const auto& ic : check_inductive_restriction(defs, m))
    if (!ic.ok) return ic.pred + ": " + ic.reason;
  StratReport r = check_ground_stratified(defs, m);
  for (const auto& c : r.clauses) {
    if (c.verdict == Verdict::kVerified) continue;
    std::string s = "clause " + c.clause + " is " + to_string(c.verdict) +
                    " for ground stratification";
    if (!c.witness.empty()) s += ": " + c.witness;
    return s;
  }
  return std::nullopt;
}

namespace {

CheckResult check_node(const DefinitionSet& defs, const ProofTree& node, const Sequent& goal,
                       const std::string& path) {
  RuleInstance inst;
  try {
    inst = apply_rule(defs, node, goal);
  } catch (const Error& e) {
    return {false, path, std::string(rule_name(node.rule)) + ": " + e.what(), goal.str()};
  }
  if (inst.premises.size() != node.premises.size()) {
    std::string what = node.rule == Rule::kDeltaL ? "defL premise family incomplete"
                                                  : "rule-arity mismatch";
    if (node.rule == Rule::kDeltaL && node.premises.size() > inst.premises.size())
      what = "defL has extra premises";
    return {false, path,
            std::string(rule_name(node.rule)) + ": " + what + ": expected " +
                std::to_string(inst.premises.size()) + " premises, found " +
                std::to_string(node.premises.size()),
            goal.str()};
  }
  for (size_t i = 0; i < node.premises.size(); ++i) {
    CheckResult r = check_node(defs, node.premises[i], inst.premises[i],
                               path + "." + std::to_string(i));
    if (!r) return r;
  }
  return {};
}

}  // namespace

CheckResult check_tree(const DefinitionSet& defs, const ProofTree& tree, const Sequent& goal) {
  try {
    validate_sequent(defs.signature(), goal);
  } catch (const Error& e) {
    return {false, "root", e.what(), ""};
  }
  return check_node(defs, tree, goal, "root");
}

CheckResult check_proof(const DefinitionSet& defs, const LevelMeasure& m, const ProofTree& tree,
                        const Sequent& goal, bool unsafe_skip_strat) {
  if (!unsafe_skip_strat) {
    if (auto why = stratification_gate(defs, m))
      return {false, "", "definitions rejected by the stratification gate: " + *why, ""};
  }
  return check_tree(defs, tree, goal);
}

}  // namespace ldmu
