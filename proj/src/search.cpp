#include "ldmu/enumerate.hpp"
#include "ldmu/sequent.hpp"

namespace ldmu {

namespace {

class Searcher {
 public:
  Searcher(const DefinitionSet& defs, const SearchOptions& opts) : defs_(defs), opts_(opts) {}

  std::optional<ProofTree> prove(const Sequent& s, int depth) {
    if (depth <= 0) return std::nullopt;
    using K = FormulaView::Kind;
    FormulaView c = view(s.concl);

    if (c.kind == K::kTop) return leaf(Rule::kTopR);
    for (size_t i = 0; i < s.hyps.size(); ++i)
      if (view(s.hyps[i]).kind == K::kBot) {
        ProofTree t = leaf(Rule::kBotL);
        t.hyps.push_back(HypRef::at(i));
        return t;
      }
    if (c.kind == K::kAtom) {
      for (size_t i = 0; i < s.hyps.size(); ++i) {
        if (s.hyps[i] != s.concl) continue;
        ProofTree ax = leaf(Rule::kAx);
        if (s.hyps.size() == 1) return ax;
        ProofTree w = leaf(Rule::kWeaken);
        for (size_t j = 0; j < s.hyps.size(); ++j)
          if (j != i) w.hyps.push_back(HypRef::of(s.hyps[j]));
        w.premises.push_back(ax);
        return w;
      }
    }

    std::vector<ProofTree> cands;
    switch (c.kind) {
      case K::kAnd: cands.push_back(leaf(Rule::kAndR)); break;
      case K::kImp: cands.push_back(leaf(Rule::kImpR)); break;
      case K::kAll: cands.push_back(leaf(Rule::kAllR)); break;
      case K::kOr:
        for (int side : {0, 1}) {
          ProofTree t = leaf(Rule::kOrR);
          t.side = side;
          cands.push_back(t);
        }
        break;
      case K::kEx:
        for (const Term& w : witnesses(s.ctx, *c.qtype)) {
          ProofTree t = leaf(Rule::kExR);
          t.term = TermRef::of(w);
          cands.push_back(t);
        }
        break;
      case K::kAtom:
        if (defs_.is_inductive(c.pred)) {
          cands.push_back(leaf(Rule::kMuR));
        } else if (defs_.is_defined(c.pred)) {
          size_t n = defs_.clauses_for_atom(s.concl).size();
          for (size_t k = 0; k < n; ++k) {
            ProofTree t = leaf(Rule::kDeltaR);
            t.clause = k;
            cands.push_back(t);
          }
        }
        break;
      default: break;
    }
    for (size_t i = 0; i < s.hyps.size(); ++i) {
      bool dup = false;
      for (size_t j = 0; j < i; ++j) dup = dup || s.hyps[j] == s.hyps[i];
      if (dup) continue;
      FormulaView h = view(s.hyps[i]);
      auto on = [&](Rule r) {
        ProofTree t = leaf(r);
        t.hyps.push_back(HypRef::at(i));
        return t;
      };
      switch (h.kind) {
        case K::kAnd: cands.push_back(on(Rule::kAndL)); break;
        case K::kOr: cands.push_back(on(Rule::kOrL)); break;
        case K::kEx: cands.push_back(on(Rule::kExL)); break;
        case K::kImp: cands.push_back(on(Rule::kImpL)); break;
        case K::kAll:
          for (const Term& w : witnesses(s.ctx, *h.qtype)) {
            ProofTree t = on(Rule::kAllL);
            t.term = TermRef::of(w);
            cands.push_back(t);
          }
          break;
        case K::kAtom:
          if (defs_.is_inductive(h.pred)) {
            auto it = opts_.invariants.find(h.pred);
            if (it != opts_.invariants.end()) {
              ProofTree t = on(Rule::kMuL);
              t.term = TermRef::of(it->second);
              cands.push_back(t);
            }
          } else if (defs_.is_defined(h.pred)) {
            cands.push_back(on(Rule::kDeltaL));
          }
          break;
        default: break;
      }
    }

    for (ProofTree& t : cands) {
      RuleInstance inst;
      try {
        inst = apply_rule(defs_, t, s);
      } catch (const Error&) {
        continue;
      }
      bool ok = true;
      for (const Sequent& p : inst.premises) {
        auto sub = prove(p, depth - 1);
        if (!sub) {
          ok = false;
          break;
        }
        t.premises.push_back(std::move(*sub));
      }
      if (ok) return t;
    }
    return std::nullopt;
  }

 private:
  static ProofTree leaf(Rule r) {
    ProofTree t;
    t.rule = r;
    return t;
  }

  std::vector<Term> witnesses(const VarContext& ctx, const Type& ty) {
    std::vector<Term> out;
    for (const auto& [x, t] : ctx)
      if (t == ty) out.push_back(normalize(Term::var(x, t)));
    for (const Term& g : enumerate_ground(defs_.signature(), ty, opts_.witness_size).terms)
      out.push_back(g);
    return out;
  }

  const DefinitionSet& defs_;
  const SearchOptions& opts_;
};

}  // namespace

std::optional<ProofTree> search_bounded(const DefinitionSet& defs, const Sequent& goal,
                                        int depth, const SearchOptions& opts) {
  Searcher s(defs, opts);
  for (int d = 1; d <= depth; ++d)
    if (auto t = s.prove(goal, d)) return t;
  return std::nullopt;
}

}  // namespace ldmu
