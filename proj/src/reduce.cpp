#include <algorithm>

#include "ldmu/ground.hpp"

namespace ldmu {

namespace {

using K = FormulaView::Kind;
using Node = std::shared_ptr<GroundNode>;

std::vector<Term> remove_one(std::vector<Term> hs, const Term& f) {
  auto it = std::find(hs.begin(), hs.end(), f);
  if (it == hs.end()) throw Error("reduction: missing hypothesis " + f.str());
  hs.erase(it);
  return hs;
}

std::vector<Term> minus(std::vector<Term> hs, const std::vector<Term>& sub) {
  for (const Term& f : sub) hs = remove_one(hs, f);
  return hs;
}

bool contains(const std::vector<Term>& hs, const Term& f) {
  return std::find(hs.begin(), hs.end(), f) != hs.end();
}

Node copy(const GroundDerivation& d) { return std::make_shared<GroundNode>(*d); }

Node rebuild(const GroundDerivation& d, GroundSequent seq, std::vector<GroundDerivation> ps) {
  Node n = copy(d);
  n->seq = std::move(seq);
  n->premises = std::move(ps);
  return n;
}

bool is_left_rule(Rule r) {
  switch (r) {
    case Rule::kBotL:
    case Rule::kAndL:
    case Rule::kOrL:
    case Rule::kImpL:
    case Rule::kAllL:
    case Rule::kExL:
    case Rule::kDeltaL:
    case Rule::kMuL:
    case Rule::kWeaken:
    case Rule::kContract:
      return true;
    default:
      return false;
  }
}

bool is_right_rule(Rule r) {
  switch (r) {
    case Rule::kTopR:
    case Rule::kAndR:
    case Rule::kOrR:
    case Rule::kImpR:
    case Rule::kAllR:
    case Rule::kExR:
    case Rule::kDeltaR:
    case Rule::kMuR:
      return true;
    default:
      return false;
  }
}

// Premises sharing the conclusion of a left rule.
bool is_major(const GroundNode& n, size_t k) {
  if (n.rule == Rule::kImpL) return k == 1;
  if (n.rule == Rule::kMuL) return k + 1 == n.premises.size();
  return true;
}

// Premises that keep the context of the conclusion.
bool carries_context(const GroundNode& n, size_t k) {
  return n.rule != Rule::kMuL || k + 1 == n.premises.size();
}

std::vector<GroundDerivation> replace_at(std::vector<GroundDerivation> v, size_t i,
                                         const GroundDerivation& x) {
  v[i] = x;
  return v;
}

std::vector<GroundDerivation> erase_at(std::vector<GroundDerivation> v, size_t i) {
  v.erase(v.begin() + static_cast<long>(i));
  return v;
}

std::vector<Term> hyps_of(const std::vector<GroundDerivation>& ds) {
  std::vector<Term> out;
  for (const auto& d : ds) out.insert(out.end(), d->seq.hyps.begin(), d->seq.hyps.end());
  return out;
}

class Reducer {
 public:
  Reducer(const DefinitionSet& defs, const FinitarySignature& fsig) : defs_(defs), fsig_(fsig) {}

  Reduct step(const GroundDerivation& d) {
    if (d->rule != Rule::kMc) throw Error("reduce_step: derivation does not end in mc");
    std::vector<GroundDerivation> cuts(d->premises.begin(), d->premises.end() - 1);
    const GroundDerivation& main = d->premises.back();
    if (cuts.empty()) return {main, not_principal_case(main)};

    std::optional<size_t> pi;
    if (is_left_rule(main->rule) && main->principal)
      for (size_t i = 0; i < cuts.size() && !pi; ++i)
        if (cuts[i]->seq.concl == *main->principal) pi = i;
    if (!pi) return right_side(d, cuts, main);

    size_t i = *pi;
    if (main->rule == Rule::kWeaken) {
      GroundDerivation r = gmk::mc(erase_at(cuts, i), main->premises[0]);
      return {gmk::weaken_with(r, cuts[i]->seq.hyps), cases::kStructural};
    }
    if (main->rule == Rule::kContract) {
      std::vector<GroundDerivation> cs = cuts;
      cs.push_back(cuts[i]);
      GroundDerivation r = gmk::mc(cs, main->premises[0]);
      return {gmk::contract_all(r, cuts[i]->seq.hyps), cases::kStructural};
    }
    if (main->rule == Rule::kMuL) return inductive(cuts, main, i);

    const GroundDerivation& left = cuts[i];
    if (left->rule == Rule::kAx) return {gmk::mc(erase_at(cuts, i), main), cases::kLeftAxiom};
    if (left->rule == Rule::kMc) {
      std::vector<GroundDerivation> xi(left->premises.begin(), left->premises.end() - 1);
      GroundDerivation inner = gmk::mc(replace_at(cuts, i, left->premises.back()), main);
      return {gmk::mc(xi, inner), cases::kLeftMulticut};
    }
    if (is_right_rule(left->rule)) return essential(cuts, main, i);
    return {left_commute(d, cuts, main, i), cases::kLeftCommutative};
  }

  GroundDerivation unfold(const GroundDerivation& psi, const std::string& pred, const Term& s,
                          const std::map<std::vector<Term>, GroundDerivation>& family) {
    const Term& D = psi->seq.concl;
    if (!mentions_constant(D, pred)) return psi;
    Term D2 = subst_pred(D, pred, s);
    GroundSequent seq{psi->seq.hyps, D2};
    FormulaView v = view(D);
    if (v.kind == K::kAtom && v.pred == pred) {
      auto fam = family.find(v.args);
      if (fam == family.end()) throw Error("unfold: invariant family lacks " + D.str());
      if (psi->rule == Rule::kMuR) {
        GroundDerivation q = unfold(psi->premises[0], pred, s, family);
        return gmk::mc({q}, fam->second);
      }
      if (psi->rule == Rule::kAx) {
        Node n = copy(psi);
        n->rule = Rule::kMuL;
        n->seq = seq;
        n->principal = D;
        n->term = s;
        n->keys.clear();
        n->premises.clear();
        for (const auto& [k, p] : family) {
          n->keys.push_back(k);
          n->premises.push_back(p);
        }
        n->premises.push_back(identity(defs_, fsig_, D2));
        return n;
      }
    }
    std::vector<GroundDerivation> ps = psi->premises;
    if (psi->rule == Rule::kMc) {
      ps.back() = unfold(ps.back(), pred, s, family);
    } else if (is_right_rule(psi->rule)) {
      if (psi->rule == Rule::kImpR && mentions_constant(*v.lhs, pred))
        throw Error("unfold: " + pred + " occurs negatively in " + D.str());
      for (auto& p : ps) p = unfold(p, pred, s, family);
    } else if (is_left_rule(psi->rule)) {
      for (size_t k = 0; k < ps.size(); ++k)
        if (is_major(*psi, k)) ps[k] = unfold(ps[k], pred, s, family);
    } else {
      throw Error("unfold: cannot transform " + std::string(rule_name(psi->rule)) + " on " +
                  D.str());
    }
    return rebuild(psi, seq, ps);
  }

 private:
  static Term subst_pred(const Term& f, const std::string& pred, const Term& s) {
    return normalize(replace_const(f, pred, s));
  }

  const char* not_principal_case(const GroundDerivation& main) {
    if (main->rule == Rule::kAx) return cases::kRightAxiom;
    if (main->rule == Rule::kMc) return cases::kRightMulticut;
    return cases::kRightCommutative;
  }

  Reduct right_side(const GroundDerivation& d, const std::vector<GroundDerivation>& cuts,
                    const GroundDerivation& main) {
    if (main->rule == Rule::kAx) {
      if (cuts.size() != 1) throw Error("reduction: malformed axiom under mc");
      return {cuts[0], cases::kRightAxiom};
    }
    if (main->rule == Rule::kMc) return {right_multicut(cuts, main), cases::kRightMulticut};
    std::vector<GroundDerivation> ps = main->premises;
    for (size_t k = 0; k < ps.size(); ++k)
      if (carries_context(*main, k)) ps[k] = gmk::mc(cuts, ps[k]);
    return {rebuild(main, d->seq, ps), cases::kRightCommutative};
  }

  GroundDerivation right_multicut(const std::vector<GroundDerivation>& cuts,
                                  const GroundDerivation& main) {
    std::vector<GroundDerivation> xis(main->premises.begin(), main->premises.end() - 1);
    const GroundDerivation& xi = main->premises.back();
    std::vector<std::vector<Term>> avail;
    std::vector<Term> cfs;
    for (const auto& x : xis) {
      avail.push_back(x->seq.hyps);
      cfs.push_back(x->seq.concl);
    }
    avail.push_back(minus(xi->seq.hyps, cfs));
    std::vector<std::vector<GroundDerivation>> groups(avail.size());
    for (const auto& c : cuts) {
      size_t j = 0;
      while (j < avail.size() && !contains(avail[j], c->seq.concl)) ++j;
      if (j == avail.size()) throw Error("reduction: cut formula not found in the premise");
      avail[j] = remove_one(avail[j], c->seq.concl);
      groups[j].push_back(c);
    }
    std::vector<GroundDerivation> outer;
    for (size_t j = 0; j < xis.size(); ++j)
      outer.push_back(groups[j].empty() ? xis[j] : gmk::mc(groups[j], xis[j]));
    GroundDerivation last = groups.back().empty() ? xi : gmk::mc(groups.back(), xi);
    return gmk::mc(outer, last);
  }

  Reduct inductive(const std::vector<GroundDerivation>& cuts, const GroundDerivation& main,
                   size_t i) {
    FormulaView a = view(*main->principal);
    std::map<std::vector<Term>, GroundDerivation> family;
    for (size_t k = 0; k < main->keys.size(); ++k) family[main->keys[k]] = main->premises[k];
    GroundDerivation u = unfold(cuts[i], a.pred, *main->term, family);
    return {gmk::mc(replace_at(cuts, i, u), main->premises.back()), cases::kInductive};
  }

  Reduct essential(const std::vector<GroundDerivation>& cuts, const GroundDerivation& main,
                   size_t i) {
    const GroundDerivation& left = cuts[i];
    const std::vector<Term>& delta = left->seq.hyps;
    auto with = [&](const GroundDerivation& q) { return replace_at(cuts, i, q); };
    switch (main->rule) {
      case Rule::kAndL: {
        std::vector<GroundDerivation> cs = with(left->premises[0]);
        cs.push_back(left->premises[1]);
        return {gmk::contract_all(gmk::mc(cs, main->premises[0]), delta), cases::kEssential};
      }
      case Rule::kOrL:
        return {gmk::mc(with(left->premises[0]), main->premises[static_cast<size_t>(left->side)]),
                cases::kEssential};
      case Rule::kImpL: {
        std::vector<GroundDerivation> others = erase_at(cuts, i);
        GroundDerivation x = gmk::mc(others, main->premises[0]);
        GroundDerivation y = gmk::mc({x}, left->premises[0]);
        GroundDerivation z = gmk::mc(with(y), main->premises[1]);
        std::vector<Term> dup = hyps_of(others);
        std::vector<Term> cfs;
        for (const auto& c : cuts) cfs.push_back(c->seq.concl);
        std::vector<Term> gamma = minus(main->seq.hyps, cfs);
        dup.insert(dup.end(), gamma.begin(), gamma.end());
        return {gmk::contract_all(z, dup), cases::kEssential};
      }
      case Rule::kAllL: {
        for (size_t k = 0; k < left->keys.size(); ++k)
          if (left->keys[k] == std::vector<Term>{*main->term})
            return {gmk::mc(with(left->premises[k]), main->premises[0]), cases::kEssential};
        throw Error("reduction: allR family lacks " + main->term->str());
      }
      case Rule::kExL: {
        for (size_t k = 0; k < main->keys.size(); ++k)
          if (main->keys[k] == std::vector<Term>{*left->term})
            return {gmk::mc(with(left->premises[0]), main->premises[k]), cases::kEssential};
        throw Error("reduction: exL family lacks " + left->term->str());
      }
      case Rule::kDeltaL: {
        for (size_t k = 0; k < main->clauses.size(); ++k)
          if (main->clauses[k] == left->clause)
            return {gmk::mc(with(left->premises[0]), main->premises[k]), cases::kEssential};
        throw Error("reduction: defL lacks clause " + std::to_string(left->clause));
      }
      default:
        throw Error(std::string("reduction: no essential case for ") + rule_name(left->rule) +
                    " against " + rule_name(main->rule));
    }
  }

  GroundDerivation left_commute(const GroundDerivation& d,
                                const std::vector<GroundDerivation>& cuts,
                                const GroundDerivation& main, size_t i) {
    const GroundDerivation& left = cuts[i];
    std::vector<Term> outside = minus(d->seq.hyps, left->seq.hyps);
    std::vector<GroundDerivation> ps = left->premises;
    for (size_t k = 0; k < ps.size(); ++k) {
      if (!carries_context(*left, k)) continue;
      if (is_major(*left, k))
        ps[k] = gmk::mc(replace_at(cuts, i, ps[k]), main);
      else
        ps[k] = gmk::weaken_with(ps[k], outside);
    }
    return rebuild(left, d->seq, ps);
  }

  const DefinitionSet& defs_;
  const FinitarySignature& fsig_;
};

// Leftmost mc none of whose premises contains an mc.
bool find_innermost(const GroundDerivation& d, std::vector<size_t>& path) {
  for (size_t k = 0; k < d->premises.size(); ++k) {
    path.push_back(k);
    if (find_innermost(d->premises[k], path)) return true;
    path.pop_back();
  }
  return d->rule == Rule::kMc;
}

GroundDerivation replace_path(const GroundDerivation& d, const std::vector<size_t>& path,
                              size_t depth, const GroundDerivation& x) {
  if (depth == path.size()) return x;
  Node n = copy(d);
  n->premises[path[depth]] = replace_path(d->premises[path[depth]], path, depth + 1, x);
  return n;
}

GroundDerivation at_path(GroundDerivation d, const std::vector<size_t>& path) {
  for (size_t k : path) d = d->premises[k];
  return d;
}

std::string path_str(const std::vector<size_t>& path) {
  std::string s = "root";
  for (size_t k : path) s += "." + std::to_string(k);
  return s;
}

}  // namespace

Reduct reduce_step(const DefinitionSet& defs, const FinitarySignature& fsig,
                   const GroundDerivation& d) {
  Reducer r(defs, fsig);
  return r.step(d);
}

GroundDerivation unfold(const DefinitionSet& defs, const FinitarySignature& fsig,
                        const GroundDerivation& psi, const std::string& pred, const Term& s,
                        const std::map<std::vector<Term>, GroundDerivation>& family) {
  Reducer r(defs, fsig);
  return r.unfold(psi, pred, s, family);
}

NormalizeResult normalize_derivation(const DefinitionSet& defs, const FinitarySignature& fsig,
                                     const GroundDerivation& d, size_t fuel) {
  Reducer r(defs, fsig);
  NormalizeResult out;
  out.d = d;
  while (true) {
    std::vector<size_t> path;
    if (!find_innermost(out.d, path)) {
      out.complete = true;
      return out;
    }
    if (out.steps >= fuel) return out;
    Reduct red = r.step(at_path(out.d, path));
    out.d = replace_path(out.d, path, 0, red.d);
    ++out.steps;
    out.trace.push_back({out.steps, red.case_name, path_str(path), derivation_size(out.d)});
  }
}

}  // namespace ldmu
