#include "ldmu/stratification.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "ldmu/enumerate.hpp"

namespace ldmu {

LevelMeasure::Entry LevelMeasure::get(const std::string& p) const {
  auto it = entries.find(p);
  return it == entries.end() ? Entry{} : it->second;
}

void LevelMeasure::validate(const Signature& sig) const {
  for (const auto& [p, e] : entries) {
    auto ty = sig.lookup(p);
    if (!ty && p != logic::kEq) throw Error("measure for unknown predicate '" + p + "'");
    if (e.base < 0) throw Error("negative base for '" + p + "'");
    std::vector<Type> args = ty ? ty->arg_types() : std::vector<Type>{};
    for (const auto& [i, w] : e.weights) {
      if (i >= args.size())
        throw Error("measure for '" + p + "': argument " + std::to_string(i) +
                    " out of range");
      if (w < 0) throw Error("measure for '" + p + "': negative weight");
    }
  }
}

std::string LevelMeasure::str(const std::string& p) const {
  Entry e = get(p);
  std::ostringstream os;
  os << e.base;
  for (const auto& [i, w] : e.weights) {
    os << " + ";
    if (w != 1) os << w << "*";
    os << "size(#" << i << ")";
  }
  return os.str();
}

std::string LevelExpr::str() const {
  if (unbounded) return "omega";
  std::ostringstream os;
  bool first = true;
  if (pred) {
    os << "base(" << *pred << ")";
    first = false;
  }
  for (const auto& [v, c] : coeffs) {
    if (c == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (c != 1) os << c << "*";
    os << "s" << v;
  }
  if (first) {
    os << constant;
  } else if (constant != 0) {
    os << (constant > 0 ? " + " : " - ") << std::labs(constant);
  }
  return os.str();
}

std::string SymbolicLevel::str() const {
  if (branches.size() == 1) return branches[0].str();
  std::string s = "max(";
  for (size_t i = 0; i < branches.size(); ++i) {
    if (i) s += ", ";
    s += branches[i].str();
  }
  return s + ")";
}

std::string GroundLevel::str() const {
  std::string s = unbounded ? "omega" : std::to_string(value);
  return exact ? s : s + " (approximate)";
}

bool operator<(const GroundLevel& a, const GroundLevel& b) {
  if (a.unbounded) return false;
  if (b.unbounded) return true;
  return a.value < b.value;
}

bool operator==(const GroundLevel& a, const GroundLevel& b) {
  return a.unbounded == b.unbounded && a.value == b.value && a.exact == b.exact;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kVerified: return "verified";
    case Verdict::kViolated: return "violated";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "";
}

namespace {

struct Linear {
  long constant = 0;
  std::map<std::string, long> coeffs;
};

// Size of every grounding of `t`, as a linear function of the sizes of its
// free variables; none when it is not linear (a variable applied to
// something other than its eta-expansion arguments).
std::optional<Linear> size_sym(const Term& t) {
  {
    Term u = t;
    while (u.is_abs()) u = u.body();
    Term head = spine(u).first;
    if (head.is_var() && normalize(head) == t) return Linear{0, {{head.name(), 1}}};
  }
  if (t.is_abs()) {
    auto b = size_sym(t.body());
    if (b) b->constant += 1;
    return b;
  }
  auto [head, args] = spine(t);
  if (head.is_var()) return std::nullopt;
  Linear out;
  out.constant = 1;
  for (const auto& a : args) {
    auto s = size_sym(a);
    if (!s) return std::nullopt;
    out.constant += s->constant;
    for (const auto& [v, c] : s->coeffs) out.coeffs[v] += c;
  }
  return out;
}

class Symbolic {
 public:
  Symbolic(const Signature& sig, const LevelMeasure& m, bool fold_bases)
      : sig_(sig), m_(m), fold_(fold_bases) {}

  SymbolicLevel level(const Term& f) {
    FormulaView v = view(f);
    using K = FormulaView::Kind;
    SymbolicLevel out;
    switch (v.kind) {
      case K::kTop:
      case K::kBot: out.branches.push_back(LevelExpr{}); return out;
      case K::kAnd:
      case K::kOr:
      case K::kImp: {
        SymbolicLevel a = level(*v.lhs), b = level(*v.rhs);
        if (v.kind == K::kImp)
          for (auto& e : a.branches) e.constant += 1;
        out = a;
        out.branches.insert(out.branches.end(), b.branches.begin(), b.branches.end());
        out.exact = a.exact && b.exact;
        return out;
      }
      case K::kAll:
      case K::kEx: {
        const Type& alpha = *v.qtype;
        Finiteness fin = analyze_finiteness(sig_, alpha);
        if (!fin.inhabited) {
          out.branches.push_back(LevelExpr{});
          return out;
        }
        std::string x = "#q" + std::to_string(fresh_++);
        out = level(open_quantifier(*v.qbody, Term::var(x, alpha)));
        for (auto& e : out.branches) {
          auto it = e.coeffs.find(x);
          if (it == e.coeffs.end()) continue;
          if (it->second > 0) {
            if (fin.finite)
              e.constant += it->second * static_cast<long>(fin.max_size);
            else
              e.unbounded = true;
          }
          e.coeffs.erase(it);
        }
        return out;
      }
      case K::kAtom: {
        LevelMeasure::Entry en = m_.get(v.pred);
        LevelExpr e;
        if (fold_)
          e.constant = en.base;
        else
          e.pred = v.pred;
        for (const auto& [i, w] : en.weights) {
          auto s = size_sym(v.args.at(i));
          if (!s) {
            e.unbounded = true;
            out.exact = false;
            break;
          }
          e.constant += w * s->constant;
          for (const auto& [x, c] : s->coeffs) e.coeffs[x] += w * c;
        }
        out.branches.push_back(e);
        return out;
      }
      case K::kOther: break;
    }
    LevelExpr e;
    e.unbounded = true;
    out.branches.push_back(e);
    out.exact = false;
    return out;
  }

 private:
  const Signature& sig_;
  const LevelMeasure& m_;
  bool fold_;
  int fresh_ = 0;
};

}  // namespace

SymbolicLevel lvl_symbolic(const Signature& sig, const Term& f,
                           const VarContext& vars, const LevelMeasure& m) {
  (void)vars;
  Symbolic s(sig, m, true);
  return s.level(f);
}

GroundLevel lvl_ground(const Signature& sig, const Term& f, const LevelMeasure& m,
                       size_t enum_bound) {
  if (!free_vars(f).empty()) throw Error("lvl_ground: formula is not ground: " + f.str());
  FormulaView v = view(f);
  using K = FormulaView::Kind;
  switch (v.kind) {
    case K::kTop:
    case K::kBot: return {};
    case K::kAnd:
    case K::kOr:
    case K::kImp: {
      GroundLevel a = lvl_ground(sig, *v.lhs, m, enum_bound);
      GroundLevel b = lvl_ground(sig, *v.rhs, m, enum_bound);
      if (v.kind == K::kImp) {
        if (a.unbounded)
          a.exact = false;  // omega + 1 is capped at omega
        else
          a.value += 1;
      }
      GroundLevel r = a < b ? b : a;
      r.exact = a.exact && b.exact;
      return r;
    }
    case K::kAll:
    case K::kEx: {
      const Type& alpha = *v.qtype;
      Finiteness fin = analyze_finiteness(sig, alpha);
      if (!fin.inhabited) return {};
      GroundLevel best;
      bool any = false;
      auto fold = [&](const GroundLevel& g) {
        if (!any || best < g) {
          bool ex = best.exact;
          best = g;
          best.exact = ex && g.exact;
        } else {
          best.exact = best.exact && g.exact;
        }
        any = true;
      };
      if (fin.finite) {
        for (const auto& t : enumerate_ground(sig, alpha, fin.max_size).terms)
          fold(lvl_ground(sig, open_quantifier(*v.qbody, t), m, enum_bound));
        return best;
      }
      // Infinite type: the symbolic form decides whether the sup is omega or
      // attained at any instance.
      Symbolic s(sig, m, true);
      SymbolicLevel body = s.level(open_quantifier(*v.qbody, Term::var("#x", alpha)));
      if (body.exact) {
        bool grows = false;
        for (const auto& e : body.branches) {
          auto it = e.coeffs.find("#x");
          if (e.unbounded || (it != e.coeffs.end() && it->second > 0)) grows = true;
        }
        if (grows) {
          GroundLevel g;
          g.unbounded = true;
          return g;
        }
        auto first = enumerate_ground(sig, alpha, std::max<size_t>(fin.max_size, 1));
        for (size_t b = 1; first.terms.empty() && b <= 64; ++b)
          first = enumerate_ground(sig, alpha, b);
        if (!first.terms.empty())
          return lvl_ground(sig, open_quantifier(*v.qbody, first.terms[0]), m, enum_bound);
      }
      for (const auto& t : enumerate_ground(sig, alpha, enum_bound).terms)
        fold(lvl_ground(sig, open_quantifier(*v.qbody, t), m, enum_bound));
      best.exact = false;
      return best;
    }
    case K::kAtom: {
      LevelMeasure::Entry en = m.get(v.pred);
      GroundLevel g;
      g.value = en.base;
      for (const auto& [i, w] : en.weights)
        g.value += w * static_cast<long>(term_size(v.args.at(i)));
      return g;
    }
    case K::kOther: break;
  }
  throw Error("lvl_ground: not a formula: " + f.str());
}

// ---------------------------------------------------------------------------
// Checking a definition

namespace {

std::optional<size_t> min_ground_size(const Signature& sig, const Type& t) {
  Finiteness fin = analyze_finiteness(sig, t);
  if (!fin.inhabited) return std::nullopt;
  for (size_t b = 1; b <= 64; ++b) {
    auto e = enumerate_ground(sig, t, b);
    if (!e.terms.empty()) return b;
  }
  return std::nullopt;
}

// base(h) >= base(q) + k, or >= k when q is empty.
struct Constraint {
  std::string head;
  std::optional<std::string> dep;
  long k = 0;
  std::string branch;
};

struct Analysis {
  size_t index;
  std::string pred;
  std::string clause;
  Verdict verdict = Verdict::kVerified;
  std::string witness;
  SymbolicLevel head, body;
  std::vector<Constraint> constraints;
  bool vacuous = false;
};

Analysis analyze_clause(const Signature& sig, const Clause& c, size_t index,
                        const LevelMeasure& m) {
  Analysis a{index, c.pred(), c.str(), Verdict::kVerified, "", {}, {}, {}, false};
  Symbolic s(sig, m, false);
  a.head = s.level(c.head);
  a.body = s.level(c.body);
  std::map<std::string, size_t> min_size;
  for (const auto& [x, ty] : c.vars) {
    auto ms = min_ground_size(sig, ty);
    if (!ms) {
      a.vacuous = true;  // no groundings at all
      return a;
    }
    min_size[x] = *ms;
  }
  const LevelExpr& h = a.head.branches.at(0);
  if (!a.head.exact || h.unbounded) {
    a.verdict = Verdict::kInconclusive;
    a.witness = "head level is not linear in the clause variables";
    return a;
  }
  for (const auto& b : a.body.branches) {
    if (b.unbounded) {
      a.verdict = Verdict::kInconclusive;
      a.witness = a.body.exact ? "body level " + b.str() +
                                     ": a quantified variable occurs in a measured position"
                               : "body level is not linear in the clause variables";
      return a;
    }
    long k = b.constant - h.constant;
    std::set<std::string> vs;
    for (const auto& [v, cf] : h.coeffs) vs.insert(v);
    for (const auto& [v, cf] : b.coeffs) vs.insert(v);
    for (const auto& v : vs) {
      long hv = h.coeffs.count(v) ? h.coeffs.at(v) : 0;
      long bv = b.coeffs.count(v) ? b.coeffs.at(v) : 0;
      if (hv < bv) {
        Type ty = *c.vars.lookup(v);
        if (analyze_finiteness(sig, ty).finite) {
          a.verdict = Verdict::kInconclusive;
          a.witness = "coefficient of s" + v + " in the body exceeds the head's";
        } else {
          a.verdict = Verdict::kViolated;
          a.witness = "head " + h.str() + " < body " + b.str() + " for large s" + v;
        }
        return a;
      }
      k -= (hv - bv) * static_cast<long>(min_size.at(v));
    }
    a.constraints.push_back({a.pred, b.pred, k, b.str()});
  }
  return a;
}

long required(const Constraint& c, const std::map<std::string, long>& base) {
  return (c.dep ? base.at(*c.dep) : 0) + c.k;
}

}  // namespace

bool StratReport::ok() const {
  return std::all_of(clauses.begin(), clauses.end(),
                     [](const ClauseCheck& c) { return c.verdict == Verdict::kVerified; });
}

StratReport check_ground_stratified(const DefinitionSet& defs, const LevelMeasure& m) {
  const Signature& sig = defs.signature();
  std::vector<Analysis> as;
  for (size_t i = 0; i < defs.clauses().size(); ++i)
    as.push_back(analyze_clause(sig, defs.clauses()[i], i, m));

  // Predicates: every predicate constant of the signature plus eq.
  std::vector<std::string> preds;
  for (const auto& n : sig.constants()) {
    Type t = *sig.lookup(n);
    if (t.predicate() && !t.first_order()) preds.push_back(n);
  }
  preds.push_back(logic::kEq);
  std::map<std::string, long> base;
  for (const auto& p : preds) base[p] = m.get(p).base;

  // Dependency graph q -> h, solved SCC by SCC in dependency order.
  std::map<std::string, std::vector<const Constraint*>> incoming;
  std::map<std::string, std::set<std::string>> deps;
  for (const auto& a : as)
    if (a.verdict == Verdict::kVerified && !a.vacuous)
      for (const auto& c : a.constraints) {
        incoming[c.head].push_back(&c);
        if (c.dep) deps[c.head].insert(*c.dep);
      }
  std::map<std::string, int> idx, low;
  std::set<std::string> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> sccs;  // dependencies first
  int counter = 0;
  std::function<void(const std::string&)> tarjan = [&](const std::string& v) {
    idx[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto& w : deps[v]) {
      if (!idx.count(w)) {
        tarjan(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack.count(w)) {
        low[v] = std::min(low[v], idx[w]);
      }
    }
    if (low[v] == idx[v]) {
      std::vector<std::string> comp;
      while (true) {
        std::string w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        comp.push_back(w);
        if (w == v) break;
      }
      sccs.push_back(comp);
    }
  };
  for (const auto& p : preds)
    if (!idx.count(p)) tarjan(p);

  std::set<std::string> cyclic;  // predicates on a positive cycle
  for (const auto& comp : sccs) {
    bool changed = true;
    for (size_t round = 0; round <= comp.size() && changed; ++round) {
      changed = false;
      for (const auto& p : comp)
        for (const Constraint* c : incoming[p]) {
          long r = required(*c, base);
          if (base[p] < r) {
            base[p] = r;
            changed = true;
          }
        }
    }
    if (changed)
      for (const auto& p : comp) cyclic.insert(p);
  }

  StratReport rep;
  rep.solved = m;
  for (const auto& p : preds) rep.solved.entries[p].base = base[p];
  for (auto& a : as) {
    ClauseCheck cc;
    cc.index = a.index;
    cc.pred = a.pred;
    cc.clause = a.clause;
    cc.verdict = a.verdict;
    cc.witness = a.witness;
    Symbolic s(sig, rep.solved, true);
    const Clause& c = defs.clauses()[a.index];
    cc.head_level = s.level(c.head).str();
    cc.body_level = s.level(c.body).str();
    if (a.vacuous) {
      cc.verdict = Verdict::kVerified;
      cc.witness = "no groundings";
    } else if (a.verdict == Verdict::kVerified) {
      for (const auto& k : a.constraints) {
        long r = required(k, base);
        if (base[a.pred] < r) {
          cc.verdict = Verdict::kViolated;
          std::ostringstream os;
          os << "level of head " << cc.head_level << " is below body branch " << k.branch;
          if (k.dep) os << " with base(" << *k.dep << ") = " << base[*k.dep];
          if (cyclic.count(a.pred)) os << "; no base assignment exists (cycle with increment)";
          cc.witness = os.str();
          break;
        }
      }
    }
    rep.clauses.push_back(cc);
  }
  ClauseCheck eqc;
  eqc.index = defs.clauses().size();
  eqc.pred = logic::kEq;
  eqc.clause = "eq X X := true";
  eqc.head_level = std::to_string(base[logic::kEq]);
  eqc.body_level = "0";
  rep.clauses.push_back(eqc);
  return rep;
}

std::optional<std::map<std::string, long>> check_strict(const DefinitionSet& defs) {
  StratReport r = check_ground_stratified(defs, LevelMeasure{});
  if (!r.ok()) return std::nullopt;
  std::map<std::string, long> out;
  for (const auto& p : defs.predicates()) out[p] = r.solved.get(p).base;
  out[logic::kEq] = r.solved.get(logic::kEq).base;
  return out;
}

std::vector<InductiveCheck> check_inductive_restriction(const DefinitionSet& defs,
                                                        const LevelMeasure& m) {
  std::vector<InductiveCheck> out;
  StratReport r = check_ground_stratified(defs, m);
  for (const auto& p : defs.predicates()) {
    if (!defs.is_inductive(p)) continue;
    InductiveCheck ic{p, true, ""};
    if (!m.strict(p)) {
      ic.ok = false;
      ic.reason = "inductive predicate violates strict stratification: '" + p +
                  "' has an argument-dependent measure";
    } else {
      for (const auto& c : r.clauses) {
        if (c.pred != p || c.verdict == Verdict::kVerified) continue;
        ic.ok = false;
        ic.reason = "inductive predicate violates strict stratification: clause " +
                    c.clause + " is " + to_string(c.verdict) +
                    (c.witness.empty() ? "" : " (" + c.witness + ")");
        break;
      }
    }
    out.push_back(ic);
  }
  return out;
}

std::vector<OracleViolation> random_grounding_oracle(const Signature& sig,
                                                     const Clause& c,
                                                     const LevelMeasure& m,
                                                     size_t trials, size_t size_bound,
                                                     uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Term>> pools;
  for (const auto& [x, ty] : c.vars) {
    pools.push_back(enumerate_ground(sig, ty, size_bound).terms);
    if (pools.back().empty()) return {};
  }
  std::vector<OracleViolation> out;
  std::set<std::string> seen;
  for (size_t t = 0; t < trials; ++t) {
    Substitution rho(c.vars);
    size_t i = 0;
    for (const auto& [x, ty] : c.vars) {
      const auto& pool = pools[i++];
      std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
      rho.bind(x, pool[pick(rng)]);
    }
    std::string key = rho.str();
    if (seen.count(key)) continue;
    GroundLevel h = lvl_ground(sig, apply_subst(rho, c.head), m, size_bound);
    GroundLevel b = lvl_ground(sig, apply_subst(rho, c.body), m, size_bound);
    if (h < b) {
      seen.insert(key);
      out.push_back({rho, h, b});
    }
  }
  return out;
}

}  // namespace ldmu
