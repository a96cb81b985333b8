#include "suites.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "ldmu/enumerate.hpp"
#include "ldmu/ground.hpp"
#include "ldmu/script.hpp"
#include "ldmu/sequent.hpp"
#include "ldmu/subst.hpp"
#include "ldmu/syntax.hpp"
#include "ldmu/unify.hpp"

namespace ldmu::props {

namespace {

std::string slurp(const std::string& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void fail(SuiteResult& r, const std::string& what) {
  if (r.failures++ == 0) r.first_failure = what;
}

Signature nat_sig() {
  Signature s;
  s.declare_base_type("nat");
  s.declare("z", Type::base("nat"));
  s.declare("s", parse_type(s, "nat -> nat"));
  s.declare("plus", parse_type(s, "nat -> nat -> nat"));
  s.declare("p", parse_type(s, "nat -> prop"));
  return s;
}

// Random well-typed terms with beta-redexes and bound variables.
class TermGen {
 public:
  TermGen(const Signature& sig, uint64_t seed) : sig_(sig), rng_(seed) {}

  Term gen(const Type& ty, std::vector<Type>& env, const VarContext& free, int fuel) {
    if (ty.is_arrow() && (fuel <= 0 || coin(2))) return lam(ty, env, free, fuel - 1);
    std::vector<Term> heads;
    for (size_t k = 0; k < env.size(); ++k)
      if (env[env.size() - 1 - k] == ty) heads.push_back(Term::bound(k));
    for (const auto& [x, t] : free)
      if (t == ty) heads.push_back(Term::var(x, t));
    const Type nat = Type::base("nat");
    if (ty == nat) heads.push_back(Term::constant("z", ty));
    size_t pick = pick_n(4);
    if (fuel > 0 && pick == 0 && !ty.is_arrow()) {
      env.push_back(nat);
      Term body = gen(ty, env, free, fuel - 1);
      env.pop_back();
      return Term::app(Term::abs("w", nat, body), gen(nat, env, free, fuel - 1));
    }
    if (fuel > 0 && pick == 1 && ty == nat)
      return Term::app(Term::constant("s", *sig_.lookup("s")), gen(ty, env, free, fuel - 1));
    if (fuel > 0 && pick == 2 && ty == nat) {
      Term f = Term::constant("plus", *sig_.lookup("plus"));
      return Term::app(Term::app(f, gen(ty, env, free, fuel - 1)), gen(ty, env, free, fuel - 1));
    }
    if (fuel > 0 && pick == 3) {
      for (const auto& [x, t] : free)
        if (t.is_arrow() && t.cod() == ty && coin(2))
          return Term::app(Term::var(x, t), gen(t.dom(), env, free, fuel - 1));
    }
    if (heads.empty()) {
      if (ty.is_arrow()) return lam(ty, env, free, 0);
      return Term::constant("z", ty);
    }
    return heads[pick_n(heads.size())];
  }

  bool coin(size_t n) { return pick_n(n) == 0; }
  size_t pick_n(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng_); }

 private:
  Term lam(const Type& ty, std::vector<Type>& env, const VarContext& free, int fuel) {
    env.push_back(ty.dom());
    Term body = gen(ty.cod(), env, free, fuel);
    env.pop_back();
    return Term::abs("y", ty.dom(), body);
  }

  const Signature& sig_;
  std::mt19937_64 rng_;
};

Term tuple(const std::vector<Term>& ts) {
  std::vector<Type> tys;
  for (const auto& t : ts) tys.push_back(type_of(t));
  return Term::apps(Term::constant("#tuple", Type::arrows(tys, Type::prop())), ts);
}

const char* kPropScript = R"(
kind i type.
kind lst type.
type a i.
type b i.
type nil lst.
type cons i -> lst -> lst.
type q prop.
define fix append : lst -> lst -> lst -> prop by
    append nil K K := true
  ; append (cons X L) K (cons X M) := append L K M.
)";

class FormulaGen {
 public:
  explicit FormulaGen(uint64_t seed) : rng_(seed) {}
  std::string gen(int depth) {
    static const char* lists[] = {"nil", "(cons a nil)", "(cons b nil)", "(cons a (cons b nil))"};
    switch (pick(depth <= 0 ? 4 : 9)) {
      case 0: return "true";
      case 1: return "false";
      case 2: return "q";
      case 3:
        return std::string("append ") + lists[pick(4)] + " " + lists[pick(4)] + " " +
               lists[pick(4)];
      case 4:
      case 5: return "(" + gen(depth - 1) + " /\\ " + gen(depth - 1) + ")";
      case 6: return "(" + gen(depth - 1) + " \\/ " + gen(depth - 1) + ")";
      case 7: return "(" + gen(depth - 1) + " => " + gen(depth - 1) + ")";
      default: return "(exists l:lst, append l nil " + std::string(lists[pick(4)]) + ")";
    }
  }
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

SuiteResult normalize_idempotence(uint64_t seed, size_t n) {
  SuiteResult r;
  Signature s = nat_sig();
  TermGen g(s, seed);
  const Type nat = Type::base("nat");
  const Type nn = parse_type(s, "nat -> nat");
  VarContext free{{"X", nat}, {"F", nn}};
  const Type types[] = {nat, nn, parse_type(s, "nat -> nat -> nat")};
  for (size_t i = 0; i < n; ++i, ++r.cases) {
    std::vector<Type> env;
    Term t = g.gen(types[i % 3], env, free, 5);
    Term m = normalize(t);
    if (m != t) ++r.interesting;
    if (!is_normal(m) || normalize(m) != m || type_of(m) != type_of(t)) fail(r, t.str());
  }
  return r;
}

SuiteResult substitution_composition(uint64_t seed, size_t n) {
  SuiteResult r;
  Signature s = nat_sig();
  TermGen g(s, seed);
  const Type nat = Type::base("nat");
  VarContext xy{{"X", nat}, {"Y", nat}};
  VarContext w{{"W", nat}};
  for (size_t i = 0; i < n; ++i, ++r.cases) {
    std::vector<Type> env;
    Term t = g.gen(nat, env, xy, 4);
    Substitution theta(xy);
    theta.bind("X", g.gen(nat, env, w, 3));
    theta.bind("Y", g.gen(nat, env, w, 3));
    Substitution delta(w);
    delta.bind("W", g.gen(nat, env, {}, 3));
    Term lhs = apply_subst(delta, apply_subst(theta, t));
    if (lhs != t) ++r.interesting;
    if (lhs != apply_subst(theta.then(delta), t)) fail(r, t.str());
  }
  return r;
}

SuiteResult matching_soundness(uint64_t seed, size_t n) {
  SuiteResult r;
  Signature s = nat_sig();
  TermGen g(s, seed);
  const Type nat = Type::base("nat");
  const Type nn = parse_type(s, "nat -> nat");
  VarContext x{{"X", nat}, {"Y", nat}, {"F", nn}};
  const char* sources[] = {"p X", "p (s X)", "p (plus X Y)", "p (F z)", "p (plus (F X) Y)"};
  const char* pats[] = {"p X", "p (s X)", "p (plus X (s Y))", "p (plus X X)",
                        "p (plus (s X) Y)"};
  for (size_t i = 0; i < n; ++i, ++r.cases) {
    Term h = parse_formula(s, x, pats[i % 5]);
    std::vector<Type> env;
    Term a = mk::top();
    if (g.coin(2)) {
      Substitution rho(x);
      rho.bind("X", g.gen(nat, env, {}, 3));
      rho.bind("Y", g.gen(nat, env, {}, 3));
      rho.bind("F", normalize(g.gen(nn, env, {}, 3)));
      a = apply_subst(rho, parse_formula(s, x, sources[g.pick_n(5)]));
    } else {
      a = normalize(Term::app(Term::constant("p", *s.lookup("p")), g.gen(nat, env, {}, 4)));
    }
    VarContext hv;
    for (const auto& [v, t] : free_vars_typed(h)) hv.add(v, t);
    auto m = pattern_match(h, hv, a);
    if (!m) continue;
    ++r.interesting;
    if (!m->grounding() || apply_subst(*m, h) != a) fail(r, h.str() + " against " + a.str());
  }
  return r;
}

SuiteResult unifier_vs_brute_force(uint64_t seed, size_t n) {
  SuiteResult r;
  Signature s = nat_sig();
  TermGen g(s, seed);
  const Type nat = Type::base("nat");
  VarContext v{{"X", nat}, {"Y", nat}, {"Z", nat}};
  std::vector<Term> small = enumerate_ground(s, nat, 3).terms;
  for (size_t i = 0; i < n; ++i, ++r.cases) {
    std::vector<Type> env;
    Term a = normalize(g.gen(nat, env, v, 3));
    Term b = normalize(g.gen(nat, env, v, 3));
    std::string label = a.str() + " =? " + b.str();
    auto sigma = pattern_unify(a, b, v);
    if (sigma) {
      ++r.interesting;
      if (apply_subst(*sigma, a) != apply_subst(*sigma, b)) {
        fail(r, label + ": not a unifier");
        continue;
      }
    }
    bool bad = false;
    for (const Term& tx : small)
      for (const Term& ty : small)
        for (const Term& tz : small) {
          if (bad) break;
          Substitution gr(v);
          gr.bind("X", tx);
          gr.bind("Y", ty);
          gr.bind("Z", tz);
          if (apply_subst(gr, a) != apply_subst(gr, b)) continue;
          if (!sigma) {
            fail(r, label + ": missed solution " + gr.str());
            bad = true;
            break;
          }
          std::vector<Term> img, tgt;
          for (const char* x : {"X", "Y", "Z"}) {
            img.push_back(sigma->image(x));
            tgt.push_back(gr.image(x));
          }
          if (!pattern_match(tuple(img), sigma->range(), tuple(tgt))) {
            fail(r, label + ": solution " + gr.str() + " is not an instance");
            bad = true;
          }
        }
  }
  return r;
}

SuiteResult search_check_round_trip(uint64_t seed, size_t n) {
  SuiteResult r;
  Script sc = parse_script(kPropScript);
  FormulaGen g(seed);
  for (size_t i = 0; i < n; ++i, ++r.cases) {
    Sequent goal{{}, {}, parse_formula(sc.defs.signature(), {}, g.gen(2))};
    if (g.pick(3) == 0) goal.hyps.push_back(parse_formula(sc.defs.signature(), {}, g.gen(1)));
    auto t = search_bounded(sc.defs, goal, 5);
    if (!t) continue;
    ++r.interesting;
    CheckResult c = check_tree(sc.defs, *t, goal);
    if (!c.ok) fail(r, goal.str() + ": " + c.path + ": " + c.reason);
  }
  return r;
}

SuiteResult weakening(uint64_t seed, size_t n) {
  SuiteResult r;
  Script sc = parse_script(kPropScript);
  FormulaGen g(seed);
  for (size_t i = 0; r.cases < n && i < 20 * n; ++i) {
    Sequent goal{{}, {}, parse_formula(sc.defs.signature(), {}, g.gen(2))};
    auto t = search_bounded(sc.defs, goal, 4);
    if (!t) continue;
    ++r.cases;
    ++r.interesting;
    Term extra = parse_formula(sc.defs.signature(), {}, g.gen(2));
    ProofTree w;
    w.rule = Rule::kWeaken;
    w.hyps = {HypRef::of(extra)};
    w.premises = {*t};
    Sequent bigger = goal;
    bigger.hyps.push_back(extra);
    if (!check_tree(sc.defs, w, bigger).ok) fail(r, bigger.str() + ": weakened tree rejected");
    if (check_tree(sc.defs, w, goal).ok) fail(r, goal.str() + ": weaken without the formula");
  }
  return r;
}

SuiteResult ground_cut_elimination(const std::string& defs_path, uint64_t seed, size_t n) {
  SuiteResult r;
  Script sc = parse_script(slurp(defs_path));
  FinitarySignature fsig = check_finitary(sc.defs.signature());
  const Signature& sig = sc.defs.signature();
  static const char* atoms[] = {"isb tt", "isb ff", "flip tt ff", "flip ff tt", "q",
                                "r tt", "eq tt tt", "true"};
  std::mt19937_64 rng(seed);
  auto pick = [&](size_t k) { return std::uniform_int_distribution<size_t>(0, k - 1)(rng); };
  std::function<std::string(int)> form = [&](int d) -> std::string {
    size_t k = pick(d <= 0 ? 8 : 12);
    if (k < 8) return atoms[k];
    if (k < 10) return "(" + form(d - 1) + " /\\ " + form(d - 1) + ")";
    if (k == 10) return "(" + form(d - 1) + " \\/ " + form(d - 1) + ")";
    return "(" + form(d - 1) + " => " + form(d - 1) + ")";
  };
  for (size_t attempts = 0; r.cases < n && attempts < 100 * n; ++attempts) {
    std::vector<Term> hyps;
    if (pick(2)) hyps.push_back(parse_formula(sig, {}, atoms[4 + pick(2)]));
    Term b = parse_formula(sig, {}, form(2));
    Term c = parse_formula(sig, {}, form(1));
    GroundDerivation left = ground_search(sc.defs, fsig, GroundSequent{hyps, b}, 6);
    if (!left) continue;
    GroundDerivation right = ground_search(sc.defs, fsig, GroundSequent{{b}, c}, 6);
    if (!right) continue;
    ++r.cases;
    GroundDerivation d = gmk::mc({left}, right);
    GroundSequent goal = d->seq;
    std::string label = goal.str() + " cut " + b.str();
    if (!check_ground_tree(sc.defs, fsig, d, goal).ok) {
      fail(r, label + ": input rejected");
      continue;
    }
    NormalizeResult m = normalize_derivation(sc.defs, fsig, d);
    if (m.steps > 1) ++r.interesting;
    if (!m.complete || !is_cut_free(m.d) || !same_ground_sequent(m.d->seq, goal) ||
        !check_ground_tree(sc.defs, fsig, m.d, goal).ok)
      fail(r, label);
  }
  return r;
}

}  // namespace ldmu::props
