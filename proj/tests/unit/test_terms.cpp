#include "doctest.h"

#include "ldmu/enumerate.hpp"
#include "ldmu/subst.hpp"
#include "ldmu/syntax.hpp"
#include "ldmu/term.hpp"
#include "ldmu/unify.hpp"

using namespace ldmu;

namespace {

Signature nat_list() {
  Signature s;
  s.declare_base_type("nat");
  s.declare_base_type("lst");
  s.declare("z", Type::base("nat"));
  s.declare("s", parse_type(s, "nat -> nat"));
  s.declare("nil", Type::base("lst"));
  s.declare("cons", parse_type(s, "nat -> lst -> lst"));
  s.declare("a", Type::base("nat"));
  s.declare("b", Type::base("nat"));
  s.declare("append", parse_type(s, "lst -> lst -> lst -> prop"));
  s.declare("ev", parse_type(s, "nat -> prop"));
  return s;
}

}  // namespace

TEST_CASE("infer_type basics") {
  Signature s = nat_list();
  CHECK(infer_type(s, {}, parse_term(s, {}, "s z")) == Type::base("nat"));
  VarContext x{{"x", Type::base("nat")}};
  CHECK(type_of(parse_term(s, x, "\\y:nat, x")) == parse_type(s, "nat -> nat"));
  CHECK_THROWS_WITH_AS(parse_term(s, {}, "z z"), doctest::Contains("application type mismatch"),
                       ParseError);
  Term bad = Term::app(Term::constant("z", Type::base("nat")),
                       Term::constant("z", Type::base("nat")));
  CHECK_THROWS_WITH_AS(infer_type(s, {}, bad), doctest::Contains("application type mismatch"),
                       Error);
  CHECK_THROWS_WITH_AS(infer_type(s, {}, Term::var("q", Type::base("nat"))),
                       doctest::Contains("unbound identifier"), Error);
}

TEST_CASE("normalize beta and eta-long") {
  Signature s = nat_list();
  Type nn = parse_type(s, "nat -> nat");
  Term id = Term::abs("x", Type::base("nat"), Term::bound(0));
  Term a = Term::constant("a", Type::base("nat"));
  CHECK(normalize(Term::app(id, a)) == a);
  Term f = Term::var("f", nn);
  Term expected = Term::abs("x", Type::base("nat"), Term::app(f, Term::bound(0)));
  CHECK(normalize(f) == expected);
  Type pt = parse_type(s, "nat -> prop");
  Term q = Term::var("q", pt);
  // (\p. \x. p x) q
  Term lam = Term::abs("p", pt, Term::abs("x", Type::base("nat"),
                                          Term::app(Term::bound(1), Term::bound(0))));
  CHECK(normalize(Term::app(lam, q)) ==
        Term::abs("y", Type::base("nat"), Term::app(q, Term::bound(0))));
}

TEST_CASE("printing round trips through the parser") {
  Signature s = nat_list();
  VarContext ctx{{"L", Type::base("lst")}, {"K", Type::base("lst")}};
  for (const char* src :
       {"append nil K K", "forall x:nat, ev x => ev (s (s x))",
        "(exists x:nat, ev x) /\\ true \\/ false", "(ev z => ev a) => ev b",
        "forall x y:lst, append x y L /\\ eq x y", "eq (\\x:nat, s x) s"}) {
    Term t = parse_formula(s, ctx, src);
    Term back = parse_formula(s, ctx, t.str());
    CHECK_MESSAGE(t == back, src, " printed as ", t.str());
  }
}

TEST_CASE("apply_subst") {
  Signature s = nat_list();
  VarContext k{{"K", Type::base("lst")}};
  Term t = parse_formula(s, k, "append nil K K");
  CHECK(apply_subst(Substitution::identity(k), t) == t);
  Substitution th(k);
  th.bind("K", parse_term(s, {}, "cons a nil"));
  CHECK(apply_subst(th, t) == parse_formula(s, {}, "append nil (cons a nil) (cons a nil)"));
  VarContext other{{"M", Type::base("lst")}};
  CHECK_THROWS_AS(apply_subst(th, parse_formula(s, other, "append nil M M")), Error);
}

TEST_CASE("is_pattern") {
  Signature s = nat_list();
  VarContext x{{"X", Type::base("nat")}, {"L", Type::base("lst")},
               {"K", Type::base("lst")}, {"M", Type::base("lst")}};
  CHECK(is_pattern(parse_formula(s, x, "append (cons X L) K (cons X M)"), x));
  CHECK(is_pattern(parse_formula(s, x, "eq X X"), x));
  Signature g = s;
  g.declare("g", parse_type(s, "nat -> nat"));
  VarContext f{{"F", parse_type(s, "nat -> nat")}};
  CHECK_FALSE(is_pattern(parse_formula(g, f, "ev (F (g a))"), f));
  CHECK(is_pattern(parse_formula(g, f, "forall y:nat, ev (F y)"), f));
  CHECK_FALSE(is_pattern(parse_formula(g, f, "forall y:nat, eq (F y) (F (F y))"), f));
}

TEST_CASE("pattern_match") {
  Signature s = nat_list();
  VarContext k{{"K", Type::base("lst")}};
  auto rho = pattern_match(parse_formula(s, k, "append nil K K"), k,
                           parse_formula(s, {}, "append nil (cons a nil) (cons a nil)"));
  REQUIRE(rho);
  CHECK(rho->image("K") == parse_term(s, {}, "cons a nil"));
  VarContext x{{"X", Type::base("nat")}, {"L", Type::base("lst")},
               {"K", Type::base("lst")}, {"M", Type::base("lst")}};
  CHECK_FALSE(pattern_match(parse_formula(s, x, "append (cons X L) K (cons X M)"), x,
                            parse_formula(s, {}, "append nil nil nil")));
  VarContext xx{{"X", Type::base("nat")}};
  auto r2 = pattern_match(parse_formula(s, xx, "eq X X"), xx, parse_formula(s, {}, "eq b b"));
  REQUIRE(r2);
  CHECK(r2->image("X") == parse_term(s, {}, "b"));
  CHECK_FALSE(pattern_match(parse_formula(s, xx, "eq X X"), xx, parse_formula(s, {}, "eq a b")));
}

TEST_CASE("pattern_unify examples") {
  Signature s = nat_list();
  VarContext c{{"L'", Type::base("lst")}, {"K'", Type::base("lst")},
               {"M'", Type::base("lst")}, {"K", Type::base("lst")}};
  auto sg = pattern_unify(parse_formula(s, c, "append L' K' M'"),
                          parse_formula(s, c, "append nil K K"), c, {{"K", 1}});
  REQUIRE(sg);
  CHECK(sg->image("L'") == parse_term(s, c, "nil"));
  CHECK(sg->image("M'") == parse_term(s, c, "K'"));
  CHECK(sg->image("K") == parse_term(s, c, "K'"));
  VarContext xy{{"X", Type::base("nat")}, {"Y", Type::base("nat")}};
  auto s2 = pattern_unify(parse_formula(s, xy, "ev (s X)"), parse_formula(s, xy, "ev Y"), xy);
  REQUIRE(s2);
  CHECK(s2->image("Y") == parse_term(s, xy, "s X"));
  CHECK(s2->image("X") == parse_term(s, xy, "X"));
  CHECK_FALSE(pattern_unify(parse_formula(s, xy, "ev z"), parse_formula(s, xy, "ev (s X)"), xy));
  CHECK_FALSE(pattern_unify(parse_formula(s, xy, "ev X"), parse_formula(s, xy, "ev (s X)"), xy));
}

TEST_CASE("higher-order pattern unification") {
  Signature s = nat_list();
  Type nn = parse_type(s, "nat -> nat");
  VarContext fg{{"F", nn}, {"G", nn}};
  // \y. F y = \y. s (G y)
  auto u = pattern_unify(parse_term(s, fg, "\\y:nat, F y"),
                         parse_term(s, fg, "\\y:nat, s (G y)"), fg);
  REQUIRE(u);
  CHECK(apply_subst(*u, parse_term(s, fg, "F")) ==
        apply_subst(*u, parse_term(s, fg, "\\y:nat, s (G y)")));
  // \y. F y = \y. a forces F to ignore its argument
  auto v = pattern_unify(parse_term(s, fg, "\\y:nat, F y"), parse_term(s, fg, "\\y:nat, a"), fg);
  REQUIRE(v);
  CHECK(v->image("F") == parse_term(s, {}, "\\y:nat, a"));
  // \y. F y = \y. s y
  VarContext f{{"F", nn}};
  auto w = pattern_unify(parse_term(s, f, "\\y:nat, F y"), parse_term(s, f, "\\y:nat, s y"), f);
  REQUIRE(w);
  CHECK(w->image("F") == parse_term(s, {}, "s"));
  // Flex-flex with different heads prunes to the common arguments.
  Type nnn = parse_type(s, "nat -> nat -> nat");
  VarContext hk{{"H", nnn}, {"K", nnn}, {"J", nn}};
  auto p = pattern_unify(parse_term(s, hk, "\\x y:nat, H x y"),
                         parse_term(s, hk, "\\x y:nat, J y"), hk);
  REQUIRE(p);
  CHECK(p->image("H") == parse_term(s, hk, "\\x y:nat, J y"));
  auto p2 = pattern_unify(parse_term(s, hk, "\\x y:nat, H x y"),
                          parse_term(s, hk, "\\x y:nat, H y x"), hk);
  REQUIRE(p2);
  CHECK(free_vars(p2->image("H")).size() == 1);
  CHECK(type_of(parse_term(s, hk, "H")) == nnn);
  CHECK_THROWS_AS(pattern_unify(parse_term(s, hk, "\\x y:nat, H x y"),
                                parse_term(s, hk, "\\x y:nat, K y (s x)"), hk),
                  NonPatternError);
  auto q = pattern_unify(parse_term(s, hk, "\\x y:nat, H x y"),
                         parse_term(s, hk, "\\x y:nat, K y x"), hk);
  REQUIRE(q);
  CHECK(apply_subst(*q, parse_term(s, hk, "\\x y:nat, H x y")) ==
        apply_subst(*q, parse_term(s, hk, "\\x y:nat, K y x")));
  // The occurs check rejects \y. F y = \y. s (F y).
  CHECK_FALSE(pattern_unify(parse_term(s, f, "\\y:nat, F y"),
                            parse_term(s, f, "\\y:nat, s (F y)"), f));
}

TEST_CASE("enumerate_ground") {
  Signature s = nat_list();
  auto r = enumerate_ground(s, Type::base("nat"), 3);
  Signature n;
  n.declare_base_type("nat");
  n.declare("z", Type::base("nat"));
  n.declare("s", parse_type(n, "nat -> nat"));
  auto e = enumerate_ground(n, Type::base("nat"), 3);
  REQUIRE(e.terms.size() == 3);
  CHECK(e.terms[0] == parse_term(n, {}, "z"));
  CHECK(e.terms[1] == parse_term(n, {}, "s z"));
  CHECK(e.terms[2] == parse_term(n, {}, "s (s z)"));
  CHECK_FALSE(e.complete);
  CHECK(enumerate_ground(n, Type::base("nat"), 0).terms.empty());
  Signature b;
  b.declare_base_type("bool");
  b.declare("tt", Type::base("bool"));
  b.declare("ff", Type::base("bool"));
  auto bb = enumerate_ground(b, Type::base("bool"), 1);
  REQUIRE(bb.terms.size() == 2);
  CHECK(bb.terms[0] == parse_term(b, {}, "tt"));
  CHECK(bb.complete);
  // bool -> bool has the four closed lambda terms \x.x, \x.tt, \x.ff ... and no more.
  auto fns = enumerate_ground(b, parse_type(b, "bool -> bool"), 5);
  CHECK(fns.terms.size() == 3);
  CHECK(fns.complete);
  auto fin = analyze_finiteness(n, Type::base("nat"));
  CHECK_FALSE(fin.finite);
  CHECK(fin.cycle == std::vector<std::string>{"nat", "nat"});
  (void)r;
}
