#include "doctest.h"

#include "ldmu/definitions.hpp"
#include "ldmu/script.hpp"
#include "ldmu/syntax.hpp"

using namespace ldmu;

namespace {

const char* kAppend = R"(
kind i type.
kind lst type.
type a i.
type b i.
type nil lst.
type cons i -> lst -> lst.
define ind append : lst -> lst -> lst -> prop by
    append nil K K := true
  ; append (cons X L) K (cons X M) := append L K M.
)";

const char* kOdd = R"(
kind nat type.
type z nat.
type s nat -> nat.
define ind odd : nat -> prop by
    odd (s X) := odd X => false.
define ind q : nat -> prop by
    q z := true.
)";

Term f(const Signature& s, const std::string& text, const VarContext& ctx = {}) {
  return parse_formula(s, ctx, text);
}

}  // namespace

TEST_CASE("defn_expand on append clauses") {
  Script sc = parse_script(kAppend);
  const Signature& s = sc.defs.signature();
  const auto cs = sc.defs.clauses_for("append");
  REQUIRE(cs.size() == 2);
  Term a = f(s, "append nil (cons a nil) (cons a nil)");
  auto b = defn_expand(cs[0], a, Substitution());
  REQUIRE(b);
  CHECK(*b == mk::top());
  CHECK_FALSE(defn_expand(cs[1], f(s, "append nil nil nil"), Substitution()));
  Term eq = f(s, "eq b b");
  auto e = defn_expand(eq_clause(Type::base("i")), eq, Substitution());
  REQUIRE(e);
  CHECK(*e == mk::top());
}

TEST_CASE("defn_unify selects clause instances") {
  Script sc = parse_script(kAppend);
  const Signature& s = sc.defs.signature();
  const auto cs = sc.defs.clauses_for("append");
  VarContext y{{"M", Type::base("lst")}};
  Term a = f(s, "append (cons a nil) (cons b nil) M", y);
  CHECK_FALSE(defn_unify(cs[0], a, y));
  auto inst = defn_unify(cs[1], a, y);
  REQUIRE(inst);
  Term m = inst->theta.image("M");
  auto [head, args] = spine(m);
  CHECK(head.name() == "cons");
  REQUIRE(args.size() == 2);
  CHECK(args[0].str() == "a");
  REQUIRE(args[1].is_var());
  std::string mp = args[1].name();
  CHECK(inst->body ==
        f(s, "append nil (cons b nil) " + mp, VarContext{{mp, Type::base("lst")}}));
}

TEST_CASE("eq clause rejects distinct constants") {
  Script sc = parse_script(kAppend);
  const Signature& s = sc.defs.signature();
  CHECK_FALSE(defn_unify(eq_clause(Type::base("i")), f(s, "eq a b"), {}));
}

TEST_CASE("fixed-point operator of append") {
  Script sc = parse_script(kAppend);
  const Signature& s = sc.defs.signature();
  FixedPointOperator op = to_fixed_point_operator(sc.defs, "append", OperatorForm::kCompact);
  Term expected = normalize(parse_term(
      s, {},
      "\\p:lst -> lst -> lst -> prop, \\l:lst, \\k:lst, \\m:lst, "
      "(eq l nil /\\ eq k m) \\/ (exists x:i, exists l2:lst, exists m2:lst, "
      "eq l (cons x l2) /\\ eq m (cons x m2) /\\ p l2 k m2)"));
  CHECK(op.op == expected);
  Term literal = normalize(parse_term(
      s, {},
      "\\p:lst -> lst -> lst -> prop, \\l:lst, \\k:lst, \\m:lst, "
      "(exists K:lst, eq l nil /\\ eq k K /\\ eq m K /\\ true) \\/ "
      "(exists X:i, exists L:lst, exists K:lst, exists M:lst, "
      "eq l (cons X L) /\\ eq k K /\\ eq m (cons X M) /\\ p L K M)"));
  CHECK(to_fixed_point_operator(sc.defs, "append").op == literal);
}

TEST_CASE("fixed-point operator of odd and of a single ground clause") {
  Script sc = parse_script(kOdd);
  const Signature& s = sc.defs.signature();
  Term odd = normalize(parse_term(
      s, {}, "\\p:nat -> prop, \\x:nat, exists y:nat, eq x (s y) /\\ (p y => false)"));
  CHECK(to_fixed_point_operator(sc.defs, "odd").op == odd);
  Term q = normalize(parse_term(s, {}, "\\p:nat -> prop, \\x:nat, eq x z /\\ true"));
  CHECK(to_fixed_point_operator(sc.defs, "q").op == q);
}

TEST_CASE("polarity of predicate occurrences") {
  Script sc = parse_script(kOdd);
  const Signature& s = sc.defs.signature();
  VarContext x{{"X", Type::base("nat")}};
  PolarityReport r = polarity(f(s, "odd X => false", x), "odd");
  REQUIRE(r.occurrences.size() == 1);
  CHECK_FALSE(r.occurrences[0].positive);
  CHECK(r.occurrences[0].implication_depth == 1);
  CHECK_FALSE(r.only_positive());

  r = polarity(f(s, "odd X", x), "odd");
  REQUIRE(r.occurrences.size() == 1);
  CHECK(r.occurrences[0].positive);
  CHECK(r.occurrences[0].implication_depth == 0);

  r = polarity(f(s, "(odd X => false) => false", x), "odd");
  REQUIRE(r.occurrences.size() == 1);
  CHECK(r.occurrences[0].positive);
  CHECK(r.occurrences[0].implication_depth == 2);
}

TEST_CASE("clauses_for_atom and kinds") {
  Script sc = parse_script(kAppend);
  CHECK(sc.defs.is_inductive("append"));
  CHECK(sc.defs.kind_of("cons") == std::nullopt);
  CHECK(sc.defs.clauses_for_atom(f(sc.defs.signature(), "eq a a")).size() == 1);
  CHECK(sc.defs.clauses_for_atom(f(sc.defs.signature(), "append nil nil nil")).size() == 2);
}
