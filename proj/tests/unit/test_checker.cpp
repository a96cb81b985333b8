#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "ldmu/proof_io.hpp"
#include "ldmu/script.hpp"
#include "ldmu/sequent.hpp"
#include "ldmu/syntax.hpp"

using namespace ldmu;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Script corpus(const std::string& name) {
  return parse_script(slurp(fs::path(LDMU_CORPUS_DIR) / name));
}

ProofTree proof(const std::string& name) {
  return read_proof(slurp(fs::path(LDMU_CORPUS_DIR) / name));
}

Sequent goal_of(const Script& s, const std::string& thm) {
  for (const auto& t : s.theorems)
    if (t.name == thm) return Sequent{{}, {}, t.statement};
  FAIL("no theorem " << thm);
  return Sequent{{}, {}, mk::top()};
}

Sequent seq(const Script& s, const VarContext& ctx, std::vector<std::string> hyps,
            const std::string& concl) {
  Sequent q{ctx, {}, parse_formula(s.defs.signature(), ctx, concl)};
  for (const auto& h : hyps) q.hyps.push_back(parse_formula(s.defs.signature(), ctx, h));
  return q;
}

ProofTree node(Rule r, std::vector<ProofTree> ps = {}) {
  ProofTree t;
  t.rule = r;
  t.premises = std::move(ps);
  return t;
}

ProofTree left(Rule r, size_t hyp, std::vector<ProofTree> ps = {}) {
  ProofTree t = node(r, std::move(ps));
  t.hyps.push_back(HypRef::at(hyp));
  return t;
}

const char* kOddUnsafe = R"(
kind nat type.
type z nat.
type s nat -> nat.
define fix ev : nat -> prop by
    ev z := true
  ; ev (s X) := ev X => false.
measure ev size 0.
define ind odd : nat -> prop by
    odd (s X) := odd X => false.
)";

}  // namespace

TEST_CASE("append corpus derivations check") {
  Script s = corpus("append.ld");
  CHECK(check_tree(s.defs, proof("append_member.ldp"), goal_of(s, "append_member")).ok);
  CHECK(check_tree(s.defs, proof("append_negative.ldp"), goal_of(s, "append_negative")).ok);
  Script si = corpus("append_ind.ld");
  CHECK(check_tree(si.defs, proof("append_functional.ldp"), goal_of(si, "append_functional"))
            .ok);
}

TEST_CASE("inconsistency derivation depends on the gate") {
  Script s = corpus("odd_inductive.ld");
  ProofTree p = proof("odd_bot.ldp");
  Sequent g = goal_of(s, "inconsistent");
  CheckResult unsafe = check_proof(s.defs, s.measure, p, g, true);
  CHECK(unsafe.ok);
  CheckResult gated = check_proof(s.defs, s.measure, p, g, false);
  CHECK_FALSE(gated.ok);
  CHECK(gated.reason.find("inductive predicate violates strict stratification") !=
        std::string::npos);
}

TEST_CASE("defL premise counts") {
  Script s = corpus("append.ld");
  ProofTree dl = left(Rule::kDeltaL, 0);
  CHECK(apply_rule(s.defs, dl, seq(s, {}, {"append (cons a nil) nil nil"}, "false"))
            .premises.empty());
  VarContext lkm{{"L", Type::base("lst")}, {"K", Type::base("lst")}, {"M", Type::base("lst")}};
  RuleInstance two = apply_rule(s.defs, dl, seq(s, lkm, {"append L K M"}, "false"));
  REQUIRE(two.premises.size() == 2);
  CHECK(two.clauses == std::vector<size_t>{0, 1});
  // Clause 1 identifies L with nil; clause 2 adds fresh variables for the tail.
  CHECK(two.premises[0].ctx.size() < two.premises[1].ctx.size());
  CHECK(apply_rule(s.defs, dl, seq(s, {}, {"eq a b"}, "false")).premises.empty());
}

TEST_CASE("muL premise shapes") {
  Script s = parse_script(kOddUnsafe);
  ProofTree mu = left(Rule::kMuL, 0, {node(Rule::kTopR), node(Rule::kTopR)});
  mu.term = TermRef::parse("\\x, ev x");
  RuleInstance r = apply_rule(s.defs, mu, seq(s, {}, {"odd (s z)"}, "false"));
  REQUIRE(r.premises.size() == 2);
  const Sequent& p1 = r.premises[0];
  REQUIRE(p1.ctx.size() == 1);
  REQUIRE(p1.hyps.size() == 1);
  std::string x = p1.ctx.begin()->first;
  VarContext xc{{x, Type::base("nat")}};
  CHECK(p1.hyps[0] ==
        parse_formula(s.defs.signature(), xc, "exists y, eq " + x + " (s y) /\\ (ev y => false)"));
  CHECK(p1.concl == parse_formula(s.defs.signature(), xc, "ev " + x));
  CHECK(r.premises[1].hyps[0] == parse_formula(s.defs.signature(), {}, "ev (s z)"));

  VarContext n{{"N", Type::base("nat")}};
  mu.term = TermRef::parse("\\x, ev N");
  CHECK_THROWS_AS(apply_rule(s.defs, mu, seq(s, n, {"odd (s z)"}, "false")), RuleError);
}

TEST_CASE("multicut accounting") {
  Script s = corpus("append.ld");
  ProofTree nullary = node(Rule::kMc, {node(Rule::kTopR)});
  CHECK(check_tree(s.defs, nullary, seq(s, {}, {}, "true")).ok);

  ProofTree mc = node(Rule::kMc, {node(Rule::kAx), node(Rule::kAx)});
  mc.cuts = {TermRef::parse("append nil nil nil")};
  mc.partition = {{0}};
  Sequent g = seq(s, {}, {"append nil nil nil"}, "append nil nil nil");
  CHECK(check_tree(s.defs, mc, g).ok);
  mc.partition = {{0, 0}};
  CHECK_FALSE(check_tree(s.defs, mc, g).ok);
  mc.partition = {{1}};
  CHECK_FALSE(check_tree(s.defs, mc, g).ok);
}

TEST_CASE("axiom is strict") {
  Script s = corpus("append.ld");
  CHECK(check_tree(s.defs, node(Rule::kAx), seq(s, {}, {"append nil nil nil"},
                                                "append nil nil nil"))
            .ok);
  CheckResult extra = check_tree(
      s.defs, node(Rule::kAx),
      seq(s, {}, {"append nil nil nil", "append nil nil nil"}, "append nil nil nil"));
  CHECK_FALSE(extra.ok);
  CHECK(extra.path == "root");
  CHECK_FALSE(extra.sequent.empty());
}

TEST_CASE("failure paths name the offending node") {
  Script s = corpus("append.ld");
  ProofTree bad = node(Rule::kAndR, {node(Rule::kTopR), node(Rule::kAx)});
  CheckResult r = check_tree(s.defs, bad, seq(s, {}, {}, "true /\\ append nil nil nil"));
  CHECK_FALSE(r.ok);
  CHECK(r.path == "root.1");
}

TEST_CASE("bounded search") {
  Script s = corpus("append.ld");
  auto t = search_bounded(s.defs, seq(s, {}, {}, "append nil nil nil"), 3);
  REQUIRE(t);
  CHECK(t->rule == Rule::kDeltaR);
  REQUIRE(t->premises.size() == 1);
  CHECK(t->premises[0].rule == Rule::kTopR);
  CHECK_FALSE(search_bounded(s.defs, seq(s, {}, {}, "false"), 6));

  Script ev = corpus("ev.ld");
  auto w = search_bounded(ev.defs, seq(ev, {}, {}, "exists x:nat, eq x z"), 4);
  REQUIRE(w);
  CHECK(w->rule == Rule::kExR);
  REQUIRE(w->term);
  CHECK(w->term->str() == "z");
  CHECK(check_tree(ev.defs, *w, seq(ev, {}, {}, "exists x:nat, eq x z")).ok);
}

TEST_CASE("proof files round trip") {
  for (const auto& e : fs::recursive_directory_iterator(LDMU_CORPUS_DIR)) {
    if (e.path().extension() != ".ldp") continue;
    CAPTURE(e.path().string());
    ProofTree a = read_proof(slurp(e.path()));
    std::string w = write_proof(a);
    ProofTree b = read_proof(w);
    CHECK(write_proof(b) == w);
    CHECK(a.size() == b.size());
  }
}

TEST_CASE("ground files round trip") {
  size_t n = 0;
  for (const auto& e : fs::directory_iterator(fs::path(LDMU_CORPUS_DIR) / "cutelim")) {
    if (e.path().extension() != ".ldg") continue;
    CAPTURE(e.path().string());
    GroundFile a = read_ground_file(slurp(e.path()));
    std::string w = write_ground_file(a);
    GroundFile b = read_ground_file(w);
    CHECK(write_ground_file(b) == w);
    CHECK(a.hyps == b.hyps);
    CHECK(a.concl == b.concl);
    ++n;
  }
  CHECK(n >= 20);
}

TEST_CASE("proof syntax errors carry positions") {
  CHECK_THROWS_AS(read_proof("(rule topR"), ParseError);
  CHECK_THROWS_WITH_AS(read_proof("(rule nosuch)"), doctest::Contains("unknown rule"), ParseError);
  CHECK_THROWS_AS(read_proof("(rule orR (side middle) (rule topR))"), ParseError);
}
