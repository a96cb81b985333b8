#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "ldmu/script.hpp"
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

}  // namespace

TEST_CASE("ev script parses to two clauses") {
  Script s = parse_script(slurp(fs::path(LDMU_CORPUS_DIR) / "ev.ld"));
  CHECK(s.defs.clauses_for("ev").size() == 2);
  CHECK(s.defs.kind_of("ev") == PredKind::kFixedPoint);
}

TEST_CASE("size measure defaults to weight one") {
  Script s = parse_script(R"(
kind ty type.
type unit ty.
define fix red : ty -> prop by red unit := true.
measure red size 0.
)");
  REQUIRE(s.measures.size() == 1);
  CHECK(s.measures[0].pred == "red");
  REQUIRE(s.measures[0].weights.size() == 1);
  CHECK(s.measures[0].weights[0] == std::make_pair(size_t{0}, 1L));
  CHECK_FALSE(s.measure.strict("red"));
  CHECK(s.measure.strict("anything_else"));
}

TEST_CASE("measure with weight and base") {
  Script s = parse_script(R"(
kind nat type.
type z nat.
define fix ev : nat -> prop by ev z := true.
measure ev size 0 weight 3 base 2.
)");
  auto e = s.measure.get("ev");
  CHECK(e.base == 2);
  REQUIRE(e.weights.size() == 1);
  CHECK(e.weights[0].second == 3);
}

TEST_CASE("missing terminating dot is a positioned parse error") {
  const char* text = "kind nat type.\ntype z nat\n";
  try {
    parse_script(text);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.pos().line == 3);
    CHECK(std::string(e.what()).find("'.'") != std::string::npos);
  }
}

TEST_CASE("resolve errors") {
  CHECK_THROWS_WITH_AS(parse_script("type z nat."), doctest::Contains("nat"), ParseError);
  CHECK_THROWS_AS(parse_script("kind nat type. type z nat. theorem t : q z. proof auto 2."),
                  ParseError);
  CHECK_THROWS_AS(parse_script(R"(
kind nat type. type z nat.
define fix p : nat -> prop by p z := true.
measure p strict.
measure p strict.
)"),
                  ParseError);
  CHECK_THROWS_AS(parse_script(R"(
kind nat type. type z nat.
define fix p : nat -> prop by p z := true.
measure p size 3.
)"),
                  Error);
}

TEST_CASE("theorem proof references") {
  Script s = parse_script(slurp(fs::path(LDMU_CORPUS_DIR) / "append.ld"));
  REQUIRE(s.theorems.size() == 3);
  CHECK(s.theorems[0].proof.kind == ProofRef::Kind::kFile);
  CHECK(s.theorems[0].proof.path == "append_member.ldp");
  CHECK(s.theorems[2].proof.kind == ProofRef::Kind::kAuto);
  CHECK(s.theorems[2].proof.depth == 3);
}

TEST_CASE("print and reparse every corpus script") {
  size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(LDMU_CORPUS_DIR)) {
    if (e.path().extension() != ".ld") continue;
    CAPTURE(e.path().string());
    Script a = parse_script(slurp(e.path()));
    std::string printed = print_script(a);
    Script b = parse_script(printed);
    CHECK(a == b);
    CHECK(print_script(b) == printed);
    ++n;
  }
  CHECK(n >= 10);
}
