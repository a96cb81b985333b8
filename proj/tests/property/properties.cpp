#include "doctest.h"
#include "suites.hpp"

using namespace ldmu::props;

namespace {

constexpr size_t kCases = 500;

void expect(const SuiteResult& r, size_t cases, size_t min_interesting) {
  CHECK_MESSAGE(r.ok(), r.first_failure);
  CHECK(r.cases == cases);
  CHECK(r.interesting >= min_interesting);
}

}  // namespace

TEST_CASE("normalize is idempotent and yields normal forms") {
  expect(normalize_idempotence(1001, kCases), kCases, kCases / 4);
}

TEST_CASE("substitution composition") {
  expect(substitution_composition(1002, kCases), kCases, kCases / 4);
}

TEST_CASE("pattern matching is sound") {
  expect(matching_soundness(1003, kCases), kCases, kCases / 10);
}

TEST_CASE("unifiers agree with a brute-force oracle") {
  expect(unifier_vs_brute_force(1004, kCases), kCases, kCases / 10);
}

TEST_CASE("search results are accepted by the checker") {
  expect(search_check_round_trip(1005, kCases), kCases, kCases / 4);
}

TEST_CASE("weakening preserves derivability") {
  expect(weakening(1006, kCases), kCases, kCases);
}

TEST_CASE("random ground cuts normalize and keep their conclusion") {
  expect(ground_cut_elimination(LDMU_CORPUS_DIR "/cutelim/defs.ld", 1007, 200), 200, 20);
}
