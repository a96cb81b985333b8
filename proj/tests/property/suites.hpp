#ifndef LDMU_TESTS_PROPERTY_SUITES_HPP_
#define LDMU_TESTS_PROPERTY_SUITES_HPP_

#include <cstdint>
#include <string>

namespace ldmu::props {

struct SuiteResult {
  size_t cases = 0;
  size_t failures = 0;
  size_t interesting = 0;  // cases that exercised the non-vacuous branch
  std::string first_failure;
  bool ok() const { return failures == 0; }
};

SuiteResult normalize_idempotence(uint64_t seed, size_t n);
SuiteResult substitution_composition(uint64_t seed, size_t n);
SuiteResult matching_soundness(uint64_t seed, size_t n);
// Soundness of pattern_unify, plus: every ground solution over small terms
// exists only when a unifier does and is an instance of it.
SuiteResult unifier_vs_brute_force(uint64_t seed, size_t n);
SuiteResult search_check_round_trip(uint64_t seed, size_t n);
SuiteResult weakening(uint64_t seed, size_t n);
// mc of two ground cut-free derivations found by search; `defs_path` is a
// finitary script.
SuiteResult ground_cut_elimination(const std::string& defs_path, uint64_t seed, size_t n);

}  // namespace ldmu::props

#endif  // LDMU_TESTS_PROPERTY_SUITES_HPP_
