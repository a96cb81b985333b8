#ifndef LDMU_STRATIFICATION_HPP_
#define LDMU_STRATIFICATION_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldmu/definitions.hpp"
#include "ldmu/subst.hpp"
#include "ldmu/term.hpp"
#include "ldmu/types.hpp"

namespace ldmu {

// lvl(p t) = base + sum of weight * size(t[index]). A predicate without
// weights is strict. Predicates that are not mentioned are strict with a
// base chosen by the solver.
struct LevelMeasure {
  struct Entry {
    long base = 0;
    std::vector<std::pair<size_t, long>> weights;
  };
  std::map<std::string, Entry> entries;

  bool declared(const std::string& p) const { return entries.count(p) > 0; }
  Entry get(const std::string& p) const;
  bool strict(const std::string& p) const { return get(p).weights.empty(); }
  // Throws if a weighted index is not a first-order argument of p.
  void validate(const Signature& sig) const;
  std::string str(const std::string& p) const;
};

// constant + sum coeffs[v] * s_v, plus base(pred) when `pred` is set (only
// in the unsolved form used internally by the solver).
struct LevelExpr {
  std::optional<std::string> pred;
  long constant = 0;
  std::map<std::string, long> coeffs;
  bool unbounded = false;
  std::string str() const;
};

// max over branches.
struct SymbolicLevel {
  std::vector<LevelExpr> branches;
  bool exact = true;
  std::string str() const;
};

SymbolicLevel lvl_symbolic(const Signature& sig, const Term& f,
                           const VarContext& vars, const LevelMeasure& m);

struct GroundLevel {
  long value = 0;
  bool unbounded = false;  // omega
  bool exact = true;
  std::string str() const;
};
bool operator<(const GroundLevel& a, const GroundLevel& b);
bool operator==(const GroundLevel& a, const GroundLevel& b);

// Throws Error on non-ground input.
GroundLevel lvl_ground(const Signature& sig, const Term& f, const LevelMeasure& m,
                       size_t enum_bound = 8);

enum class Verdict { kVerified, kViolated, kInconclusive };
const char* to_string(Verdict v);

struct ClauseCheck {
  size_t index = 0;  // position in DefinitionSet::clauses(); eq is last
  std::string pred;
  std::string clause;
  Verdict verdict = Verdict::kVerified;
  std::string head_level;
  std::string body_level;
  std::string witness;
};

struct StratReport {
  LevelMeasure solved;  // declared measures with solved bases
  std::vector<ClauseCheck> clauses;
  bool ok() const;
};

StratReport check_ground_stratified(const DefinitionSet& defs, const LevelMeasure& m);

// Base-only levels for every predicate, or none.
std::optional<std::map<std::string, long>> check_strict(const DefinitionSet& defs);

struct InductiveCheck {
  std::string pred;
  bool ok = true;
  std::string reason;
};
std::vector<InductiveCheck> check_inductive_restriction(const DefinitionSet& defs,
                                                        const LevelMeasure& m);

struct OracleViolation {
  Substitution rho;
  GroundLevel head;
  GroundLevel body;
};
std::vector<OracleViolation> random_grounding_oracle(const Signature& sig,
                                                     const Clause& c,
                                                     const LevelMeasure& m,
                                                     size_t trials, size_t size_bound,
                                                     uint64_t seed);

}  // namespace ldmu

#endif  // LDMU_STRATIFICATION_HPP_
