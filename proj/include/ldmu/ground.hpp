#ifndef LDMU_GROUND_HPP_
#define LDMU_GROUND_HPP_

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ldmu/definitions.hpp"
#include "ldmu/sequent.hpp"
#include "ldmu/stratification.hpp"
#include "ldmu/subst.hpp"
#include "ldmu/term.hpp"
#include "ldmu/types.hpp"

namespace ldmu {

// A signature whose first-order types all have finitely many ground terms.
class FinitarySignature {
 public:
  const Signature& sig() const { return sig_; }
  // Full enumeration; throws Error for a type with infinitely many terms.
  const std::vector<Term>& ground(const Type& t) const;
  // Cartesian product in lexicographic order.
  std::vector<std::vector<Term>> ground_tuples(const std::vector<Type>& ts) const;

 private:
  friend FinitarySignature check_finitary(const Signature& sig);
  Signature sig_;
  mutable std::map<Type, std::vector<Term>> cache_;
};

// Throws Error naming the offending type and its constructor cycle.
FinitarySignature check_finitary(const Signature& sig);

struct GroundSequent {
  std::vector<Term> hyps;  // multiset
  Term concl;
  std::string str() const;
};
bool same_ground_sequent(const GroundSequent& a, const GroundSequent& b);

struct GroundNode;
using GroundDerivation = std::shared_ptr<const GroundNode>;

// Every node records its end sequent. Left rules name their principal
// formula; any occurrence of it may be taken since hypotheses form a
// multiset. allR/exL/muL carry total families indexed by `keys`; muL lists
// the family first and the main premise last.
struct GroundNode {
  Rule rule = Rule::kTopR;
  GroundSequent seq;
  std::optional<Term> principal;
  std::optional<Term> term;       // allL/exR witness, muL invariant
  size_t clause = 0;              // defR
  std::vector<size_t> clauses;    // defL: clause per premise
  int side = 0;                   // orR
  std::vector<std::vector<Term>> keys;
  std::vector<GroundDerivation> premises;
};

size_t derivation_size(const GroundDerivation& d);
size_t derivation_height(const GroundDerivation& d);
bool is_cut_free(const GroundDerivation& d);
size_t count_rule(const GroundDerivation& d, Rule r);

// Premise sequents a node requires, in order (not for mc). Throws RuleError.
std::vector<GroundSequent> ground_premises(const DefinitionSet& defs,
                                           const FinitarySignature& fsig, const GroundNode& n);

// Subderivations already accepted; lets repeated checks over shared
// subderivations skip them.
struct GroundCheckCache {
  std::set<const GroundNode*> verified;
};

CheckResult check_ground_tree(const DefinitionSet& defs, const FinitarySignature& fsig,
                              const GroundDerivation& d, const GroundSequent& goal,
                              GroundCheckCache* cache = nullptr);
CheckResult check_ground_derivation(const DefinitionSet& defs, const LevelMeasure& m,
                                    const FinitarySignature& fsig, const GroundDerivation& d,
                                    const GroundSequent& goal, bool unsafe_skip_strat,
                                    GroundCheckCache* cache = nullptr);

// Builders that fill in the end sequent from the premises.
namespace gmk {
GroundDerivation node(Rule r, GroundSequent seq, std::vector<GroundDerivation> premises = {});
GroundDerivation weaken_with(const GroundDerivation& d, const std::vector<Term>& extra);
GroundDerivation contract_all(const GroundDerivation& d, const std::vector<Term>& dup);
// mc over cut premises and a main premise whose hypotheses contain the cut formulas.
GroundDerivation mc(std::vector<GroundDerivation> cuts, const GroundDerivation& main);
}  // namespace gmk

// F |- F for a ground formula.
GroundDerivation identity(const DefinitionSet& defs, const FinitarySignature& fsig,
                          const Term& f);

// Reads a ground derivation from its file form against an end sequent.
GroundDerivation build_ground(const DefinitionSet& defs, const FinitarySignature& fsig,
                              const ProofTree& t, const GroundSequent& goal);
ProofTree ground_to_tree(const GroundDerivation& d);

struct InterpretStats {
  // (source premises, ground premises) for every interpreted defL node.
  std::vector<std::pair<size_t, size_t>> delta_left;
};

// Ground instance of an accepted LD^mu derivation under a grounding of its
// context. Throws Error for non-grounding substitutions and non-finitary
// types.
GroundDerivation ground_interpret(const DefinitionSet& defs, const FinitarySignature& fsig,
                                  const ProofTree& tree, const Sequent& goal,
                                  const Substitution& delta, InterpretStats* stats = nullptr);

// As ground_interpret, for many groundings of one (tree, goal) pair. Results
// share subderivations that do not depend on the grounding.
class GroundInterpreter {
 public:
  GroundInterpreter(const DefinitionSet& defs, const FinitarySignature& fsig,
                    const ProofTree& tree, const Sequent& goal);
  ~GroundInterpreter();
  GroundDerivation run(const Substitution& delta);
  // defL counts over every node interpreted so far.
  const InterpretStats& stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// All groundings of a context, in enumeration order.
std::vector<Substitution> all_groundings(const FinitarySignature& fsig, const VarContext& ctx);

// Cut reduction.
namespace cases {
inline constexpr const char* kEssential = "essential cases";
inline constexpr const char* kLeftCommutative = "left-commutative cases";
inline constexpr const char* kInductive = "inductive cases";
inline constexpr const char* kStructural = "structural cases";
inline constexpr const char* kLeftAxiom = "left axiom cases";
inline constexpr const char* kLeftMulticut = "left multicut case";
inline constexpr const char* kRightAxiom = "right axiom case";
inline constexpr const char* kRightMulticut = "right multicut case";
inline constexpr const char* kRightCommutative = "right-commutative cases";
}  // namespace cases

struct Reduct {
  GroundDerivation d;
  std::string case_name;
};

// One step on a derivation ending in mc. Throws Error otherwise.
Reduct reduce_step(const DefinitionSet& defs, const FinitarySignature& fsig,
                   const GroundDerivation& d);

// mu(Psi, Pi_S): from Delta |- D[p] to Delta |- D[S]. `family` maps argument
// tuples of p to derivations of B S u |- S u.
GroundDerivation unfold(const DefinitionSet& defs, const FinitarySignature& fsig,
                        const GroundDerivation& psi, const std::string& pred, const Term& s,
                        const std::map<std::vector<Term>, GroundDerivation>& family);

struct TraceRecord {
  size_t step = 0;
  std::string case_name;
  std::string path;
  size_t size = 0;
};

struct NormalizeResult {
  GroundDerivation d;
  bool complete = false;  // false: fuel exhausted
  size_t steps = 0;
  std::vector<TraceRecord> trace;
};

// Innermost mc first, leftmost among siblings.
NormalizeResult normalize_derivation(const DefinitionSet& defs, const FinitarySignature& fsig,
                                     const GroundDerivation& d, size_t fuel = 100000);

struct NoBotReport {
  bool ok = true;
  std::vector<std::string> cases;  // rule-by-rule analysis at the root
  GroundDerivation counterexample;
};

// Cut-free backward search for |- false up to `depth`.
NoBotReport verify_no_bot(const DefinitionSet& defs, const FinitarySignature& fsig, int depth);

// Bounded cut-free ground search for an arbitrary sequent.
GroundDerivation ground_search(const DefinitionSet& defs, const FinitarySignature& fsig,
                               const GroundSequent& goal, int depth);

}  // namespace ldmu

#endif  // LDMU_GROUND_HPP_
