#ifndef LDMU_SEQUENT_HPP_
#define LDMU_SEQUENT_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldmu/definitions.hpp"
#include "ldmu/stratification.hpp"
#include "ldmu/subst.hpp"
#include "ldmu/term.hpp"
#include "ldmu/types.hpp"

namespace ldmu {

// X ; Gamma |- C. Hypotheses form a multiset; the vector order is the
// canonical occurrence order used by hypothesis indices.
struct Sequent {
  VarContext ctx;
  std::vector<Term> hyps;
  Term concl;
  std::string str() const;
};

bool same_multiset(const std::vector<Term>& a, const std::vector<Term>& b);
// Contexts as sets, hypotheses as multisets.
bool same_sequent(const Sequent& a, const Sequent& b);

enum class Rule {
  kTopR, kBotL, kAndL, kAndR, kOrL, kOrR, kImpL, kImpR,
  kAllL, kAllR, kExL, kExR, kAx, kMc, kWeaken, kContract,
  kDeltaL, kDeltaR, kMuL, kMuR
};
// File names: topR botL andL andR orL orR impL impR allL allR exL exR ax mc
// weaken contract defL defR muL muR.
const char* rule_name(Rule r);
std::optional<Rule> rule_from_name(const std::string& s);

// A term given either directly or as text to be parsed in the sequent's
// context at checking time.
struct TermRef {
  std::optional<Term> term;
  std::string text;
  static TermRef of(const Term& t) { return TermRef{t, ""}; }
  static TermRef parse(const std::string& s) { return TermRef{std::nullopt, s}; }
  std::string str() const { return term ? term->str() : text; }
};

// Selects a hypothesis occurrence by index or by formula (first equal one).
struct HypRef {
  std::optional<size_t> index;
  std::optional<TermRef> formula;
  static HypRef at(size_t i) { return HypRef{i, std::nullopt}; }
  static HypRef of(const Term& f) { return HypRef{std::nullopt, TermRef::of(f)}; }
  static HypRef parse(const std::string& s) { return HypRef{std::nullopt, TermRef::parse(s)}; }
  std::string str() const;
};

struct ProofTree {
  Rule rule = Rule::kTopR;
  std::vector<HypRef> hyps;            // left rules (one); weaken (one or more)
  std::optional<TermRef> term;         // allL/exR witness, muL invariant
  std::string name;                    // allR/exL eigenvariable (optional)
  std::optional<size_t> clause;        // defR clause index among p's clauses
  std::optional<int> side;             // orR: 0 left, 1 right
  std::vector<TermRef> cuts;           // mc cut formulas
  // mc: goal hypothesis indices forming Delta_i for each cut; the rest is Gamma.
  std::vector<std::vector<size_t>> partition;
  // Ground files only: index tuples of the first family_keys.size() premises
  // (allR/exL: one term; muL: the argument tuple).
  std::vector<std::vector<TermRef>> family_keys;
  std::vector<ProofTree> premises;

  size_t size() const;
};

// Raised for an invalid rule instance.
class RuleError : public Error {
 public:
  using Error::Error;
};

// A node's rule applied to its conclusion: premises in order, with the
// payload resolved against the sequent.
struct RuleInstance {
  std::vector<Sequent> premises;
  std::vector<Term> principals;      // selected hypotheses (weaken: in removal order)
  std::optional<Term> term;          // witness or invariant
  std::string eigen;                 // allR/exL
  std::vector<size_t> clauses;       // defL: clause per premise; defR: the clause
  std::vector<Substitution> thetas;  // defL: unifier per premise
  std::vector<Term> cuts;
};

// Throws RuleError. Premise count is not checked here.
RuleInstance apply_rule(const DefinitionSet& defs, const ProofTree& node, const Sequent& goal);

// Fresh eigenvariable name: not in `ctx` and not a constant.
std::string fresh_eigen(const Signature& sig, const VarContext& ctx, const std::string& hint);

struct CheckResult {
  bool ok = true;
  std::string path;  // "root", "root.1.0", ...
  std::string reason;
  std::string sequent;  // end sequent of the failing node
  explicit operator bool() const { return ok; }
};

// Reasons a definition set is refused by the stratification gate, or none.
std::optional<std::string> stratification_gate(const DefinitionSet& defs, const LevelMeasure& m);

// Throws RuleError when `s` is not a well-formed sequent.
void validate_sequent(const Signature& sig, const Sequent& s);

// Node-by-node check without the gate.
CheckResult check_tree(const DefinitionSet& defs, const ProofTree& tree, const Sequent& goal);
CheckResult check_proof(const DefinitionSet& defs, const LevelMeasure& m, const ProofTree& tree,
                        const Sequent& goal, bool unsafe_skip_strat);

struct SearchOptions {
  // Invariants offered to muL, per inductive predicate.
  std::map<std::string, Term> invariants;
  // Size bound for closed witness candidates of allL/exR.
  size_t witness_size = 3;
};
std::optional<ProofTree> search_bounded(const DefinitionSet& defs, const Sequent& goal,
                                        int depth, const SearchOptions& opts = {});

}  // namespace ldmu

#endif  // LDMU_SEQUENT_HPP_
