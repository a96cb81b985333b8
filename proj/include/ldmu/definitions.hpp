#ifndef LDMU_DEFINITIONS_HPP_
#define LDMU_DEFINITIONS_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldmu/subst.hpp"
#include "ldmu/term.hpp"
#include "ldmu/types.hpp"

namespace ldmu {

enum class PredKind { kFixedPoint, kInductive };
const char* to_string(PredKind k);

// H :=_X B (fixed point) or H :=mu_X B (inductive).
struct Clause {
  PredKind kind = PredKind::kFixedPoint;
  VarContext vars;
  Term head;
  Term body;
  std::string pred() const;
  std::string str() const;
};

class DefinitionSet {
 public:
  DefinitionSet() = default;
  explicit DefinitionSet(Signature sig) : sig_(std::move(sig)) {}

  const Signature& signature() const { return sig_; }
  Signature& signature() { return sig_; }

  // Marks `pred` as defined with the given kind (needed for predicates with
  // no clauses). Throws on kind conflicts and on eq.
  void define(const std::string& pred, PredKind kind);
  // Validates and appends a clause: atomic pattern head of a declared
  // predicate, every variable occurring in the head, body of type prop.
  void add_clause(const Clause& c);

  std::optional<PredKind> kind_of(const std::string& pred) const;
  bool is_defined(const std::string& pred) const { return kind_of(pred).has_value(); }
  bool is_inductive(const std::string& pred) const {
    return kind_of(pred) == PredKind::kInductive;
  }

  const std::vector<Clause>& clauses() const { return clauses_; }
  std::vector<Clause> clauses_for(const std::string& pred) const;
  // As clauses_for, but the built-in eq clause is produced at the type of
  // the given atom.
  std::vector<Clause> clauses_for_atom(const Term& atom) const;
  // User-defined predicates in order of definition.
  const std::vector<std::string>& predicates() const { return order_; }

 private:
  Signature sig_;
  std::vector<Clause> clauses_;
  std::map<std::string, PredKind> kinds_;
  std::vector<std::string> order_;
};

// The clause eq X X :=_{X} true at type alpha.
Clause eq_clause(const Type& alpha);

// defn(H :=_X B, A, theta, B'): B' = B rho for the rho with H rho = A theta.
std::optional<Term> defn_expand(const Clause& c, const Term& a,
                                const Substitution& theta);

// One clause instance for the left rule: the most general theta (on the
// atom's context `y`) for which defn holds, with its rho and B'.
struct DefnInstance {
  Substitution theta;
  Substitution rho;
  Term body;
};
std::optional<DefnInstance> defn_unify(const Clause& c, const Term& a,
                                       const VarContext& y);

// The single-clause form p x :=mu B p x.
struct FixedPointOperator {
  std::string pred;
  Type pred_type;
  std::vector<Type> arg_types;
  Term op;  // closed, of type pred_type -> pred_type
};

enum class OperatorForm {
  // \p.\x. \/_i exists X_i. eq x1 t1 /\ ... /\ eq xk tk /\ B_i
  kLiteral,
  // Head arguments that are clause variables are substituted instead of
  // equated (last occurrence wins), trivial equations and true conjuncts are
  // dropped, and the existential covers only the remaining variables.
  kCompact,
};

FixedPointOperator to_fixed_point_operator(const DefinitionSet& defs,
                                           const std::string& pred,
                                           OperatorForm form = OperatorForm::kLiteral);

// Replaces every occurrence of constant `name` by `value` (no normalization).
Term replace_const(const Term& t, const std::string& name, const Term& value);

struct Occurrence {
  std::vector<int> path;  // child indices: 0/1 for connectives, 0 for binders
  bool positive = true;
  int implication_depth = 0;
  Term atom;
};

struct PolarityReport {
  std::vector<Occurrence> occurrences;
  bool only_positive() const;
};

PolarityReport polarity(const Term& f, const std::string& pred);

}  // namespace ldmu

#endif  // LDMU_DEFINITIONS_HPP_
