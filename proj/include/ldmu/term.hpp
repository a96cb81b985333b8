#ifndef LDMU_TERM_HPP_
#define LDMU_TERM_HPP_

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ldmu/types.hpp"

namespace ldmu {

// Simply typed lambda terms. Free variables are named and carry their type;
// constants carry the type they are used at (this is how the logical
// families forall/exists/eq are instantiated); bound variables are de Bruijn
// indices. Structural equality is therefore alpha-equivalence.
class Term {
 public:
  enum class Kind { kVar, kConst, kBound, kApp, kAbs };

  static Term var(std::string name, Type type);
  static Term constant(std::string name, Type type);
  static Term bound(size_t index);
  static Term app(Term fun, Term arg);
  static Term apps(Term head, const std::vector<Term>& args);
  // Raw abstraction; `body` refers to the binder as bound(0).
  static Term abs(std::string hint, Type binder_type, Term body);
  // Abstracts the free variable `name` of `body`.
  static Term lam(const std::string& name, const Type& type, const Term& body);

  Kind kind() const;
  bool is_var() const { return kind() == Kind::kVar; }
  bool is_const() const { return kind() == Kind::kConst; }
  bool is_bound() const { return kind() == Kind::kBound; }
  bool is_app() const { return kind() == Kind::kApp; }
  bool is_abs() const { return kind() == Kind::kAbs; }

  const std::string& name() const;  // var, const, abs hint
  const Type& type() const;         // var, const, abs binder
  size_t index() const;             // bound
  const Term& fun() const;          // app
  const Term& arg() const;          // app
  const Term& body() const;         // abs

  size_t hash() const;

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
  // Arbitrary but deterministic total order.
  friend bool operator<(const Term& a, const Term& b);

  std::string str() const;

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Term make(Node n);
  std::shared_ptr<const Node> node_;
};

struct Term::Node {
  Kind kind;
  std::string name;
  std::optional<Type> type;
  size_t index = 0;
  std::optional<Term> left;
  std::optional<Term> right;
  size_t hash = 0;
};

inline Term::Kind Term::kind() const { return node_->kind; }
inline const std::string& Term::name() const { return node_->name; }
inline const Type& Term::type() const { return *node_->type; }
inline size_t Term::index() const { return node_->index; }
inline const Term& Term::fun() const { return *node_->left; }
inline const Term& Term::arg() const { return *node_->right; }
inline const Term& Term::body() const { return *node_->left; }
inline size_t Term::hash() const { return node_->hash; }

struct TermHash {
  size_t operator()(const Term& t) const { return t.hash(); }
};

// Head and argument spine of an application.
std::pair<Term, std::vector<Term>> spine(const Term& t);

// Free variable names in order of first occurrence.
std::vector<std::string> free_vars(const Term& t);
std::vector<std::pair<std::string, Type>> free_vars_typed(const Term& t);
bool occurs_free(const std::string& name, const Term& t);
bool mentions_constant(const Term& t, const std::string& name);
bool has_loose_bound(const Term& t);

// size(const) = size(var) = size(bound) = 1, size(app f a) = size f + size a,
// size(abs) = 1 + size(body).
size_t term_size(const Term& t);

// De Bruijn utilities.
Term shift(const Term& t, long delta, size_t cutoff = 0);
// Substitutes `value` for bound(0) in `body` (the body of an abstraction).
Term instantiate(const Term& body, const Term& value);

// Type of a term from its own annotations; bound variables are typed by the
// enclosing binders plus `outer` (innermost last). Throws Error.
Type type_of(const Term& t, const std::vector<Type>& outer = {});

// Checks that every constant agrees with `sig` (or is a well-formed instance
// of a logical constant) and every free variable agrees with `ctx`, and
// returns the type. Throws Error: unbound identifier, application type
// mismatch, binder type mismatch.
Type infer_type(const Signature& sig, const VarContext& ctx, const Term& t);

// Beta-normal, eta-long form.
Term normalize(const Term& t);
bool is_normal(const Term& t);

// Replace free variable `name` everywhere (no normalization).
Term replace_var(const Term& t, const std::string& name, const Term& value);

// Logical formula construction; results are normal when inputs are.
namespace mk {
Term top();
Term bot();
Term conj(const Term& a, const Term& b);
Term disj(const Term& a, const Term& b);
Term imp(const Term& a, const Term& b);
Term forall(const std::string& x, const Type& t, const Term& body);
Term exists(const std::string& x, const Type& t, const Term& body);
Term eq(const Term& a, const Term& b);
Term eq_const(const Type& t);
Term quantifier_const(bool universal, const Type& t);
// Conjunction/disjunction of a list, right nested; empty -> top/bot.
Term conj_all(const std::vector<Term>& fs);
Term disj_all(const std::vector<Term>& fs);
}  // namespace mk

// Structural view of a normal formula.
struct FormulaView {
  enum class Kind { kTop, kBot, kAnd, kOr, kImp, kAll, kEx, kAtom, kOther };
  Kind kind = Kind::kOther;
  std::optional<Term> lhs, rhs;  // binary connectives
  std::optional<Type> qtype;     // quantifiers: bound variable type
  std::optional<Term> qbody;     // quantifiers: the abstraction
  std::string pred;              // atoms: predicate constant name
  std::vector<Term> args;        // atoms
};
FormulaView view(const Term& f);
bool is_atom(const Term& f);
// Instantiate a quantified formula's abstraction with `t`, normalized.
Term open_quantifier(const Term& abstraction, const Term& t);

}  // namespace ldmu

#endif  // LDMU_TERM_HPP_
