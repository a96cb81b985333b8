#ifndef LDMU_UNIFY_HPP_
#define LDMU_UNIFY_HPP_

#include <map>
#include <optional>
#include <string>

#include "ldmu/subst.hpp"
#include "ldmu/term.hpp"
#include "ldmu/types.hpp"

namespace ldmu {

// Raised when a unification problem leaves the higher-order pattern fragment.
class NonPatternError : public Error {
 public:
  using Error::Error;
};

// Every occurrence of a `ctx` variable in `t` is applied to distinct
// lambda-bound variables of `t`.
bool is_pattern(const Term& t, const VarContext& ctx);

// The unique rho over the variables of `x` with rho(h) == a. Free variables of
// `a` are rigid. Throws NonPatternError if `h` is not a pattern over `x`.
std::optional<Substitution> pattern_match(const Term& h, const VarContext& x,
                                          const Term& a);

// Most general unifier of `s` and `t` where the variables of `flex` may be
// instantiated and every other free variable is rigid. The result has domain
// `flex`; fresh variables introduced by pruning appear in its range.
//
// `rank` breaks the choice in variable-variable equations: the variable with
// the higher rank is bound, and on equal rank the one from `s`.
std::optional<Substitution> pattern_unify(
    const Term& s, const Term& t, const VarContext& flex,
    const std::map<std::string, int>& rank = {});

}  // namespace ldmu

#endif  // LDMU_UNIFY_HPP_
