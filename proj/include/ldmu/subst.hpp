#ifndef LDMU_SUBST_HPP_
#define LDMU_SUBST_HPP_

#include <map>
#include <optional>
#include <string>

#include "ldmu/term.hpp"
#include "ldmu/types.hpp"

namespace ldmu {

// theta : Y -> X. Every variable of the domain X has an image lying over Y;
// variables without an explicit binding are mapped to themselves.
class Substitution {
 public:
  Substitution() = default;
  explicit Substitution(VarContext domain) : domain_(std::move(domain)) {}

  static Substitution identity(const VarContext& domain) {
    return Substitution(domain);
  }

  // Throws if `name` is not in the domain or the image has the wrong type.
  void bind(const std::string& name, const Term& image);

  const VarContext& domain() const { return domain_; }
  // Image of a domain variable (itself when unbound).
  Term image(const std::string& name) const;
  bool binds(const std::string& name) const { return images_.count(name) > 0; }

  // Smallest context containing the free variables of all images.
  VarContext range() const;
  bool grounding() const { return range().empty(); }

  // `this` followed by `next`: x -> next(this(x)).
  Substitution then(const Substitution& next) const;
  // Restriction to a sub-context of the domain.
  Substitution restrict_to(const VarContext& sub) const;

  std::string str() const;

 private:
  VarContext domain_;
  std::map<std::string, Term> images_;
};

// Normal form of (\x1..\xn. t) t1 .. tn. Throws Error when `t` mentions a free
// variable outside the domain.
Term apply_subst(const Substitution& theta, const Term& t);

}  // namespace ldmu

#endif  // LDMU_SUBST_HPP_
