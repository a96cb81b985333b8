#include "ldmu/subst.hpp"

#include <set>
#include <sstream>

namespace ldmu {

void Substitution::bind(const std::string& name, const Term& image) {
  auto ty = domain_.lookup(name);
  if (!ty) throw Error("substitution binds '" + name + "' outside its domain");
  Type it = type_of(image);
  if (it != *ty)
    throw Error("substitution image for '" + name + "' has type " + it.str() +
                ", expected " + ty->str());
  images_.insert_or_assign(name, image);
}

Term Substitution::image(const std::string& name) const {
  auto it = images_.find(name);
  if (it != images_.end()) return it->second;
  auto ty = domain_.lookup(name);
  if (!ty) throw Error("'" + name + "' is not in the substitution domain");
  return normalize(Term::var(name, *ty));
}

VarContext Substitution::range() const {
  VarContext out;
  for (const auto& [x, ty] : domain_) {
    for (const auto& [y, yt] : free_vars_typed(image(x)))
      if (!out.contains(y)) out.add(y, yt);
  }
  return out;
}

Substitution Substitution::then(const Substitution& next) const {
  Substitution out(domain_);
  for (const auto& [x, ty] : domain_) out.bind(x, apply_subst(next, image(x)));
  return out;
}

Substitution Substitution::restrict_to(const VarContext& sub) const {
  Substitution out(sub);
  for (const auto& [x, ty] : sub)
    if (binds(x)) out.bind(x, images_.at(x));
  return out;
}

std::string Substitution::str() const {
  std::ostringstream os;
  os << "[";
  bool first = true;
  for (const auto& [x, t] : images_) {
    if (!first) os << ", ";
    first = false;
    os << x << " := " << t.str();
  }
  os << "]";
  return os.str();
}

namespace {

Term replace_all(const Term& t, const Substitution& theta) {
  switch (t.kind()) {
    case Term::Kind::kVar:
      if (!theta.domain().contains(t.name()))
        throw Error("term mentions '" + t.name() +
                    "' outside the substitution domain");
      return theta.binds(t.name()) ? theta.image(t.name()) : t;
    case Term::Kind::kApp:
      return Term::app(replace_all(t.fun(), theta), replace_all(t.arg(), theta));
    case Term::Kind::kAbs:
      return Term::abs(t.name(), t.type(), replace_all(t.body(), theta));
    default: return t;
  }
}

}  // namespace

Term apply_subst(const Substitution& theta, const Term& t) {
  return normalize(replace_all(t, theta));
}

}  // namespace ldmu
