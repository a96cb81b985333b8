#include "ldmu/types.hpp"

#include <algorithm>
#include <sstream>

namespace ldmu {

Type Type::base(std::string name) {
  return Type(std::make_shared<const Node>(
      Node{Kind::kBase, std::move(name), std::nullopt, std::nullopt}));
}

Type Type::prop() {
  static const Type p(std::make_shared<const Node>(
      Node{Kind::kProp, "prop", std::nullopt, std::nullopt}));
  return p;
}

Type Type::arrow(Type dom, Type cod) {
  return Type(std::make_shared<const Node>(
      Node{Kind::kArrow, "", std::move(dom), std::move(cod)}));
}

Type Type::arrows(const std::vector<Type>& doms, Type cod) {
  Type t = std::move(cod);
  for (auto it = doms.rbegin(); it != doms.rend(); ++it) t = arrow(*it, t);
  return t;
}

const std::string& Type::name() const { return node_->name; }
const Type& Type::dom() const { return *node_->dom; }
const Type& Type::cod() const { return *node_->cod; }

std::vector<Type> Type::arg_types() const {
  std::vector<Type> out;
  const Type* t = this;
  while (t->is_arrow()) {
    out.push_back(t->dom());
    t = &t->cod();
  }
  return out;
}

Type Type::target() const {
  const Type* t = this;
  while (t->is_arrow()) t = &t->cod();
  return *t;
}

bool Type::first_order() const {
  switch (kind()) {
    case Kind::kBase: return true;
    case Kind::kProp: return false;
    case Kind::kArrow: return dom().first_order() && cod().first_order();
  }
  return false;
}

bool Type::predicate() const {
  if (is_prop()) return true;
  if (is_arrow()) return dom().first_order() && cod().predicate();
  return false;
}

bool operator==(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Type::Kind::kBase: return a.name() == b.name();
    case Type::Kind::kProp: return true;
    case Type::Kind::kArrow: return a.dom() == b.dom() && a.cod() == b.cod();
  }
  return false;
}

bool operator<(const Type& a, const Type& b) {
  if (a.kind() != b.kind()) return a.kind() < b.kind();
  switch (a.kind()) {
    case Type::Kind::kBase: return a.name() < b.name();
    case Type::Kind::kProp: return false;
    case Type::Kind::kArrow:
      if (a.dom() != b.dom()) return a.dom() < b.dom();
      return a.cod() < b.cod();
  }
  return false;
}

std::string Type::str() const {
  switch (kind()) {
    case Kind::kBase: return name();
    case Kind::kProp: return "prop";
    case Kind::kArrow: {
      std::string d = dom().str();
      if (dom().is_arrow()) d = "(" + d + ")";
      return d + " -> " + cod().str();
    }
  }
  return "?";
}

namespace logic {
bool is_logical(const std::string& name) {
  return name == kTop || name == kBot || name == kAnd || name == kOr ||
         name == kImp || name == kAll || name == kEx || name == kEq;
}
}  // namespace logic

void Signature::declare_base_type(const std::string& name) {
  if (name == "prop") throw Error("cannot redeclare the type prop");
  if (has_base_type(name)) throw Error("type '" + name + "' already declared");
  base_types_.push_back(name);
}

bool Signature::has_base_type(const std::string& name) const {
  return std::find(base_types_.begin(), base_types_.end(), name) !=
         base_types_.end();
}

void Signature::check_type(const Type& t) const {
  switch (t.kind()) {
    case Type::Kind::kBase:
      if (!has_base_type(t.name()))
        throw Error("unknown type '" + t.name() + "'");
      return;
    case Type::Kind::kProp: return;
    case Type::Kind::kArrow:
      check_type(t.dom());
      check_type(t.cod());
      return;
  }
}

void Signature::declare(const std::string& name, const Type& type) {
  if (logic::is_logical(name))
    throw Error("cannot redeclare logical constant '" + name + "'");
  if (contains(name)) throw Error("constant '" + name + "' already declared");
  check_type(type);
  if (!type.first_order() && !type.predicate())
    throw Error("constant '" + name + "' has type " + type.str() +
                " which is neither first-order nor a predicate type");
  types_.emplace(name, type);
  order_.push_back(name);
}

std::optional<Type> Signature::lookup(const std::string& name) const {
  auto it = types_.find(name);
  if (it == types_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<std::string, Type>> Signature::constructors() const {
  std::vector<std::pair<std::string, Type>> out;
  for (const auto& n : order_) {
    const Type& t = types_.at(n);
    if (t.first_order()) out.emplace_back(n, t);
  }
  return out;
}

VarContext::VarContext(
    std::initializer_list<std::pair<std::string, Type>> vars) {
  for (const auto& [n, t] : vars) add(n, t);
}

void VarContext::add(const std::string& name, const Type& type) {
  if (contains(name)) throw Error("variable '" + name + "' bound twice");
  if (!type.first_order())
    throw Error("variable '" + name + "' has non-first-order type " +
                type.str());
  vars_.emplace_back(name, type);
}

std::optional<Type> VarContext::lookup(const std::string& name) const {
  for (const auto& [n, t] : vars_)
    if (n == name) return t;
  return std::nullopt;
}

std::string VarContext::fresh_name(const std::string& hint) const {
  if (!contains(hint)) return hint;
  for (int i = 1;; ++i) {
    std::string candidate = hint + std::to_string(i);
    if (!contains(candidate)) return candidate;
  }
}

VarContext VarContext::extended(const std::string& name,
                                const Type& type) const {
  VarContext out = *this;
  out.add(name, type);
  return out;
}

bool operator==(const VarContext& a, const VarContext& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [n, t] : a.vars_) {
    auto other = b.lookup(n);
    if (!other || *other != t) return false;
  }
  return true;
}

std::string VarContext::str() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [n, t] : vars_) {
    if (!first) os << ", ";
    first = false;
    os << n << ":" << t.str();
  }
  return os.str();
}

}  // namespace ldmu
