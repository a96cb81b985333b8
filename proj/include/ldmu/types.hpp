#ifndef LDMU_TYPES_HPP_
#define LDMU_TYPES_HPP_

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ldmu {

// All user-facing failures (ill-typed terms, malformed definitions, bad
// input files) are reported with this exception type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Simple types: base types, the proposition type `prop`, and arrows.
class Type {
 public:
  enum class Kind { kBase, kProp, kArrow };

  static Type base(std::string name);
  static Type prop();
  static Type arrow(Type dom, Type cod);
  // a1 -> a2 -> ... -> cod
  static Type arrows(const std::vector<Type>& doms, Type cod);

  Kind kind() const;
  bool is_base() const { return kind() == Kind::kBase; }
  bool is_prop() const { return kind() == Kind::kProp; }
  bool is_arrow() const { return kind() == Kind::kArrow; }

  const std::string& name() const;  // base only
  const Type& dom() const;          // arrow only
  const Type& cod() const;          // arrow only

  // Argument types and final target of a curried type.
  std::vector<Type> arg_types() const;
  Type target() const;

  bool first_order() const;
  bool predicate() const;

  friend bool operator==(const Type& a, const Type& b);
  friend bool operator!=(const Type& a, const Type& b) { return !(a == b); }
  friend bool operator<(const Type& a, const Type& b);

  std::string str() const;

 private:
  struct Node;
  explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Type::Node {
  Kind kind;
  std::string name;
  std::optional<Type> dom;
  std::optional<Type> cod;
};

inline Type::Kind Type::kind() const { return node_->kind; }

// Names of the logical constants. They are implicit in every signature.
namespace logic {
inline constexpr const char* kTop = "true";
inline constexpr const char* kBot = "false";
inline constexpr const char* kAnd = "/\\";
inline constexpr const char* kOr = "\\/";
inline constexpr const char* kImp = "=>";
inline constexpr const char* kAll = "forall";
inline constexpr const char* kEx = "exists";
inline constexpr const char* kEq = "eq";
bool is_logical(const std::string& name);
}  // namespace logic

class Signature {
 public:
  void declare_base_type(const std::string& name);
  bool has_base_type(const std::string& name) const;
  const std::vector<std::string>& base_types() const { return base_types_; }

  // Throws on redeclaration, on logical constant names, and on types that
  // mention undeclared base types.
  void declare(const std::string& name, const Type& type);
  std::optional<Type> lookup(const std::string& name) const;
  bool contains(const std::string& name) const { return types_.count(name) > 0; }

  // Constants in declaration order.
  const std::vector<std::string>& constants() const { return order_; }

  // Constants whose type is first-order, i.e. term constructors.
  std::vector<std::pair<std::string, Type>> constructors() const;

  void check_type(const Type& t) const;

 private:
  std::vector<std::string> base_types_;
  std::map<std::string, Type> types_;
  std::vector<std::string> order_;
};

// A finite set of typed variables. Insertion order is kept so that printing
// and fresh-name generation are deterministic; equality is as sets.
class VarContext {
 public:
  VarContext() = default;
  VarContext(std::initializer_list<std::pair<std::string, Type>> vars);

  // Throws if the name is already bound or the type is not first-order.
  void add(const std::string& name, const Type& type);
  std::optional<Type> lookup(const std::string& name) const;
  bool contains(const std::string& name) const { return lookup(name).has_value(); }
  bool empty() const { return vars_.empty(); }
  size_t size() const { return vars_.size(); }

  const std::vector<std::pair<std::string, Type>>& vars() const { return vars_; }
  auto begin() const { return vars_.begin(); }
  auto end() const { return vars_.end(); }

  // A name based on `hint` that is not bound here.
  std::string fresh_name(const std::string& hint) const;

  VarContext extended(const std::string& name, const Type& type) const;

  friend bool operator==(const VarContext& a, const VarContext& b);
  std::string str() const;

 private:
  std::vector<std::pair<std::string, Type>> vars_;
};

}  // namespace ldmu

#endif  // LDMU_TYPES_HPP_
