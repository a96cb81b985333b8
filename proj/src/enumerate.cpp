#include "ldmu/enumerate.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace ldmu {

namespace {

// A head usable at base type `b` under binder types `env` (innermost last).
struct Head {
  Term term;
  std::vector<Type> args;
};

std::vector<Head> heads(const Signature& sig, const std::string& b,
                        const std::vector<Type>& env) {
  std::vector<Head> out;
  for (const auto& [name, ty] : sig.constructors()) {
    if (ty.target().is_base() && ty.target().name() == b)
      out.push_back({Term::constant(name, ty), ty.arg_types()});
  }
  for (size_t i = 0; i < env.size(); ++i) {
    const Type& ty = env[env.size() - 1 - i];
    if (ty.target().is_base() && ty.target().name() == b)
      out.push_back({Term::bound(i), ty.arg_types()});
  }
  return out;
}

class Generator {
 public:
  explicit Generator(const Signature& sig) : sig_(sig) {}

  // Terms of exactly size n.
  const std::vector<Term>& gen(const Type& ty, size_t n, std::vector<Type>& env) {
    std::string key = ty.str() + "|" + std::to_string(n);
    for (const auto& e : env) key += "|" + e.str();
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<Term> out;
    if (n == 0) {
      // no term has size 0
    } else if (ty.is_arrow()) {
      env.push_back(ty.dom());
      std::vector<Term> bodies = gen(ty.cod(), n - 1, env);
      env.pop_back();
      for (const auto& b : bodies) out.push_back(Term::abs("x", ty.dom(), b));
    } else if (ty.is_base()) {
      for (const auto& h : heads(sig_, ty.name(), env)) {
        std::vector<Term> args;
        distribute(h, 0, n - 1, args, env, out);
      }
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

 private:
  void distribute(const Head& h, size_t i, size_t left, std::vector<Term>& args,
                  std::vector<Type>& env, std::vector<Term>& out) {
    if (i == h.args.size()) {
      if (left == 0) out.push_back(Term::apps(h.term, args));
      return;
    }
    size_t rest = h.args.size() - i - 1;  // each remaining arg needs >= 1
    if (left < rest + 1) return;
    for (size_t k = 1; k + rest <= left; ++k) {
      std::vector<Term> choices = gen(h.args[i], k, env);
      for (const auto& c : choices) {
        args.push_back(c);
        distribute(h, i + 1, left - k, args, env, out);
        args.pop_back();
      }
    }
  }

  const Signature& sig_;
  std::map<std::string, std::vector<Term>> memo_;
};

// Goals of the finiteness analysis: a base type together with the set of
// binder types in scope.
struct Goal {
  std::string base;
  std::set<Type> env;
  bool operator<(const Goal& o) const {
    return std::tie(base, env) < std::tie(o.base, o.env);
  }
};

Goal goal_for(const Type& ty, std::set<Type> env) {
  for (const auto& a : ty.arg_types()) env.insert(a);
  return {ty.target().name(), std::move(env)};
}

struct Production {
  std::vector<Goal> args;
  size_t lambdas = 0;  // binders added in front of the arguments
  std::vector<size_t> arg_lambdas;
};

std::vector<Production> productions(const Signature& sig, const Goal& g) {
  std::vector<Production> out;
  std::vector<Type> env(g.env.begin(), g.env.end());
  for (const auto& h : heads(sig, g.base, env)) {
    Production p;
    for (const auto& a : h.args) {
      p.args.push_back(goal_for(a, g.env));
      p.arg_lambdas.push_back(a.arg_types().size());
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

Finiteness analyze_finiteness(const Signature& sig, const Type& type) {
  Finiteness res;
  if (!type.first_order()) throw Error("type " + type.str() + " is not first-order");
  Goal root = goal_for(type, {});

  // Reachable goals.
  std::map<Goal, std::vector<Production>> graph;
  std::vector<Goal> todo{root};
  while (!todo.empty()) {
    Goal g = todo.back();
    todo.pop_back();
    if (graph.count(g)) continue;
    auto ps = productions(sig, g);
    for (const auto& p : ps)
      for (const auto& a : p.args) todo.push_back(a);
    graph.emplace(g, std::move(ps));
  }

  // Inhabitation as a least fixed point.
  std::set<Goal> inhabited;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [g, ps] : graph) {
      if (inhabited.count(g)) continue;
      for (const auto& p : ps) {
        bool ok = std::all_of(p.args.begin(), p.args.end(),
                              [&](const Goal& a) { return inhabited.count(a); });
        if (ok) {
          inhabited.insert(g);
          changed = true;
          break;
        }
      }
    }
  }
  res.inhabited = inhabited.count(root) > 0;
  if (!res.inhabited) return res;

  // Productive edges: from an inhabited goal through a production whose
  // arguments are all inhabited. A cycle among them means infinitely many
  // terms.
  std::map<Goal, int> color;  // 0 new, 1 on stack, 2 done
  std::vector<Goal> stack;
  std::map<Goal, size_t> max_size;
  std::function<bool(const Goal&)> dfs = [&](const Goal& g) -> bool {
    color[g] = 1;
    stack.push_back(g);
    size_t best = 0;
    for (const auto& p : graph[g]) {
      bool ok = std::all_of(p.args.begin(), p.args.end(),
                            [&](const Goal& a) { return inhabited.count(a); });
      if (!ok) continue;
      size_t sz = 1;
      for (size_t i = 0; i < p.args.size(); ++i) {
        const Goal& a = p.args[i];
        if (color[a] == 1) {
          auto it = std::find_if(stack.begin(), stack.end(),
                                 [&](const Goal& s) { return !(s < a) && !(a < s); });
          for (; it != stack.end(); ++it) res.cycle.push_back(it->base);
          res.cycle.push_back(a.base);
          return false;
        }
        if (color[a] == 0 && !dfs(a)) return false;
        sz += p.arg_lambdas[i] + max_size[a];
      }
      best = std::max(best, sz);
    }
    max_size[g] = best;
    stack.pop_back();
    color[g] = 2;
    return true;
  };
  if (!dfs(root)) {
    res.finite = false;
    return res;
  }
  res.max_size = type.arg_types().size() + max_size[root];
  return res;
}

GroundTerms enumerate_ground(const Signature& sig, const Type& type,
                             size_t bound) {
  if (!type.first_order()) throw Error("type " + type.str() + " is not first-order");
  GroundTerms out;
  Generator g(sig);
  std::vector<Type> env;
  for (size_t n = 1; n <= bound; ++n) {
    const auto& level = g.gen(type, n, env);
    out.terms.insert(out.terms.end(), level.begin(), level.end());
  }
  Finiteness f = analyze_finiteness(sig, type);
  out.complete = f.finite && (!f.inhabited || f.max_size <= bound);
  return out;
}

}  // namespace ldmu
