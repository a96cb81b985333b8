#include "ldmu/driver.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ldmu/proof_io.hpp"
#include "ldmu/sequent.hpp"

namespace ldmu {

namespace fs = std::filesystem;

const char* to_string(ItemVerdict v) {
  switch (v) {
    case ItemVerdict::kAccepted: return "accepted";
    case ItemVerdict::kRejected: return "rejected";
    case ItemVerdict::kInconclusive: return "inconclusive";
  }
  return "?";
}

bool Report::ok() const {
  for (const auto& i : items)
    if (i.verdict != ItemVerdict::kAccepted) return false;
  return true;
}

int Report::exit_code() const { return ok() ? 0 : 1; }

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string resolve(const std::string& script, const std::string& rel) {
  fs::path p(rel);
  if (p.is_absolute()) return rel;
  return (fs::path(script).parent_path() / p).string();
}

ItemVerdict from_verdict(Verdict v) {
  switch (v) {
    case Verdict::kVerified: return ItemVerdict::kAccepted;
    case Verdict::kViolated: return ItemVerdict::kRejected;
    case Verdict::kInconclusive: return ItemVerdict::kInconclusive;
  }
  return ItemVerdict::kRejected;
}

// Stratification items: inductive restriction, per-clause verdicts, oracle runs.
bool stratify(const Script& s, const Options& opts, Report& r) {
  const DefinitionSet& defs = s.defs;
  bool ok = true;
  auto t0 = Clock::now();
  for (const auto& ic : check_inductive_restriction(defs, s.measure)) {
    ReportItem it{"inductive", ic.pred, ic.ok ? ItemVerdict::kAccepted : ItemVerdict::kRejected,
                  ic.reason, "", "", since(t0)};
    ok = ok && ic.ok;
    r.items.push_back(it);
    t0 = Clock::now();
  }
  StratReport sr = check_ground_stratified(defs, s.measure);
  double strat_ms = since(t0);
  for (const auto& c : sr.clauses) {
    ReportItem it{"clause", c.pred + ": " + c.clause, from_verdict(c.verdict), "", "",
                  c.witness, strat_ms / static_cast<double>(sr.clauses.size())};
    if (c.verdict != Verdict::kVerified) {
      ok = false;
      it.reason = std::string("ground stratification ") + to_string(c.verdict) + ": level " +
                  c.head_level + " of the head against " + c.body_level + " of the body";
    }
    r.items.push_back(it);
  }
  for (const auto& c : sr.clauses) {
    if (c.verdict != Verdict::kVerified) continue;
    std::optional<Clause> cl;
    if (c.index < defs.clauses().size()) {
      cl = defs.clauses()[c.index];
    } else {
      const auto& bases = defs.signature().base_types();
      if (bases.empty()) continue;
      cl = eq_clause(Type::base(bases[0]));
    }
    auto t1 = Clock::now();
    auto vs = random_grounding_oracle(defs.signature(), *cl, sr.solved, opts.trials,
                                      opts.oracle_size_bound, opts.seed);
    ReportItem it{"oracle", c.pred + ": " + c.clause, ItemVerdict::kAccepted, "", "", "", 0};
    if (!vs.empty()) {
      ok = false;
      it.verdict = ItemVerdict::kRejected;
      it.reason = "random grounding contradicts the symbolic verdict";
      it.witness = vs[0].rho.str() + ": head " + vs[0].head.str() + " < body " +
                   vs[0].body.str();
    }
    it.millis = since(t1);
    r.items.push_back(it);
  }
  return ok;
}

Sequent theorem_goal(const TheoremDecl& t) { return Sequent{VarContext{}, {}, t.statement}; }

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

// Obtains the proof tree for a theorem: from its file, or by bounded search
// (saving the result next to the script).
std::optional<ProofTree> theorem_proof(const std::string& script, const DefinitionSet& defs,
                                       const TheoremDecl& t, std::string* note) {
  if (t.proof.kind == ProofRef::Kind::kFile)
    return read_proof(read_file(resolve(script, t.proof.path)));
  auto tree = search_bounded(defs, theorem_goal(t), t.proof.depth);
  if (!tree) return std::nullopt;
  fs::path out = fs::path(script).parent_path() / (stem_of(script) + "." + t.name + ".auto.ldp");
  std::ofstream f(out);
  if (f) {
    f << write_proof(*tree);
    *note = "proof found by search, saved to " + out.filename().string();
  }
  return tree;
}

ReportItem check_theorem(const std::string& script, const DefinitionSet& defs,
                         const TheoremDecl& t) {
  auto t0 = Clock::now();
  ReportItem it{"theorem", t.name, ItemVerdict::kAccepted, "", "", "", 0};
  std::string note;
  auto tree = theorem_proof(script, defs, t, &note);
  if (!tree) {
    it.verdict = ItemVerdict::kRejected;
    it.reason = "no proof found within depth " + std::to_string(t.proof.depth);
  } else {
    CheckResult res = check_tree(defs, *tree, theorem_goal(t));
    if (!res.ok) {
      it.verdict = ItemVerdict::kRejected;
      it.reason = res.reason;
      it.path = res.path;
      it.witness = res.sequent;
    } else {
      it.reason = note;
    }
  }
  it.millis = since(t0);
  return it;
}

const TheoremDecl& find_theorem(const Script& s, const std::string& name) {
  for (const auto& t : s.theorems)
    if (t.name == name) return t;
  throw Error("no theorem named '" + name + "'");
}

std::vector<std::pair<std::string, std::string>> split_subst(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    auto eq = part.find('=');
    if (eq == std::string::npos) throw Error("substitution entry '" + part + "' lacks '='");
    auto trim = [](std::string x) {
      size_t a = x.find_first_not_of(" \t"), b = x.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : x.substr(a, b - a + 1);
    };
    out.emplace_back(trim(part.substr(0, eq)), trim(part.substr(eq + 1)));
  }
  return out;
}

}  // namespace

Script load_script(const std::string& path) { return parse_script(read_file(path)); }

Report cmd_strat(const std::string& path, const Options& opts) {
  Script s = load_script(path);
  Report r{"strat", path, false, {}, {}};
  stratify(s, opts, r);
  return r;
}

Report cmd_check(const std::string& path, const Options& opts) {
  Script s = load_script(path);
  Report r{"check", path, opts.unsafe_skip_stratification, {}, {}};
  bool gate = true;
  if (!opts.unsafe_skip_stratification) gate = stratify(s, opts, r);
  for (const auto& t : s.theorems) {
    if (!gate) {
      r.items.push_back({"theorem", t.name, ItemVerdict::kRejected,
                         "not checked: definitions rejected by the stratification gate", "", "",
                         0});
      continue;
    }
    r.items.push_back(check_theorem(path, s.defs, t));
  }
  return r;
}

Report cmd_ground(const std::string& path, const std::string& theorem, const std::string& subst,
                  const Options& opts) {
  Script s = load_script(path);
  const DefinitionSet& defs = s.defs;
  Report r{"ground", path, opts.unsafe_skip_stratification, {}, {}};
  if (!opts.unsafe_skip_stratification && !stratify(s, opts, r)) return r;
  const TheoremDecl& t = find_theorem(s, theorem);
  ReportItem src = check_theorem(path, defs, t);
  r.items.push_back(src);
  if (src.verdict != ItemVerdict::kAccepted) return r;

  auto t0 = Clock::now();
  FinitarySignature fsig;
  try {
    fsig = check_finitary(defs.signature());
  } catch (const Error& e) {
    r.items.push_back({"grounding", theorem, ItemVerdict::kRejected, e.what(), "", "", since(t0)});
    return r;
  }
  std::string note;
  ProofTree tree = *theorem_proof(path, defs, t, &note);
  auto pairs = split_subst(subst);

  // Descend through leading allR steps until the requested variables are bound.
  Sequent goal = theorem_goal(t);
  const ProofTree* node = &tree;
  auto covered = [&]() {
    if (pairs.empty()) return false;
    for (const auto& [x, v] : pairs)
      if (!goal.ctx.contains(x)) return false;
    return true;
  };
  while (node->rule == Rule::kAllR && !covered()) {
    goal = apply_rule(defs, *node, goal).premises[0];
    node = &node->premises[0];
  }

  std::vector<Substitution> deltas;
  if (!pairs.empty()) {
    if (!covered()) throw Error("substitution names a variable outside the leading allR steps");
    Substitution d(goal.ctx);
    for (const auto& [x, v] : pairs)
      d.bind(x, parse_term(defs.signature(), {}, v, *goal.ctx.lookup(x)));
    deltas.push_back(d);
  } else {
    deltas = all_groundings(fsig, goal.ctx);
    if (deltas.size() > opts.exhaustive_limit) {
      std::mt19937_64 rng(opts.seed);
      std::shuffle(deltas.begin(), deltas.end(), rng);
      deltas.resize(opts.samples);
    }
  }

  // Shared across groundings: invariant families do not depend on them.
  GroundInterpreter interp(defs, fsig, *node, goal);
  GroundCheckCache cache;
  for (const auto& d : deltas) {
    auto t1 = Clock::now();
    ReportItem it{"grounding", theorem + " " + d.str(), ItemVerdict::kAccepted, "", "", "", 0};
    try {
      size_t seen = interp.stats().delta_left.size();
      GroundDerivation g = interp.run(d);
      GroundSequent gs{{}, apply_subst(d, goal.concl)};
      for (const Term& h : goal.hyps) gs.hyps.push_back(apply_subst(d, h));
      CheckResult res = check_ground_derivation(defs, s.measure, fsig, g, gs,
                                                opts.unsafe_skip_stratification, &cache);
      if (!res.ok) {
        it.verdict = ItemVerdict::kRejected;
        it.reason = res.reason;
        it.path = res.path;
      }
      const auto& dl = interp.stats().delta_left;
      for (size_t i = seen; i < dl.size(); ++i)
        if (dl[i].second > dl[i].first) {
          it.verdict = ItemVerdict::kRejected;
          it.reason = "ground defL has more premises than its source";
        }
      if (it.verdict == ItemVerdict::kAccepted)
        it.reason = std::to_string(derivation_size(g)) + " nodes";
    } catch (const Error& e) {
      it.verdict = ItemVerdict::kRejected;
      it.reason = e.what();
    }
    it.millis = since(t1);
    r.items.push_back(it);
  }
  return r;
}

Report cmd_cutelim(const std::string& path, const std::string& derivation, const Options& opts) {
  Script s = load_script(path);
  const DefinitionSet& defs = s.defs;
  Report r{"cutelim", path, opts.unsafe_skip_stratification, {}, {}};
  if (!opts.unsafe_skip_stratification && !stratify(s, opts, r)) return r;
  auto t0 = Clock::now();
  ReportItem it{"cutelim", derivation, ItemVerdict::kAccepted, "", "", "", 0};
  FinitarySignature fsig;
  try {
    fsig = check_finitary(defs.signature());
  } catch (const Error& e) {
    it.verdict = ItemVerdict::kRejected;
    it.reason = e.what();
    r.items.push_back(it);
    return r;
  }
  GroundFile gf = read_ground_file(read_file(derivation));
  GroundSequent goal{{}, parse_formula(defs.signature(), {}, gf.concl)};
  for (const auto& h : gf.hyps) goal.hyps.push_back(parse_formula(defs.signature(), {}, h));
  GroundDerivation d;
  try {
    d = build_ground(defs, fsig, gf.tree, goal);
  } catch (const Error& e) {
    it.verdict = ItemVerdict::kRejected;
    it.reason = std::string("input rejected: ") + e.what();
    r.items.push_back(it);
    return r;
  }
  CheckResult in = check_ground_tree(defs, fsig, d, goal);
  if (!in.ok) {
    it.verdict = ItemVerdict::kRejected;
    it.reason = "input rejected: " + in.reason;
    it.path = in.path;
    r.items.push_back(it);
    return r;
  }
  CutElimSummary sum;
  sum.size_before = derivation_size(d);
  try {
    NormalizeResult n = normalize_derivation(defs, fsig, d, opts.fuel);
    sum.steps = n.steps;
    sum.complete = n.complete;
    sum.size_after = derivation_size(n.d);
    sum.trace = n.trace;
    if (!n.complete) {
      it.verdict = ItemVerdict::kRejected;
      it.reason = "fuel exhausted after " + std::to_string(n.steps) + " steps";
    } else {
      CheckResult out = check_ground_tree(defs, fsig, n.d, goal);
      if (!out.ok) {
        it.verdict = ItemVerdict::kRejected;
        it.reason = "normal form rejected: " + out.reason;
        it.path = out.path;
      } else if (!is_cut_free(n.d)) {
        it.verdict = ItemVerdict::kRejected;
        it.reason = "normal form contains mc";
      } else {
        it.reason = "cut-free after " + std::to_string(n.steps) + " steps";
      }
    }
  } catch (const Error& e) {
    it.verdict = ItemVerdict::kRejected;
    it.reason = std::string("reduction failed: ") + e.what();
  }
  if (!opts.trace_file.empty()) {
    std::ofstream f(opts.trace_file);
    if (!f) throw Error("cannot write " + opts.trace_file);
    for (const auto& t : sum.trace)
      f << t.step << '\t' << t.case_name << '\t' << t.path << '\t' << t.size << '\n';
  }
  it.millis = since(t0);
  r.items.push_back(it);
  r.cutelim = sum;
  return r;
}

std::string report_json(const Report& r) {
  nlohmann::ordered_json j;
  j["command"] = r.command;
  j["file"] = r.file;
  j["unsafe"] = r.unsafe;
  j["ok"] = r.ok();
  j["exit_code"] = r.exit_code();
  j["items"] = nlohmann::ordered_json::array();
  for (const auto& i : r.items) {
    nlohmann::ordered_json o;
    o["kind"] = i.kind;
    o["name"] = i.name;
    o["verdict"] = to_string(i.verdict);
    o["reason"] = i.reason;
    o["path"] = i.path;
    o["witness"] = i.witness;
    o["millis"] = i.millis;
    j["items"].push_back(o);
  }
  if (r.cutelim) {
    nlohmann::ordered_json c;
    c["steps"] = r.cutelim->steps;
    c["complete"] = r.cutelim->complete;
    c["size_before"] = r.cutelim->size_before;
    c["size_after"] = r.cutelim->size_after;
    c["trace"] = nlohmann::ordered_json::array();
    for (const auto& t : r.cutelim->trace)
      c["trace"].push_back({{"step", t.step}, {"case", t.case_name}, {"path", t.path},
                            {"size", t.size}});
    j["cutelim"] = c;
  }
  return j.dump(2) + "\n";
}

std::string report_text(const Report& r, bool color) {
  auto paint = [&](const char* code, const std::string& s) {
    return color ? std::string("\033[") + code + "m" + s + "\033[0m" : s;
  };
  std::ostringstream out;
  if (r.unsafe)
    out << paint("1;31", "UNSAFE: stratification checks skipped; results carry no consistency "
                         "guarantee")
        << "\n";
  out << r.command << " " << r.file << "\n";
  for (const auto& i : r.items) {
    const char* code = i.verdict == ItemVerdict::kAccepted   ? "32"
                       : i.verdict == ItemVerdict::kRejected ? "31"
                                                             : "33";
    char ms[32];
    std::snprintf(ms, sizeof ms, "%.1f", i.millis);
    out << "  " << paint(code, std::string("[") + to_string(i.verdict) + "]") << " " << i.kind
        << " " << i.name << " (" << ms << " ms)\n";
    if (!i.reason.empty()) out << "      " << i.reason << "\n";
    if (!i.path.empty()) out << "      at " << i.path << "\n";
    if (!i.witness.empty()) out << "      witness: " << i.witness << "\n";
  }
  if (r.cutelim) {
    for (const auto& t : r.cutelim->trace)
      out << "    step " << t.step << ": " << t.case_name << " at " << t.path << ", size "
          << t.size << "\n";
  }
  size_t bad = 0;
  for (const auto& i : r.items) bad += i.verdict != ItemVerdict::kAccepted;
  out << (bad ? paint("31", std::to_string(bad) + " of " + std::to_string(r.items.size()) +
                                " items not accepted")
              : paint("32", "all " + std::to_string(r.items.size()) + " items accepted"))
      << "\n";
  return out.str();
}

}  // namespace ldmu
