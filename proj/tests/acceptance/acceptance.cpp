// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any fails.
#include <algorithm>
#include <functional>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ldmu/driver.hpp"
#include "ldmu/ground.hpp"
#include "ldmu/proof_io.hpp"
#include "ldmu/script.hpp"
#include "ldmu/stratification.hpp"
#include "ldmu/syntax.hpp"
#include "suites.hpp"

using namespace ldmu;
namespace fs = std::filesystem;

namespace {

constexpr double kProofTimeLimitMs = 1000.0;
constexpr size_t kOracleTrials = 1000;
constexpr size_t kOracleSizeBound = 8;
constexpr uint64_t kSeed = 42;
constexpr size_t kFuel = 100000;
constexpr size_t kMinRedexes = 20;
constexpr size_t kExhaustiveLimit = 64;
constexpr size_t kSamples = 50;
constexpr size_t kPropertyCases = 500;
constexpr int kNoBotDepth = 6;

const fs::path kCorpus = LDMU_CORPUS_DIR;

using Clock = std::chrono::steady_clock;

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw Error("cannot read " + p.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Script load(const fs::path& p) { return parse_script(slurp(p)); }

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("failed: " + what);
    }
  }
};

const TheoremDecl& theorem(const Script& s, const std::string& name) {
  for (const auto& t : s.theorems)
    if (t.name == name) return t;
  throw Error("no theorem " + name);
}

// Strict-gate and clause verdicts for one predicate.
bool accepted(const Script& s, const std::string& pred) {
  for (const auto& ic : check_inductive_restriction(s.defs, s.measure))
    if (ic.pred == pred && !ic.ok) return false;
  for (const auto& c : check_ground_stratified(s.defs, s.measure).clauses)
    if (c.pred == pred && c.verdict != Verdict::kVerified) return false;
  return true;
}

Outcome criterion1(std::string& summary) {
  struct Row {
    const char* file;
    const char* pred;
    bool expect;
  };
  const Row rows[] = {
      {"append.ld", "append", true}, {"ev.ld", "ev", true},         {"red.ld", "red", true},
      {"red.ld", "sn", true},        {"red.ld", "type", true},      {"append.ld", "eq", true},
      {"p_loop.ld", "p", false},     {"ev_ind.ld", "ev", false},    {"odd_inductive.ld", "odd", false},
  };
  Outcome o;
  size_t match = 0;
  for (const auto& r : rows) {
    bool got = accepted(load(kCorpus / r.file), r.pred);
    o.require(got == r.expect, std::string(r.pred) + " in " + r.file);
    match += got == r.expect;
  }
  summary = std::to_string(match) + "/9 verdicts match";
  return o;
}

bool has_rule(const ProofTree& t, Rule r, bool zero_premises) {
  if (t.rule == r && (!zero_premises || t.premises.empty())) return true;
  for (const auto& p : t.premises)
    if (has_rule(p, r, zero_premises)) return true;
  return false;
}

const ProofTree* find_mu(const ProofTree& t) {
  if (t.rule == Rule::kMuL) return &t;
  for (const auto& p : t.premises)
    if (auto m = find_mu(p)) return m;
  return nullptr;
}

Outcome criterion2(std::string& summary) {
  Outcome o;
  struct Item {
    const char* script;
    const char* name;
  };
  const Item items[] = {{"append.ld", "append_member"},
                        {"append.ld", "append_negative"},
                        {"append_ind.ld", "append_functional"}};
  double worst = 0;
  for (const auto& it : items) {
    Script s = load(kCorpus / it.script);
    const TheoremDecl& t = theorem(s, it.name);
    ProofTree p = read_proof(slurp(kCorpus / t.proof.path));
    auto t0 = Clock::now();
    CheckResult r = check_proof(s.defs, s.measure, p, Sequent{{}, {}, t.statement}, false);
    double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    worst = std::max(worst, ms);
    o.require(r.ok, std::string(it.name) + " checks (" + r.path + ": " + r.reason + ")");
    o.require(ms < kProofTimeLimitMs, std::string(it.name) + " under 1 s");
    if (std::string(it.name) == "append_member")
      o.require(!has_rule(p, Rule::kDeltaL, false) && !has_rule(p, Rule::kMc, false),
                "append_member uses right rules only");
    if (std::string(it.name) == "append_negative")
      o.require(has_rule(p, Rule::kDeltaL, true), "append_negative has a zero-premise defL");
    if (std::string(it.name) == "append_functional") {
      const ProofTree* mu = find_mu(p);
      o.require(mu && mu->term, "append_functional uses muL");
      if (mu && mu->term) {
        const Signature& sig = s.defs.signature();
        Type ty = *sig.lookup("append");
        Term given = normalize(parse_term(sig, {}, mu->term->str(), ty));
        Term displayed = normalize(parse_term(
            sig, {},
            "\\l, \\k, \\m, forall m2, append l k m /\\ append l k m2 => eq m m2", ty));
        o.require(given == displayed, "muL invariant is the displayed one");
      }
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", worst);
  summary = "3/3 derivations accepted, slowest " + std::string(buf) + " ms";
  return o;
}

Outcome criterion3(std::string& summary) {
  Outcome o;
  const std::string file = (kCorpus / "odd_inductive.ld").string();
  Options unsafe;
  unsafe.unsafe_skip_stratification = true;
  Report ru = cmd_check(file, unsafe);
  o.require(ru.exit_code() == 0, "unsafe run accepts the derivation of false");
  o.require(report_text(ru, false).find("UNSAFE") != std::string::npos, "UNSAFE banner");
  Options safe;
  Report rs = cmd_check(file, safe);
  o.require(rs.exit_code() == 1, "gated run fails");
  bool gate_reason = false, not_checked = false;
  for (const auto& it : rs.items) {
    if (it.kind == "inductive" && it.verdict == ItemVerdict::kRejected &&
        it.reason.find("inductive predicate violates strict stratification") != std::string::npos)
      gate_reason = true;
    if (it.kind == "theorem" && it.reason.rfind("not checked", 0) == 0) not_checked = true;
  }
  o.require(gate_reason, "stratification gate names the inductive restriction");
  o.require(not_checked, "theorem not checked after the gate fails");
  summary = "unsafe exit " + std::to_string(ru.exit_code()) + ", gated exit " +
            std::to_string(rs.exit_code()) + " at the stratification gate";
  return o;
}

Outcome criterion4(std::string& summary) {
  Outcome o;
  struct Item {
    const char* script;
    const char* name;
  };
  const Item items[] = {{"finite/append.ld", "append_member"},
                        {"finite/append.ld", "append_negative"},
                        {"finite/append.ld", "append_nil"},
                        {"finite/append_ind.ld", "append_functional"},
                        {"finite/isb.ld", "isb_tt"}};
  Options opts;
  opts.seed = kSeed;
  opts.exhaustive_limit = kExhaustiveLimit;
  opts.samples = kSamples;
  opts.trials = kOracleTrials;
  opts.oracle_size_bound = kOracleSizeBound;
  size_t groundings = 0;
  for (const auto& it : items) {
    Report r = cmd_ground((kCorpus / it.script).string(), it.name, "", opts);
    size_t n = 0;
    for (const auto& ri : r.items)
      if (ri.kind == "grounding") ++n;
    groundings += n;
    o.require(r.exit_code() == 0 && n > 0, std::string(it.name) + " groundings accepted");
    for (const auto& ri : r.items)
      if (ri.verdict != ItemVerdict::kAccepted) o.notes.push_back(ri.name + ": " + ri.reason);
  }
  summary = "5 theorems, " + std::to_string(groundings) + " groundings accepted";
  return o;
}

std::map<std::string, size_t> expected_steps() {
  std::map<std::string, size_t> out;
  std::istringstream in(slurp(kCorpus / "cutelim" / "expected_steps.tsv"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    out[line.substr(0, tab)] = std::stoul(line.substr(tab + 1));
  }
  return out;
}

GroundDerivation at(GroundDerivation d, const std::string& path) {
  std::istringstream in(path);
  std::string part;
  std::getline(in, part, '.');  // "root"
  while (std::getline(in, part, '.')) d = d->premises.at(std::stoul(part));
  return d;
}

std::vector<std::string> levels(const Signature& sig, const LevelMeasure& m,
                                const GroundSequent& s) {
  std::vector<std::string> out;
  for (const Term& h : s.hyps) {
    GroundLevel l = lvl_ground(sig, h, m);
    out.push_back(std::to_string(l.value) + "/" + std::to_string(l.unbounded) + "/" +
                  std::to_string(l.exact));
  }
  std::sort(out.begin(), out.end());
  GroundLevel c = lvl_ground(sig, s.concl, m);
  out.push_back("|- " + std::to_string(c.value) + "/" + std::to_string(c.unbounded) + "/" +
                std::to_string(c.exact));
  return out;
}

struct RedexRun {
  std::string name;
  GroundSequent goal;
  GroundDerivation input;
  NormalizeResult result;
};

Outcome criterion5(std::vector<RedexRun>& runs, std::string& summary) {
  Outcome o;
  Script s = load(kCorpus / "cutelim" / "defs.ld");
  FinitarySignature fsig = check_finitary(s.defs.signature());
  auto expected = expected_steps();
  std::set<std::string> covered;
  bool inductive_nontrivial = false;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(kCorpus / "cutelim"))
    if (e.path().extension() == ".ldg") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::string name = f.filename().string();
    GroundFile gf = read_ground_file(slurp(f));
    GroundSequent goal{{}, parse_formula(s.defs.signature(), {}, gf.concl)};
    for (const auto& h : gf.hyps) goal.hyps.push_back(parse_formula(s.defs.signature(), {}, h));
    GroundDerivation d = build_ground(s.defs, fsig, gf.tree, goal);
    o.require(check_ground_tree(s.defs, fsig, d, goal).ok, name + " input is valid");
    Reduct first = reduce_step(s.defs, fsig, d);
    covered.insert(first.case_name);
    if (first.case_name == cases::kInductive) {
      const GroundNode& main = *d->premises.back();
      if (main.rule == Rule::kMuL && main.term &&
          normalize(*main.term) != normalize(parse_term(s.defs.signature(), {}, "\\x:bit, true")))
        inductive_nontrivial = true;
    }
    NormalizeResult n = normalize_derivation(s.defs, fsig, d, kFuel);
    for (const auto& t : n.trace) covered.insert(t.case_name);
    o.require(n.complete, name + " normalizes within fuel");
    o.require(is_cut_free(n.d), name + " is cut-free");
    o.require(same_ground_sequent(n.d->seq, goal), name + " keeps its conclusion");
    o.require(check_ground_tree(s.defs, fsig, n.d, goal).ok, name + " output re-validates");
    auto it = expected.find(name);
    o.require(it != expected.end() && it->second == n.steps,
              name + " step count " + std::to_string(n.steps) + " matches the regression value");
    runs.push_back({name, goal, d, n});
  }
  const char* groups[] = {cases::kEssential,      cases::kLeftCommutative, cases::kInductive,
                          cases::kStructural,     cases::kLeftAxiom,       cases::kLeftMulticut,
                          cases::kRightAxiom,     cases::kRightMulticut,   cases::kRightCommutative};
  size_t hit = 0;
  for (const char* g : groups) {
    bool in = covered.count(g) > 0;
    hit += in;
    o.require(in, std::string("case group covered: ") + g);
  }
  o.require(inductive_nontrivial, "inductive case with a non-constant-true invariant");
  o.require(files.size() >= kMinRedexes, "at least 20 redexes");
  summary = std::to_string(files.size()) + " redexes cut-free, " + std::to_string(hit) +
            "/9 case groups";
  return o;
}

Outcome criterion6(const std::vector<RedexRun>& runs, std::string& summary) {
  Outcome o;
  Script s = load(kCorpus / "cutelim" / "defs.ld");
  FinitarySignature fsig = check_finitary(s.defs.signature());
  LevelMeasure m = check_ground_stratified(s.defs, s.measure).solved;
  const Signature& sig = s.defs.signature();
  size_t steps = 0;
  for (const auto& r : runs) {
    GroundDerivation before = r.input;
    for (size_t k = 1; k <= r.result.steps; ++k) {
      NormalizeResult n = normalize_derivation(s.defs, fsig, r.input, k);
      const TraceRecord& tr = r.result.trace[k - 1];
      GroundSequent a = at(before, tr.path)->seq;
      GroundSequent b = at(n.d, tr.path)->seq;
      bool same = levels(sig, m, a) == levels(sig, m, b) &&
                  levels(sig, m, before->seq) == levels(sig, m, n.d->seq);
      o.require(same, r.name + " step " + std::to_string(k) + " at " + tr.path);
      before = n.d;
      ++steps;
    }
  }
  summary = std::to_string(steps) + " reduction steps, levels unchanged";
  return o;
}

Outcome criterion7(std::string& summary) {
  Outcome o;
  const char* scripts[] = {"finite/append.ld", "finite/append_ind.ld", "finite/isb.ld",
                           "cutelim/defs.ld"};
  for (const char* f : scripts) {
    Script s = load(kCorpus / f);
    o.require(!stratification_gate(s.defs, s.measure), std::string(f) + " is stratified");
    FinitarySignature fsig = check_finitary(s.defs.signature());
    NoBotReport r = verify_no_bot(s.defs, fsig, kNoBotDepth);
    bool root = std::any_of(r.cases.begin(), r.cases.end(), [](const std::string& c) {
      return c.find("no applicable rule at root") != std::string::npos;
    });
    o.require(r.ok && root, std::string(f) + " has no derivation of false");
  }
  // The guard matters: the finitary odd analogue admits an explicit one.
  Options unsafe;
  unsafe.unsafe_skip_stratification = true;
  Report bot = cmd_ground((kCorpus / "finite/odd.ld").string(), "inconsistent", "", unsafe);
  o.require(bot.exit_code() == 0, "unsafe finitary odd: ground derivation of false checks");
  Options safe;
  Report gated = cmd_ground((kCorpus / "finite/odd.ld").string(), "inconsistent", "", safe);
  o.require(gated.exit_code() == 1, "finitary odd is stopped by the gate");
  summary = "4 stratified scripts ok; unsafe odd analogue derives false only without the gate";
  return o;
}

Outcome criterion8(std::string& summary) {
  Outcome o;
  size_t verified = 0, violated = 0;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(kCorpus))
    if (e.path().extension() == ".ld") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    Script s = load(f);
    const Signature& sig = s.defs.signature();
    StratReport sr = check_ground_stratified(s.defs, s.measure);
    for (const auto& c : sr.clauses) {
      std::vector<Clause> cls;
      if (c.index < s.defs.clauses().size())
        cls.push_back(s.defs.clauses()[c.index]);
      else
        for (const auto& b : sig.base_types()) cls.push_back(eq_clause(Type::base(b)));
      std::string where = fs::relative(f, kCorpus).string() + " " + c.clause;
      for (const Clause& cl : cls) {
        auto v = random_grounding_oracle(sig, cl, sr.solved, kOracleTrials, kOracleSizeBound,
                                         kSeed);
        if (c.verdict == Verdict::kVerified) {
          ++verified;
          o.require(v.empty(), where + ": oracle agrees with verified");
        } else if (c.verdict == Verdict::kViolated) {
          ++violated;
          o.require(!v.empty(), where + ": oracle exhibits a violation");
        } else {
          o.require(false, where + ": inconclusive");
        }
      }
    }
  }
  summary = std::to_string(verified) + " verified clause runs with 0 violations, " +
            std::to_string(violated) + " violated with witnesses";
  o.require(violated > 0, "some violated clause in the corpus");
  return o;
}

Outcome criterion9(std::string& summary) {
  Outcome o;
  struct Suite {
    const char* name;
    props::SuiteResult r;
  };
  const Suite suites[] = {
      {"normalize idempotence", props::normalize_idempotence(1001, kPropertyCases)},
      {"matching soundness", props::matching_soundness(1003, kPropertyCases)},
      {"unifier vs brute force", props::unifier_vs_brute_force(1004, kPropertyCases)},
      {"search/check round trip", props::search_check_round_trip(1005, kPropertyCases)},
  };
  for (const auto& s : suites) {
    o.require(s.r.ok(), std::string(s.name) + ": " + s.r.first_failure);
    o.require(s.r.cases >= kPropertyCases, std::string(s.name) + " ran 500 cases");
    o.require(s.r.interesting > 0, std::string(s.name) + " is not vacuous");
  }
  summary = "4 suites x " + std::to_string(kPropertyCases) + " cases";
  return o;
}

}  // namespace

int main() {
  auto t0 = Clock::now();
  bool all = true;
  std::vector<RedexRun> runs;
  auto report = [&](int id, const char* title, const std::function<Outcome(std::string&)>& f) {
    std::string summary;
    Outcome o;
    try {
      o = f(summary);
    } catch (const std::exception& e) {
      o.pass = false;
      o.notes.push_back(std::string("exception: ") + e.what());
    }
    all = all && o.pass;
    std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << "  " << title;
    if (!summary.empty()) std::cout << ": " << summary;
    std::cout << "\n";
    for (const auto& n : o.notes) std::cout << "    " << n << "\n";
  };
  report(1, "stratification verdict matrix", criterion1);
  report(2, "proof corpus", criterion2);
  report(3, "inconsistency guard", criterion3);
  report(4, "grounding", criterion4);
  report(5, "cut elimination", [&](std::string& s) { return criterion5(runs, s); });
  report(6, "level preservation", [&](std::string& s) { return criterion6(runs, s); });
  report(7, "consistency smoke", criterion7);
  report(8, "oracle agreement", criterion8);
  report(9, "kernel properties", criterion9);
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  std::cout << (all ? "all criteria pass" : "some criteria fail") << " (" << secs << " s)\n";
  return all ? 0 : 1;
}
