#ifndef LDMU_DRIVER_HPP_
#define LDMU_DRIVER_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ldmu/ground.hpp"
#include "ldmu/script.hpp"

namespace ldmu {

enum class ItemVerdict { kAccepted, kRejected, kInconclusive };
const char* to_string(ItemVerdict v);

struct ReportItem {
  std::string kind;  // clause, inductive, oracle, theorem, grounding, cutelim
  std::string name;
  ItemVerdict verdict = ItemVerdict::kAccepted;
  std::string reason;
  std::string path;     // proof-node path for proof rejections
  std::string witness;  // violating clause instance or symbolic inequality
  double millis = 0;
};

struct CutElimSummary {
  size_t steps = 0;
  bool complete = false;
  size_t size_before = 0;
  size_t size_after = 0;
  std::vector<TraceRecord> trace;
};

struct Report {
  std::string command;
  std::string file;
  bool unsafe = false;
  std::vector<ReportItem> items;
  std::optional<CutElimSummary> cutelim;

  bool ok() const;
  // 0 when every item is accepted, 1 otherwise.
  int exit_code() const;
};

struct Options {
  bool unsafe_skip_stratification = false;
  uint64_t seed = 42;
  size_t trials = 1000;
  size_t oracle_size_bound = 8;
  size_t fuel = 100000;
  std::string trace_file;
  // ground: sample size when a context has more than `exhaustive_limit` groundings.
  size_t exhaustive_limit = 64;
  size_t samples = 50;
};

// Loading errors (IO, parse) are thrown as Error / ParseError.
Script load_script(const std::string& path);

Report cmd_strat(const std::string& path, const Options& opts);
Report cmd_check(const std::string& path, const Options& opts);
// `subst` is "x = t, y = u" over the eigenvariables of the theorem's leading
// allR steps; empty means every grounding.
Report cmd_ground(const std::string& path, const std::string& theorem, const std::string& subst,
                  const Options& opts);
Report cmd_cutelim(const std::string& path, const std::string& derivation, const Options& opts);

std::string report_json(const Report& r);
std::string report_text(const Report& r, bool color);

}  // namespace ldmu

#endif  // LDMU_DRIVER_HPP_
