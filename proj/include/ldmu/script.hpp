#ifndef LDMU_SCRIPT_HPP_
#define LDMU_SCRIPT_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ldmu/definitions.hpp"
#include "ldmu/stratification.hpp"
#include "ldmu/syntax.hpp"

namespace ldmu {

struct DefineBlock {
  PredKind kind;
  std::string pred;
  Type type;
  std::vector<Clause> clauses;
};

struct MeasureDecl {
  std::string pred;
  std::vector<std::pair<size_t, long>> weights;  // empty: strict
  long base = 0;
  bool has_base = false;
};

struct ProofRef {
  enum class Kind { kFile, kAuto } kind = Kind::kFile;
  std::string path;
  int depth = 0;
};

struct TheoremDecl {
  std::string name;
  Term statement;
  ProofRef proof;
  Pos pos;
};

struct Script {
  enum class ItemKind { kKind, kType, kDefine, kMeasure, kTheorem };
  std::vector<std::string> kinds;
  std::vector<std::pair<std::string, Type>> types;
  std::vector<DefineBlock> defines;
  std::vector<MeasureDecl> measures;
  std::vector<TheoremDecl> theorems;
  std::vector<std::pair<ItemKind, size_t>> order;

  DefinitionSet defs;
  LevelMeasure measure;
};

// Throws ParseError with a position.
Script parse_script(std::string_view text);
std::string print_script(const Script& s);
bool operator==(const Script& a, const Script& b);

}  // namespace ldmu

#endif  // LDMU_SCRIPT_HPP_
