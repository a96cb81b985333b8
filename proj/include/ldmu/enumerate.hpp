#ifndef LDMU_ENUMERATE_HPP_
#define LDMU_ENUMERATE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "ldmu/term.hpp"
#include "ldmu/types.hpp"

namespace ldmu {

struct GroundTerms {
  std::vector<Term> terms;
  // The whole of ground(type) is finite and listed.
  bool complete = false;
};

// Closed normal terms of a first-order type with size <= bound, ordered by
// size and then by head (constants in declaration order, then bound
// variables innermost first) and arguments left to right.
GroundTerms enumerate_ground(const Signature& sig, const Type& type,
                             size_t bound);

struct Finiteness {
  bool finite = true;
  // When infinite: base types around a productive cycle, first repeated last.
  std::vector<std::string> cycle;
  // When finite: largest ground term size (0 if uninhabited).
  size_t max_size = 0;
  bool inhabited = false;
};

Finiteness analyze_finiteness(const Signature& sig, const Type& type);

}  // namespace ldmu

#endif  // LDMU_ENUMERATE_HPP_
