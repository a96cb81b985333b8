#ifndef LDMU_PROOF_IO_HPP_
#define LDMU_PROOF_IO_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "ldmu/sequent.hpp"

namespace ldmu {

// Proof files hold one record
//   (rule <tag> <data>... <premise>...)
// with data items
//   (hyp N) (hyp "F") (term "t") (invariant "S") (name x) (clause N)
//   (side left|right) (cut "B") (partition (i ...) ...)
// and, in ground files, (family ("t"... <premise>) ...) before the other
// premises. Throws ParseError.
ProofTree read_proof(std::string_view text);
std::string write_proof(const ProofTree& t);

// Ground derivation files start with the end sequent
//   (goal (hyp "F") ... (concl "C"))
// followed by one proof record.
struct GroundFile {
  std::vector<std::string> hyps;
  std::string concl;
  ProofTree tree;
};
GroundFile read_ground_file(std::string_view text);
std::string write_ground_file(const GroundFile& f);

}  // namespace ldmu

#endif  // LDMU_PROOF_IO_HPP_
