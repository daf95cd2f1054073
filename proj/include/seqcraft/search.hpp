#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "seqcraft/tactics.hpp"

namespace seqcraft {

struct SearchConfig {
  /// Height bound of the searched derivation.
  std::size_t max_depth = 8;
  /// Rules to try, in order. Empty: the logic's search order, or else every
  /// rule except Cut.
  std::vector<std::string> rules;
  bool include_cut = false;
  /// Rule applications attempted before giving up; 0 for no limit.
  std::size_t max_nodes = 2'000'000;
};

/// Rule order used by auto_ll for `logic`.
std::vector<std::string> search_rules(const LogicSpec& logic, const SearchConfig& cfg);

/// Depth-first, depth-bounded proof search over rule applications,
/// enumerating every multiset split. Either closes the subgoal completely
/// or fails leaving the state unchanged.
Etactic auto_ll(SearchConfig cfg);

}  // namespace seqcraft
