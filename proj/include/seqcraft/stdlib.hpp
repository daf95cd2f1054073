#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seqcraft/logic.hpp"

namespace seqcraft {

// Shipped logics, parsed once from the definition files compiled into the
// library.
const LogicSpec& simple_prop();
const LogicSpec& curry_howard();
const LogicSpec& ill();
const LogicSpec& cll_cp();

std::vector<std::string> builtin_logic_names();
std::optional<std::string_view> builtin_logic_source(std::string_view name);
const LogicSpec* builtin_logic(std::string_view name);

/// A shipped logic by name, a definition file by path, or definition text.
LogicSpec load_logic(std::string_view name_path_or_text);

/// Rewrites fst((a, b)) to a and snd((a, b)) to b, innermost first, until
/// no redex is left. Uses the operators named fst, snd and pair.
Term reduce_projections(const Term& t);

}  // namespace seqcraft
