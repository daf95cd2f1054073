#pragma once

#include "seqcraft/kernel.hpp"
#include "seqcraft/logic.hpp"

namespace seqcraft::detail {

/// Makes σ total on the copy's schematic variables (leftovers become
/// metavariables of the same name) and refines subgoal `i` with the step.
GoalState commit_rule(const GoalState& st, std::size_t i, StepTag tag, const std::string& rule,
                      Rule copy, Substitution sigma, std::size_t hyp);

}  // namespace seqcraft::detail
