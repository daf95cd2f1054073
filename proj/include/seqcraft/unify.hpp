#pragma once

#include <optional>
#include <vector>

#include "seqcraft/multiset.hpp"
#include "seqcraft/term.hpp"

namespace seqcraft {

/// Schematic variables, and metavariables listed in `metas`.
bool is_instantiable(const Term& var, const MetaSet& metas);
bool has_instantiable(const Term& t, const MetaSet& metas);

/// One-sided matching: only schematic variables of `pattern` are bound.
std::optional<Substitution> match_term(const Term& pattern, const Term& target,
                                       const Substitution& s0 = {});

/// Most general unifier extending `s0`, with occurs check. Multiset-sorted
/// subterms are unified through `ac_match`.
std::optional<Substitution> unify(const Term& a, const Term& b, const MetaSet& metas,
                                  const Substitution& s0 = {});

/// Unifies a rule judgment against a goal judgment. Term-sorted arguments are
/// processed before multiset-sorted ones, each group left to right. Throws
/// when the judgment symbols differ.
std::optional<Substitution> unify_judgment(const Judgment& rule_part, const Judgment& goal_part,
                                           const MetaSet& metas, const Substitution& s0 = {});

/// All unifiers reachable through `ac_match_all` for the multiset arguments.
std::vector<Substitution> unify_judgment_all(const Judgment& rule_part, const Judgment& goal_part,
                                             const MetaSet& metas, const Substitution& s0 = {});

}  // namespace seqcraft
