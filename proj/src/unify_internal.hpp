#pragma once

#include "seqcraft/multiset.hpp"
#include "seqcraft/term.hpp"

namespace seqcraft::detail {

// Extends `s` in place; leaves `s` unspecified on failure.
bool unify_into(const Term& a, const Term& b, Substitution& s, const MetaSet& metas);

std::string substitution_key(const Substitution& s);

}  // namespace seqcraft::detail
