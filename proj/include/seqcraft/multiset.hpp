#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "seqcraft/term.hpp"

namespace seqcraft {

/// Names of the metavariables that may be instantiated during unification.
using MetaSet = std::set<std::string>;

/// Flattened, canonically ordered view of a multiset-sorted term.
///
/// `singles` holds the elements of singleton multisets and `vars` the
/// multiset-sorted leaves (variables); both are sorted by term key. Empty
/// multisets never appear in a view.
struct MultisetView {
  std::string base;
  std::vector<Term> singles;
  std::vector<Term> vars;

  bool empty() const { return singles.empty() && vars.empty(); }
  std::size_t size() const { return singles.size() + vars.size(); }
  Sort sort() const { return Sort::multiset_of(base); }

  friend bool operator==(const MultisetView&, const MultisetView&) = default;
};

MultisetView normalize(const Term& t);

/// Right-nested union of the view's elements, singletons first; ∅ when empty.
Term view_to_term(const MultisetView& v);

/// Rebuilds a multiset-sorted term in canonical form; other terms unchanged.
Term normalize_term(const Term& t);

/// Re-renders every multiset-sorted argument from its normalized view.
Judgment strip_empty(const Judgment& j);

bool normalize_equal(const Judgment& a, const Judgment& b);

/// AC matching of one multiset against another.
///
/// Pattern elements without instantiable variables are first removed against
/// syntactically equal target elements. The remaining singleton elements are
/// then unified with target singletons, backtracking over the target element
/// chosen. Finally the pattern's multiset variables are assigned the leftover
/// target elements deterministically: with k variables and m leftovers the
/// first min(k, m) - 1 variables take one element each in canonical order,
/// the next one takes the rest and any surplus variables take ∅. There is no
/// backtracking over that split.
///
/// Instantiable variables are the schematic ones plus the metavariables in
/// `metas`. `s0` is applied to both sides first.
std::optional<Substitution> ac_match(const MultisetView& pattern, const MultisetView& target,
                                     const Substitution& s0, const MetaSet& metas);

/// Every substitution obtainable by any element assignment and any split of
/// the leftovers among the pattern's multiset variables. Used by proof search.
std::vector<Substitution> ac_match_all(const MultisetView& pattern, const MultisetView& target,
                                       const Substitution& s0, const MetaSet& metas);

}  // namespace seqcraft
