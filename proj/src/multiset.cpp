#include "seqcraft/multiset.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "seqcraft/unify.hpp"
#include "unify_internal.hpp"

namespace seqcraft {

namespace {

void flatten(const Term& t, MultisetView& v) {
  if (is_mempty(t)) return;
  if (is_msingle(t)) {
    v.singles.push_back(t.arg(0));
    return;
  }
  if (is_munion(t)) {
    flatten(t.arg(0), v);
    flatten(t.arg(1), v);
    return;
  }
  v.vars.push_back(t);
}

bool erase_one(std::vector<Term>& from, const Term& t) {
  auto it = std::find(from.begin(), from.end(), t);
  if (it == from.end()) return false;
  from.erase(it);
  return true;
}

Term sum_of(const std::string& base, const std::vector<Term>& elems, std::size_t first,
            std::size_t last) {
  if (first >= last) return mempty(base);
  Term acc = elems[last - 1];
  for (std::size_t i = last - 1; i-- > first;) acc = munion(elems[i], acc);
  return acc;
}

// Shared setup for both matching entry points: phase 1 plus bookkeeping.
struct MatchProblem {
  std::string base;
  Term pattern_term = mempty("");
  Term target_term = mempty("");
  std::vector<Term> open;          // pattern singletons left for phase 2
  std::vector<Term> flex;          // instantiable pattern multiset variables
  std::vector<Term> avail_singles;  // target singletons not consumed by phase 1
  std::vector<Term> avail_vars;     // target multiset leaves
  bool feasible = true;
};

MatchProblem prepare(const MultisetView& pattern, const MultisetView& target,
                     const Substitution& s0, const MetaSet& metas) {
  MatchProblem mp;
  mp.base = pattern.base;
  if (pattern.base != target.base) {
    mp.feasible = false;
    return mp;
  }
  mp.pattern_term = s0.apply(view_to_term(pattern));
  mp.target_term = s0.apply(view_to_term(target));
  MultisetView p = normalize(mp.pattern_term);
  MultisetView t = normalize(mp.target_term);
  mp.avail_singles = t.singles;
  mp.avail_vars = t.vars;

  for (const auto& e : p.singles) {
    if (!has_instantiable(e, metas) && erase_one(mp.avail_singles, e)) continue;
    mp.open.push_back(e);
  }
  for (const auto& v : p.vars) {
    if (v.is_var() && is_instantiable(v, metas)) {
      if (std::find(mp.flex.begin(), mp.flex.end(), v) == mp.flex.end()) mp.flex.push_back(v);
      continue;
    }
    if (!erase_one(mp.avail_vars, v)) {
      mp.feasible = false;
      return mp;
    }
  }
  return mp;
}

using Completion = std::function<bool(const Substitution&, const std::vector<Term>&)>;

// Phase 2: assign each open pattern singleton to a distinct target singleton.
// `done` receives the substitution and the unused target singletons and
// returns true to stop the enumeration.
bool assign_singles(const MatchProblem& mp, std::size_t i, std::vector<bool>& used,
                    const Substitution& s, const MetaSet& metas, const Completion& done) {
  if (i == mp.open.size()) {
    std::vector<Term> rest;
    for (std::size_t j = 0; j < mp.avail_singles.size(); ++j)
      if (!used[j]) rest.push_back(mp.avail_singles[j]);
    return done(s, rest);
  }
  for (std::size_t j = 0; j < mp.avail_singles.size(); ++j) {
    if (used[j]) continue;
    if (j > 0 && !used[j - 1] && mp.avail_singles[j] == mp.avail_singles[j - 1]) continue;
    Substitution s2 = s;
    if (!detail::unify_into(mp.open[i], mp.avail_singles[j], s2, metas)) continue;
    used[j] = true;
    if (assign_singles(mp, i + 1, used, s2, metas, done)) return true;
    used[j] = false;
  }
  return false;
}

// Leftover target elements as multiset terms, canonical order.
std::vector<Term> leftovers(const MatchProblem& mp, const Substitution& s,
                            const std::vector<Term>& rest_singles) {
  MultisetView rest{mp.base, rest_singles, mp.avail_vars};
  MultisetView norm = normalize(s.apply(view_to_term(rest)));
  std::vector<Term> elems;
  for (const auto& e : norm.singles) elems.push_back(msingle(e));
  for (const auto& v : norm.vars) elems.push_back(v);
  return elems;
}

std::vector<Term> live_flex(const MatchProblem& mp, const Substitution& s, const MetaSet& metas) {
  std::vector<Term> out;
  for (const auto& v : mp.flex) {
    Term a = s.apply(v);
    if (a.is_var() && is_instantiable(a, metas) &&
        std::find(out.begin(), out.end(), a) == out.end())
      out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool sound(const MatchProblem& mp, const Substitution& s) {
  return normalize(s.apply(mp.pattern_term)) == normalize(s.apply(mp.target_term));
}

}  // namespace

MultisetView normalize(const Term& t) {
  MultisetView v;
  v.base = t.sort().name;
  flatten(t, v);
  std::sort(v.singles.begin(), v.singles.end());
  std::sort(v.vars.begin(), v.vars.end());
  return v;
}

Term view_to_term(const MultisetView& v) {
  std::vector<Term> elems;
  elems.reserve(v.size());
  for (const auto& e : v.singles) elems.push_back(msingle(e));
  for (const auto& e : v.vars) elems.push_back(e);
  return sum_of(v.base, elems, 0, elems.size());
}

Term normalize_term(const Term& t) {
  if (!t.sort().multiset) return t;
  return view_to_term(normalize(t));
}

Judgment strip_empty(const Judgment& j) {
  Judgment out{j.symbol, {}};
  out.args.reserve(j.args.size());
  for (const auto& a : j.args) out.args.push_back(normalize_term(a));
  return out;
}

bool normalize_equal(const Judgment& a, const Judgment& b) {
  return strip_empty(a) == strip_empty(b);
}

std::optional<Substitution> ac_match(const MultisetView& pattern, const MultisetView& target,
                                     const Substitution& s0, const MetaSet& metas) {
  MatchProblem mp = prepare(pattern, target, s0, metas);
  if (!mp.feasible) return std::nullopt;

  std::optional<Substitution> result;
  std::vector<bool> used(mp.avail_singles.size(), false);
  assign_singles(mp, 0, used, s0, metas,
                 [&](const Substitution& s, const std::vector<Term>& rest) {
                   // Phase 3. Whatever happens here ends the search.
                   std::vector<Term> elems = leftovers(mp, s, rest);
                   std::vector<Term> flex = live_flex(mp, s, metas);
                   const std::size_t k = flex.size();
                   const std::size_t m = elems.size();
                   if (k == 0 && m > 0) return true;
                   Substitution out = s;
                   for (std::size_t i = 0; i < k; ++i) {
                     Term value = mempty(mp.base);
                     if (i + 1 < k && i < m)
                       value = elems[i];
                     else if (i + 1 == k && i < m)
                       value = sum_of(mp.base, elems, i, m);
                     out = out.extended(flex[i], value);
                   }
                   if (sound(mp, out)) result = std::move(out);
                   return true;
                 });
  return result;
}

std::vector<Substitution> ac_match_all(const MultisetView& pattern, const MultisetView& target,
                                       const Substitution& s0, const MetaSet& metas) {
  std::vector<Substitution> results;
  MatchProblem mp = prepare(pattern, target, s0, metas);
  if (!mp.feasible) return results;

  std::set<std::string> seen;
  std::vector<bool> used(mp.avail_singles.size(), false);
  assign_singles(mp, 0, used, s0, metas,
                 [&](const Substitution& s, const std::vector<Term>& rest) {
                   std::vector<Term> elems = leftovers(mp, s, rest);
                   std::vector<Term> flex = live_flex(mp, s, metas);
                   const std::size_t k = flex.size();
                   const std::size_t m = elems.size();
                   if (k == 0) {
                     if (m == 0 && sound(mp, s) && seen.insert(detail::substitution_key(s)).second)
                       results.push_back(s);
                     return false;
                   }
                   // Every function from leftover elements to variables.
                   std::vector<std::size_t> owner(m, 0);
                   while (true) {
                     Substitution out = s;
                     for (std::size_t v = 0; v < k; ++v) {
                       std::vector<Term> mine;
                       for (std::size_t e = 0; e < m; ++e)
                         if (owner[e] == v) mine.push_back(elems[e]);
                       out = out.extended(flex[v], sum_of(mp.base, mine, 0, mine.size()));
                     }
                     if (sound(mp, out) && seen.insert(detail::substitution_key(out)).second)
                       results.push_back(std::move(out));
                     std::size_t e = 0;
                     while (e < m && ++owner[e] == k) owner[e++] = 0;
                     if (e == m) break;
                   }
                   return false;
                 });
  return results;
}

}  // namespace seqcraft
