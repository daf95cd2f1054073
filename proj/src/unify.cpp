#include "seqcraft/unify.hpp"

#include "unify_internal.hpp"

namespace seqcraft {

bool is_instantiable(const Term& var, const MetaSet& metas) {
  if (!var.is_var()) return false;
  if (var.var_kind() == VarKind::Schematic) return true;
  return var.var_kind() == VarKind::Meta && metas.contains(var.name());
}

bool has_instantiable(const Term& t, const MetaSet& metas) {
  if (t.is_var()) return is_instantiable(t, metas);
  for (const auto& a : t.args())
    if (has_instantiable(a, metas)) return true;
  return false;
}

namespace detail {

std::string substitution_key(const Substitution& s) {
  std::string k;
  for (const auto& [v, t] : s.bindings()) {
    k += v.key();
    k += '=';
    k += t.key();
    k += ';';
  }
  return k;
}

namespace {

bool bind_var(const Term& var, const Term& value, Substitution& s) {
  if (var.sort() != value.sort() || occurs(var, value)) return false;
  s = s.extended(var, value);
  return true;
}

}  // namespace

bool unify_into(const Term& a0, const Term& b0, Substitution& s, const MetaSet& metas) {
  Term a = s.apply(a0);
  Term b = s.apply(b0);
  if (a == b) return true;
  if (a.sort() != b.sort()) return false;
  if (a.is_var() && is_instantiable(a, metas)) return bind_var(a, b, s);
  if (b.is_var() && is_instantiable(b, metas)) return bind_var(b, a, s);
  if (a.sort().multiset) {
    auto r = ac_match(normalize(a), normalize(b), s, metas);
    if (!r) return false;
    s = std::move(*r);
    return true;
  }
  if (a.is_var() || b.is_var()) return false;
  if (a.name() != b.name() || a.arity() != b.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!unify_into(a.arg(i), b.arg(i), s, metas)) return false;
  return true;
}

}  // namespace detail

namespace {

// The target is never instantiated, even where it holds schematic variables.
bool match_into(const Term& p, const Term& t, Substitution& s) {
  if (p.sort() != t.sort()) return false;
  if (p.is_var(VarKind::Schematic)) {
    if (const Term* b = s.find(p)) return *b == t;
    s.bind(p, t);
    return true;
  }
  if (p.sort().multiset) {
    if (contains_kind(t, VarKind::Schematic)) return normalize(s.apply(p)) == normalize(t);
    auto r = ac_match(normalize(p), normalize(t), s, MetaSet{});
    if (!r) return false;
    s = std::move(*r);
    return true;
  }
  if (p.is_var() || t.is_var()) return p == t;
  if (p.name() != t.name() || p.arity() != t.arity()) return false;
  for (std::size_t i = 0; i < p.arity(); ++i)
    if (!match_into(p.arg(i), t.arg(i), s)) return false;
  return true;
}

}  // namespace

std::optional<Substitution> match_term(const Term& pattern, const Term& target,
                                       const Substitution& s0) {
  Substitution s = s0;
  if (!match_into(pattern, target, s)) return std::nullopt;
  return s;
}

std::optional<Substitution> unify(const Term& a, const Term& b, const MetaSet& metas,
                                  const Substitution& s0) {
  Substitution s = s0;
  if (!detail::unify_into(a, b, s, metas)) return std::nullopt;
  return s;
}

namespace {

void check_same_symbol(const Judgment& a, const Judgment& b) {
  if (a.symbol != b.symbol || a.args.size() != b.args.size())
    throw Error("judgment mismatch: '" + a.symbol + "' against '" + b.symbol + "'");
}

}  // namespace

std::optional<Substitution> unify_judgment(const Judgment& rule_part, const Judgment& goal_part,
                                           const MetaSet& metas, const Substitution& s0) {
  check_same_symbol(rule_part, goal_part);
  Substitution s = s0;
  for (std::size_t i = 0; i < rule_part.args.size(); ++i) {
    if (rule_part.args[i].sort().multiset) continue;
    if (!detail::unify_into(rule_part.args[i], goal_part.args[i], s, metas)) return std::nullopt;
  }
  for (std::size_t i = 0; i < rule_part.args.size(); ++i) {
    if (!rule_part.args[i].sort().multiset) continue;
    if (!detail::unify_into(rule_part.args[i], goal_part.args[i], s, metas)) return std::nullopt;
  }
  return s;
}

std::vector<Substitution> unify_judgment_all(const Judgment& rule_part, const Judgment& goal_part,
                                             const MetaSet& metas, const Substitution& s0) {
  check_same_symbol(rule_part, goal_part);
  Substitution s = s0;
  for (std::size_t i = 0; i < rule_part.args.size(); ++i) {
    if (rule_part.args[i].sort().multiset) continue;
    if (!detail::unify_into(rule_part.args[i], goal_part.args[i], s, metas)) return {};
  }
  std::vector<Substitution> frontier{s};
  for (std::size_t i = 0; i < rule_part.args.size(); ++i) {
    if (!rule_part.args[i].sort().multiset) continue;
    std::vector<Substitution> next;
    for (const auto& cur : frontier) {
      MultisetView p = normalize(cur.apply(rule_part.args[i]));
      MultisetView t = normalize(cur.apply(goal_part.args[i]));
      for (auto& r : ac_match_all(p, t, cur, metas)) next.push_back(std::move(r));
    }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return frontier;
}

}  // namespace seqcraft
