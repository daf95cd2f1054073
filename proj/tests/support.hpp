#pragma once

// Helpers shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cctype>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "seqcraft/kernel.hpp"
#include "seqcraft/logic.hpp"
#include "seqcraft/multiset.hpp"
#include "seqcraft/stdlib.hpp"
#include "seqcraft/syntax.hpp"
#include "seqcraft/tactics.hpp"
#include "seqcraft/unify.hpp"

namespace seqcraft::testing {

inline Judgment J(const LogicSpec& logic, std::string_view text) {
  return logic.syntax().parse_judgment(text);
}

inline Term T(const LogicSpec& logic, std::string_view text, std::optional<Sort> sort = std::nullopt) {
  return logic.syntax().parse_term(text, sort);
}

/// Parses with every unknown identifier taken as a schematic variable.
inline Term schematic_term(const LogicSpec& logic, std::string_view text, Sort sort) {
  VarScope scope;
  scope.fresh_kind = VarKind::Schematic;
  return logic.syntax().parse_term(text, sort, &scope);
}

inline Term prop_var(const std::string& name, VarKind kind = VarKind::Free) {
  return Term::var(name, kind, Sort::base("Prop"));
}

inline std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

/// Random well-sorted terms over a signature. Variables are free and named
/// after their sort so that printing never introduces ambiguity.
class TermGen {
 public:
  TermGen(const Signature& sig, std::uint32_t seed) : sig_(sig), rng_(seed) {}

  Term term(const Sort& sort, int depth) {
    if (sort.multiset) return multiset(sort.name, depth);
    std::vector<const OpDecl*> ops;
    for (const auto& op : sig_.ops())
      if (op.result == sort) ops.push_back(&op);
    std::vector<const OpDecl*> leaves, nodes;
    for (auto* op : ops) (op->args.empty() ? leaves : nodes).push_back(op);
    int roll = pick(0, 9);
    if (depth <= 0 || nodes.empty() || roll < 3) {
      if (!leaves.empty() && roll % 2 == 0) return Term::op(leaves[pick(0, leaves.size() - 1)]->name, {}, sort);
      return variable(sort);
    }
    const OpDecl* op = nodes[pick(0, nodes.size() - 1)];
    std::vector<Term> args;
    for (const auto& a : op->args) args.push_back(term(a, depth - 1));
    return Term::op(op->name, std::move(args), sort);
  }

  Term multiset(const std::string& base, int depth) {
    int roll = pick(0, 9);
    if (depth <= 0 || roll < 2) return roll == 0 ? mempty(base) : msingle(term(Sort::base(base), 1));
    if (roll < 5) return msingle(term(Sort::base(base), depth - 1));
    if (roll < 6) return variable(Sort::multiset_of(base));
    return munion(multiset(base, depth - 1), multiset(base, depth - 1));
  }

  Judgment judgment(int depth) {
    const auto& decls = sig_.judgments();
    const JudgmentDecl& d = decls[pick(0, decls.size() - 1)];
    std::vector<Term> args;
    for (const auto& s : d.args) args.push_back(term(s, depth));
    return Judgment{d.name, std::move(args)};
  }

  Term variable(const Sort& sort) {
    std::string stem = lower(sort.name);
    if (sort.multiset) stem = "ms" + stem;
    return Term::var(stem + std::to_string(pick(0, 3)), VarKind::Free, sort);
  }

  std::size_t pick(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  std::mt19937& rng() { return rng_; }

 private:
  const Signature& sig_;
  std::mt19937 rng_;
};

inline Term view_term(const MultisetView& v) { return view_to_term(v); }

inline MultisetView make_view(const std::string& base, std::vector<Term> singles, std::vector<Term> vars) {
  Term t = mempty(base);
  for (const auto& s : singles) t = munion(t, msingle(s));
  for (const auto& x : vars) t = munion(t, x);
  return normalize(t);
}

/// Is there any assignment of target elements to the pattern's singletons
/// and any distribution of the rest over its multiset variables that makes
/// both sides equal? Exhaustive; for tiny instances only.
inline bool brute_force_ac(const MultisetView& pattern, const MultisetView& target) {
  const auto& ps = pattern.singles;
  const auto& ts = target.singles;
  if (!target.vars.empty()) return false;  // oracle covers ground targets
  if (ps.size() > ts.size()) return false;
  std::vector<int> used(ts.size(), 0);
  std::function<bool(std::size_t, const Substitution&)> go = [&](std::size_t i,
                                                                 const Substitution& s) -> bool {
    if (i == ps.size()) {
      std::vector<Term> rest;
      for (std::size_t k = 0; k < ts.size(); ++k)
        if (!used[k]) rest.push_back(ts[k]);
      if (pattern.vars.empty()) return rest.empty();
      // Every way of handing the rest to the variables; a repeated
      // variable must get the same share each time.
      std::vector<Term> vars = pattern.vars;
      std::vector<std::size_t> owner(rest.size(), 0);
      while (true) {
        std::vector<std::vector<Term>> share(vars.size());
        for (std::size_t k = 0; k < rest.size(); ++k) share[owner[k]].push_back(rest[k]);
        Substitution t = s;
        bool ok = true;
        for (std::size_t v = 0; v < vars.size() && ok; ++v) {
          Term value = mempty(pattern.base);
          for (const auto& e : share[v]) value = munion(value, msingle(e));
          value = normalize_term(value);
          if (const Term* old = t.find(vars[v])) {
            ok = normalize_term(*old) == value;
          } else {
            t.bind(vars[v], value);
          }
        }
        if (ok) return true;
        std::size_t k = 0;
        while (k < owner.size() && ++owner[k] == vars.size()) owner[k++] = 0;
        if (k == owner.size()) return false;
      }
    }
    for (std::size_t k = 0; k < ts.size(); ++k) {
      if (used[k]) continue;
      auto m = match_term(ps[i], ts[k], s);
      if (!m) continue;
      used[k] = 1;
      bool found = go(i + 1, *m);
      used[k] = 0;
      if (found) return true;
    }
    return false;
  };
  return go(0, Substitution{});
}

/// Steps of the seven-rule commutativity proof.
inline const std::vector<std::string>& times_comm_steps() {
  static const std::vector<std::string> steps{"ruleseq R→",  "ruleseq C",   "ruleseq R×", "ruleseq L2×",
                                              "ruleseq Ax",  "ruleseq L1×", "ruleseq Ax"};
  return steps;
}

inline const char* times_comm_packaged() {
  return "ETHENL (ETHEN (ruleseq R→) (ETHEN (ruleseq C) (ruleseq R×))) "
         "[ETHEN (ruleseq L2×) (ruleseq Ax); ETHEN (ruleseq L1×) (ruleseq Ax)]";
}

/// Applies each tactic to the first subgoal; returns every state including
/// the initial one, stopping at the first failure.
inline std::vector<GoalState> run_steps(const LogicSpec& logic, GoalState st,
                                        const std::vector<std::string>& tactics,
                                        std::string* failure = nullptr) {
  std::vector<GoalState> out{st};
  for (const auto& t : tactics) {
    TacticResult r = parse_tactic(t)(logic, out.back(), 0);
    if (!r.ok()) {
      if (failure) *failure = t + ": " + r.message;
      break;
    }
    out.push_back(*r.state);
  }
  return out;
}

/// Target strings of each state, one line per subgoal joined by " | ".
inline std::string goal_line(const LogicSpec& logic, const GoalState& st) {
  std::string out;
  for (const auto& g : st.subgoals()) {
    if (!out.empty()) out += " | ";
    out += logic.print(g.target);
  }
  return out;
}

/// Provable ILL sequents built by applying rules forward from axioms over
/// the atoms a..d. Only ⊗, ⊸, & and ⊕ appear, no units or exponentials, so
/// the height of the hidden derivation bounds the search depth needed.
class IllGen {
 public:
  explicit IllGen(std::uint32_t seed) : rng_(seed) {}

  struct Sequent {
    std::vector<Term> ctx;
    Term goal;
    std::size_t height = 0;
  };

  Sequent provable(std::size_t height) {
    if (height <= 1 || pick(0, 5) == 0) {
      Term p = atom(pick(0, 3));
      return {{p}, p, 1};
    }
    switch (pick(0, 5)) {
      case 0: {  // ⊗R
        Sequent l = provable(height - 1), r = provable(height - 1);
        l.ctx.insert(l.ctx.end(), r.ctx.begin(), r.ctx.end());
        return {l.ctx, bin("tensor", l.goal, r.goal), std::max(l.height, r.height) + 1};
      }
      case 1: {  // ⊸R
        Sequent s = provable(height - 1);
        if (s.ctx.empty()) return s;
        std::size_t k = pick(0, s.ctx.size() - 1);
        Term a = s.ctx[k];
        s.ctx.erase(s.ctx.begin() + static_cast<std::ptrdiff_t>(k));
        return {s.ctx, bin("lolli", a, s.goal), s.height + 1};
      }
      case 2: {  // ⊗L
        Sequent s = provable(height - 1);
        if (s.ctx.size() < 2) return s;
        Term a = s.ctx.back();
        s.ctx.pop_back();
        Term b = s.ctx.back();
        s.ctx.pop_back();
        s.ctx.push_back(bin("tensor", a, b));
        s.height += 1;
        return s;
      }
      case 3: {  // ⊕R1 / ⊕R2 with an unrelated disjunct
        Sequent s = provable(height - 1);
        Term other = atom(pick(0, 3));
        s.goal = pick(0, 1) ? bin("plus", s.goal, other) : bin("plus", other, s.goal);
        s.height += 1;
        return s;
      }
      case 4: {  // &L1 / &L2
        Sequent s = provable(height - 1);
        if (s.ctx.empty()) return s;
        std::size_t k = pick(0, s.ctx.size() - 1);
        Term other = atom(pick(0, 3));
        s.ctx[k] = pick(0, 1) ? bin("with", s.ctx[k], other) : bin("with", other, s.ctx[k]);
        s.height += 1;
        return s;
      }
      default: {  // ⊸L
        Sequent l = provable(height - 1), r = provable(height - 1);
        if (r.ctx.empty()) return r;
        std::size_t k = pick(0, r.ctx.size() - 1);
        Term b = r.ctx[k];
        r.ctx.erase(r.ctx.begin() + static_cast<std::ptrdiff_t>(k));
        r.ctx.insert(r.ctx.end(), l.ctx.begin(), l.ctx.end());
        r.ctx.push_back(bin("lolli", l.goal, b));
        return {r.ctx, r.goal, std::max(l.height, r.height) + 1};
      }
    }
  }

  static Judgment judgment(const Sequent& s) {
    Term ctx = mempty("LProp");
    for (const auto& t : s.ctx) ctx = munion(ctx, msingle(t));
    return Judgment{"seq", {normalize_term(ctx), s.goal}};
  }

  static Term atom(std::size_t i) {
    return Term::var(std::string(1, static_cast<char>('a' + i)), VarKind::Free, Sort::base("LProp"));
  }

  std::size_t pick(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  std::mt19937& rng() { return rng_; }

 private:
  static Term bin(const char* op, Term a, Term b) {
    return Term::op(op, {std::move(a), std::move(b)}, Sort::base("LProp"));
  }
  std::mt19937 rng_;
};

/// One single-field corruption of a recorded proof, chosen by `kind` (mod 6)
/// and applied at step `k`. Each kind must make replay fail.
inline ProofRecord mutate_record(const LogicSpec& logic, ProofRecord rec, std::size_t kind, std::size_t k) {
  std::size_t at = k % rec.trace.size();
  // meta_exists steps carry no rule, so move to the next rule step
  while (rec.trace[at].tag == StepTag::MetaExists) at = (at + 1) % rec.trace.size();
  ProofStep& st = rec.trace[at];
  switch (kind % 6) {
    case 0:
      for (const auto& r : logic.rules())
        if (r.name != st.rule && r.premises.size() != st.copy.premises.size()) {
          st.rule = r.name;
          break;
        }
      break;
    case 1:
      st.produced += 1;
      break;
    case 2:
      st.subgoal += 100;
      break;
    case 3:
      st.copy.premises.push_back(st.copy.conclusion);
      break;
    case 4: {
      Substitution cut;
      bool dropped = false;
      for (const auto& [v, t] : st.sigma.bindings()) {
        if (!dropped && v.is_var(VarKind::Schematic)) {
          dropped = true;
          continue;
        }
        cut.bind(v, t);
      }
      st.sigma = cut;
      if (!dropped) st.produced += 1;
      break;
    }
    default:
      rec.trace.pop_back();
      break;
  }
  return rec;
}

}  // namespace seqcraft::testing
