#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqcraft/logic.hpp"
#include "seqcraft/multiset.hpp"

namespace seqcraft {

/// A subgoal: local hypotheses and the judgment to prove.
struct Goal {
  std::vector<Judgment> hyps;
  Judgment target;

  friend bool operator==(const Goal&, const Goal&) = default;
};

/// Applies `s` and puts every multiset argument in canonical, empty-free form.
Goal normalize_goal(const Goal& g, const Substitution& s = {});

enum class StepTag { RuleSeq, ERule, DRule, FRule, MetaExists, Close };

std::string_view to_string(StepTag tag);
std::optional<StepTag> step_tag_from_string(std::string_view s);

struct ProofStep {
  StepTag tag = StepTag::RuleSeq;
  std::size_t subgoal = 0;
  std::string rule;              // empty for meta_exists/close
  Rule copy;                     // freshened rule as applied
  Substitution sigma;            // copy's schematics and instantiated metas
  std::size_t produced = 0;      // subgoals replacing the one worked on
  std::size_t hyp = 0;           // hypothesis used by erule/drule/frule/close
  std::vector<std::string> witnesses;  // meta_exists only

  friend bool operator==(const ProofStep& a, const ProofStep& b) {
    return a.tag == b.tag && a.subgoal == b.subgoal && a.rule == b.rule && a.copy == b.copy &&
           a.copy.schematic_vars == b.copy.schematic_vars && a.sigma == b.sigma &&
           a.produced == b.produced && a.hyp == b.hyp && a.witnesses == b.witnesses;
  }
};

/// Children that a rule step produces from `parent`, before `sigma` is
/// applied. Shared by the tactics and by replay.
std::vector<Goal> step_children(const ProofStep& step, const Goal& parent);

class Theorem;

class GoalState {
 public:
  const std::string& logic_name() const { return logic_; }
  const std::vector<Goal>& subgoals() const { return subgoals_; }
  const MetaSet& metas() const { return metas_; }
  /// Composed instantiation of metavariables so far.
  const Substitution& inst() const { return inst_; }
  std::uint64_t counter() const { return counter_; }
  const std::vector<ProofStep>& trace() const { return trace_; }
  const Goal& original() const { return original_; }
  /// Free variables of the original goal declared as existential witnesses.
  const std::vector<Term>& witnesses() const { return witnesses_; }
  bool done() const { return subgoals_.empty(); }

  /// Current value of each witness (meta if not introduced, else instantiated).
  std::vector<std::pair<std::string, Term>> witness_values() const;

  friend bool operator==(const GoalState&, const GoalState&);

 private:
  friend GoalState set_goal(const LogicSpec&, const std::vector<Judgment>&, const Judgment&,
                            const std::vector<std::string>&);
  friend GoalState refine(const GoalState&, std::size_t, const Substitution&, std::vector<Goal>,
                          ProofStep);
  friend GoalState introduce_metas(const GoalState&, std::size_t, const std::vector<std::string>&);
  friend Theorem qed(const GoalState&);

  std::string logic_;
  std::shared_ptr<const Syntax> syntax_;  // for messages only
  std::vector<Goal> subgoals_;
  MetaSet metas_;
  Substitution inst_;
  std::uint64_t counter_ = 1;
  std::vector<ProofStep> trace_;
  Goal original_;
  std::vector<Term> witnesses_;
};

/// Starting state. Witness names must be free variables of `target`.
GoalState set_goal(const LogicSpec& logic, const std::vector<Judgment>& hyps,
                   const Judgment& target, const std::vector<std::string>& witnesses = {});

/// The single way tactics change a state: σ goes to every subgoal, subgoal
/// `i` is replaced by `children`, and `step` is recorded.
GoalState refine(const GoalState& state, std::size_t i, const Substitution& sigma,
                 std::vector<Goal> children, ProofStep step);

/// Turns declared witnesses into metavariables shared by all subgoals.
GoalState introduce_metas(const GoalState& state, std::size_t i,
                          const std::vector<std::string>& names);

/// Plain data behind a theorem; what replay inspects.
struct ProofRecord {
  std::string logic;
  Goal original;
  std::vector<Term> witnesses;
  Judgment statement;
  std::vector<std::pair<std::string, Term>> witness_values;
  std::vector<ProofStep> trace;
};

/// A proved statement. Only qed (and the drivers built on it) create one.
class Theorem {
 public:
  const Judgment& statement() const { return rec_.statement; }
  const std::string& logic() const { return rec_.logic; }
  const std::vector<ProofStep>& trace() const { return rec_.trace; }
  const std::vector<std::pair<std::string, Term>>& witness_values() const {
    return rec_.witness_values;
  }
  const ProofRecord& record() const { return rec_; }

 private:
  explicit Theorem(ProofRecord rec) : rec_(std::move(rec)) {}
  friend Theorem qed(const GoalState& state);
  ProofRecord rec_;
};

/// Throws Error listing any open subgoals.
Theorem qed(const GoalState& state);

struct ReplayResult {
  bool ok = false;
  std::optional<std::size_t> step;  // first failing step, if any
  std::string diagnostic;

  explicit operator bool() const { return ok; }
};

/// Re-checks every recorded step against the logic's rules, independently
/// of the matcher.
ReplayResult replay(const LogicSpec& logic, const ProofRecord& rec);
inline ReplayResult replay(const LogicSpec& logic, const Theorem& thm) {
  return replay(logic, thm.record());
}

/// Drops the newest state. Throws when only the initial state is left.
std::vector<GoalState> undo(std::vector<GoalState> history);

/// Human readable state: numbered subgoals with their hypotheses.
std::string render_goals(const LogicSpec& logic, const GoalState& state);
/// render_goals plus metavariables and witness instantiations.
std::string render_state(const LogicSpec& logic, const GoalState& state);
std::string render_goal(const LogicSpec& logic, const Goal& g);

/// Deterministic text form of a theorem: statement, witnesses and trace.
std::string serialize(const LogicSpec& logic, const ProofRecord& rec);
inline std::string serialize(const LogicSpec& logic, const Theorem& thm) {
  return serialize(logic, thm.record());
}

}  // namespace seqcraft
