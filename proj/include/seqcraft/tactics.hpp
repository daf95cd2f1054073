#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seqcraft/kernel.hpp"
#include "seqcraft/logic.hpp"

namespace seqcraft {

/// Outcome of a tactic. A missing state is a recoverable failure (no match,
/// arity mismatch, exhausted search); malformed input throws instead.
struct TacticResult {
  std::optional<GoalState> state;
  std::string message;

  bool ok() const { return state.has_value(); }
  static TacticResult success(GoalState s) { return TacticResult{std::move(s), {}}; }
  static TacticResult failure(std::string msg) { return TacticResult{std::nullopt, std::move(msg)}; }
};

using Etactic = std::function<TacticResult(const LogicSpec&, const GoalState&, std::size_t)>;

/// `name := term` pairs; terms are parsed against the subgoal's variables.
using Bindings = std::vector<std::pair<std::string, std::string>>;

Etactic ruleseq(std::string rule);
Etactic rule_seqtac(Bindings bindings, std::string rule);
Etactic erule_seq(std::string rule);
Etactic erule_seqtac(Bindings bindings, std::string rule);
Etactic drule_seq(std::size_t hyp, std::string rule);
Etactic drule_seqtac(Bindings bindings, std::size_t hyp, std::string rule);
Etactic frule_seq(std::size_t hyp, std::string rule);
Etactic frule_seqtac(Bindings bindings, std::size_t hyp, std::string rule);
/// Closes the subgoal with the first hypothesis that unifies with it.
Etactic assumption();
Etactic meta_exists(std::vector<std::string> vars);

Etactic ETHEN(Etactic first, Etactic then);
Etactic ETHENL(Etactic first, std::vector<Etactic> each);
Etactic EORELSE(Etactic first, Etactic second);
Etactic EEVERY(std::vector<Etactic> tactics);
Etactic EREPEAT(Etactic t);
Etactic ALL();
Etactic FAIL();

/// Number of subgoals that replaced subgoal `i` between two states.
std::size_t produced_between(const GoalState& before, const GoalState& after);

/// Tactic expressions: `ruleseq R→`, `rule_seqtac [Γ := {X × Y}] R×`,
/// `ETHENL (ETHEN (ruleseq R→) (ruleseq C)) [ruleseq Ax; ALL]`, ...
Etactic parse_tactic(std::string_view text);

/// Splits `a := t, b := u`; commas inside brackets belong to the terms.
Bindings parse_bindings(std::string_view text);

/// set_goal, run, qed.
Theorem prove_seq(const LogicSpec& logic, const std::vector<Judgment>& hyps,
                  const Judgment& target, const Etactic& tactic);
/// As prove_seq, turning the witnesses into metavariables first.
Theorem constr_prove(const LogicSpec& logic, const std::vector<Judgment>& hyps,
                     const Judgment& target, const std::vector<std::string>& witnesses,
                     const Etactic& tactic);

/// Raised by the proof drivers when a tactic fails or leaves goals open.
class TacticError : public Error {
 public:
  using Error::Error;
};

}  // namespace seqcraft
