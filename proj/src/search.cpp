#include "seqcraft/search.hpp"

#include <map>

#include "seqcraft/unify.hpp"
#include "tactics_internal.hpp"

namespace seqcraft {

std::vector<std::string> search_rules(const LogicSpec& logic, const SearchConfig& cfg) {
  std::vector<std::string> out = cfg.rules;
  if (out.empty()) out = logic.search_order();
  if (out.empty())
    for (const auto& r : logic.rules())
      if (r.name != "Cut") out.push_back(r.name);
  bool has_cut = false;
  for (const auto& n : out) has_cut = has_cut || n == "Cut";
  if (cfg.include_cut && !has_cut && logic.find_rule("Cut")) out.push_back("Cut");
  for (const auto& n : out) logic.rule(n);
  return out;
}

namespace {

class Search {
 public:
  Search(const LogicSpec& logic, const SearchConfig& cfg)
      : logic_(logic), cfg_(cfg), order_(search_rules(logic, cfg)) {
    for (const auto& n : order_) rules_.push_back(&logic.rule(n));
  }

  // Proves the `budgets.size()` consecutive subgoals starting at `i`;
  // budgets[k] is the remaining height for the k-th of them.
  std::optional<GoalState> solve(const GoalState& st, std::size_t i,
                                 const std::vector<std::size_t>& budgets) {
    if (budgets.empty()) return st;
    std::vector<std::size_t> tail(budgets.begin() + 1, budgets.end());
    const Goal& goal = st.subgoals()[i];
    if (has_metas(goal)) return expand(st, i, budgets.front(), tail);
    // Nothing shared with the siblings: any proof of this goal will do.
    auto r = solve_one(st, i, budgets.front());
    if (!r) return std::nullopt;
    return solve(*r, i, tail);
  }

  bool exhausted() const { return exhausted_; }

 private:
  std::optional<GoalState> solve_one(const GoalState& st, std::size_t i, std::size_t depth) {
    std::string key = goal_key(st.subgoals()[i]);
    auto it = failed_.find(key);
    if (it != failed_.end() && it->second >= depth) return std::nullopt;
    auto r = expand(st, i, depth, {});
    if (!r && !exhausted_) {
      auto& d = failed_[key];
      d = std::max(d, depth);
    }
    return r;
  }

  // Tries every way of reducing subgoal `i`, then the subgoals after it.
  std::optional<GoalState> expand(const GoalState& st, std::size_t i, std::size_t depth,
                                  const std::vector<std::size_t>& tail) {
    if (depth == 0) return std::nullopt;
    const Goal& goal = st.subgoals()[i];
    auto attempt = [&](const GoalState& next) -> std::optional<GoalState> {
      std::size_t n = produced_between(st, next);
      std::vector<std::size_t> rest(n, depth - 1);
      rest.insert(rest.end(), tail.begin(), tail.end());
      return solve(next, i, rest);
    };

    for (std::size_t k = 0; k < goal.hyps.size(); ++k) {
      if (goal.hyps[k].symbol != goal.target.symbol) continue;
      auto s = unify_judgment(goal.hyps[k], goal.target, st.metas());
      if (!s || !tick()) continue;
      ProofStep step;
      step.tag = StepTag::Close;
      step.sigma = *s;
      step.hyp = k;
      if (auto r = attempt(refine(st, i, *s, {}, std::move(step)))) return r;
    }
    for (const Rule* rule : rules_) {
      if (rule->conclusion.symbol != goal.target.symbol) continue;
      auto [copy, counter] = freshen_rule(*rule, st.counter());
      (void)counter;
      for (auto& s : unify_judgment_all(copy.conclusion, goal.target, st.metas())) {
        if (!tick()) return std::nullopt;
        GoalState next =
            detail::commit_rule(st, i, StepTag::RuleSeq, rule->name, copy, std::move(s), 0);
        if (auto r = attempt(next)) return r;
      }
    }
    return std::nullopt;
  }

  bool tick() {
    if (cfg_.max_nodes != 0 && ++nodes_ > cfg_.max_nodes) exhausted_ = true;
    return !exhausted_;
  }

  static bool has_metas(const Goal& g) {
    if (contains_kind(g.target, VarKind::Meta)) return true;
    for (const auto& h : g.hyps)
      if (contains_kind(h, VarKind::Meta)) return true;
    return false;
  }

  static std::string goal_key(const Goal& g) {
    std::string k = g.target.key();
    for (const auto& h : g.hyps) k += "|" + h.key();
    return k;
  }

  const LogicSpec& logic_;
  SearchConfig cfg_;
  std::vector<std::string> order_;
  std::vector<const Rule*> rules_;
  std::map<std::string, std::size_t> failed_;
  std::size_t nodes_ = 0;
  bool exhausted_ = false;
};

}  // namespace

Etactic auto_ll(SearchConfig cfg) {
  return [cfg](const LogicSpec& logic, const GoalState& st, std::size_t i) -> TacticResult {
    if (i >= st.subgoals().size())
      throw Error("subgoal " + std::to_string(i + 1) + " does not exist");
    Search search(logic, cfg);
    auto r = search.solve(st, i, {cfg.max_depth});
    if (r) return TacticResult::success(std::move(*r));
    if (search.exhausted())
      return TacticResult::failure("auto_ll: search budget of " + std::to_string(cfg.max_nodes) +
                                   " steps exhausted");
    return TacticResult::failure("auto_ll: no proof within depth " +
                                 std::to_string(cfg.max_depth));
  };
}

}  // namespace seqcraft
