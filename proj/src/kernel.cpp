#include "seqcraft/kernel.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace seqcraft {

Goal normalize_goal(const Goal& g, const Substitution& s) {
  Goal out;
  out.hyps.reserve(g.hyps.size());
  for (const auto& h : g.hyps) out.hyps.push_back(strip_empty(s.apply(h)));
  out.target = strip_empty(s.apply(g.target));
  return out;
}

std::string_view to_string(StepTag tag) {
  switch (tag) {
    case StepTag::RuleSeq: return "ruleseq";
    case StepTag::ERule: return "erule";
    case StepTag::DRule: return "drule";
    case StepTag::FRule: return "frule";
    case StepTag::MetaExists: return "meta_exists";
    case StepTag::Close: return "close";
  }
  return "?";
}

std::optional<StepTag> step_tag_from_string(std::string_view s) {
  for (StepTag t : {StepTag::RuleSeq, StepTag::ERule, StepTag::DRule, StepTag::FRule,
                    StepTag::MetaExists, StepTag::Close})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

std::vector<Goal> step_children(const ProofStep& step, const Goal& parent) {
  const auto& prem = step.copy.premises;
  std::vector<Goal> out;
  auto without_hyp = [&] {
    std::vector<Judgment> h = parent.hyps;
    if (step.hyp < h.size()) h.erase(h.begin() + static_cast<std::ptrdiff_t>(step.hyp));
    return h;
  };
  switch (step.tag) {
    case StepTag::RuleSeq:
      for (const auto& p : prem) out.push_back(Goal{parent.hyps, p});
      break;
    case StepTag::ERule: {
      auto hyps = without_hyp();
      for (std::size_t i = 1; i < prem.size(); ++i) out.push_back(Goal{hyps, prem[i]});
      break;
    }
    case StepTag::DRule:
    case StepTag::FRule: {
      auto hyps = step.tag == StepTag::DRule ? without_hyp() : parent.hyps;
      auto main_hyps = hyps;
      main_hyps.push_back(step.copy.conclusion);
      out.push_back(Goal{main_hyps, parent.target});
      for (std::size_t i = 1; i < prem.size(); ++i) out.push_back(Goal{hyps, prem[i]});
      break;
    }
    case StepTag::MetaExists:
      out.push_back(parent);
      break;
    case StepTag::Close:
      break;
  }
  return out;
}

namespace {

void check_plain(const LogicSpec& logic, const Judgment& j) {
  if (!check_sorted(logic.signature(), j)) throw SortError("ill-sorted judgment " + j.key());
  if (contains_kind(j, VarKind::Schematic))
    throw Error("goal contains schematic variables: " + logic.print(j));
  if (contains_kind(j, VarKind::Meta))
    throw Error("goal contains metavariables: " + logic.print(j));
}

std::uint64_t bump(std::uint64_t counter, const std::vector<Term>& vars) {
  for (const auto& v : vars)
    if (auto n = numeric_suffix(v.name())) counter = std::max(counter, *n + 1);
  return counter;
}

void add_metas_of(const Term& t, MetaSet& metas) {
  for (const auto& v : variables(t))
    if (v.var_kind() == VarKind::Meta) metas.insert(v.name());
}

Substitution metas_only(const Substitution& s) {
  return s.restricted([](const Term& v) { return v.var_kind() == VarKind::Meta; });
}

// New meta set after instantiating with `sigma`.
MetaSet updated_metas(const MetaSet& metas, const Substitution& sigma) {
  MetaSet out;
  for (const auto& m : metas) {
    bool bound = false;
    for (const auto& [v, t] : sigma.bindings())
      if (v.var_kind() == VarKind::Meta && v.name() == m) bound = true;
    if (!bound) out.insert(m);
  }
  for (const auto& [v, t] : sigma.bindings()) add_metas_of(t, out);
  return out;
}

Substitution witness_renaming(const std::vector<Term>& witnesses,
                              const std::vector<std::string>& names) {
  Substitution s;
  for (const auto& n : names)
    for (const auto& w : witnesses)
      if (w.name() == n) s.bind(w, Term::var(n, VarKind::Meta, w.sort()));
  return s;
}

// Final statement and witnesses: composed instantiation applied, leftover
// metavariables turned back into free variables, under their base name when
// that does not clash.
void finish(const Goal& original, const std::vector<Term>& witnesses,
            const std::vector<std::string>& introduced, const Substitution& inst,
            Judgment& statement, std::vector<std::pair<std::string, Term>>& values) {
  Substitution intro = witness_renaming(witnesses, introduced);
  Judgment raw = inst.apply(intro.apply(original.target));
  std::vector<std::pair<std::string, Term>> raw_values;
  for (const auto& w : witnesses) raw_values.emplace_back(w.name(), inst.apply(intro.apply(w)));

  std::vector<Term> vars = variables(raw);
  for (const auto& [n, t] : raw_values) collect_variables(t, vars);
  for (const auto& h : original.hyps) collect_variables(h, vars);
  std::set<std::string> taken;
  for (const auto& v : vars)
    if (v.var_kind() != VarKind::Meta) taken.insert(v.name());
  for (const auto& w : witnesses) taken.insert(w.name());
  Substitution ren;
  for (const auto& v : vars) {
    if (v.var_kind() != VarKind::Meta || ren.binds(v)) continue;
    std::string name(name_base(v.name()));
    if (name.empty() || taken.contains(name)) name = v.name();
    while (taken.contains(name)) name += "'";
    taken.insert(name);
    ren.bind(v, Term::var(name, VarKind::Free, v.sort()));
  }
  statement = ren.apply(raw);
  values.clear();
  for (const auto& [n, t] : raw_values) values.emplace_back(n, ren.apply(t));
}

std::vector<std::string> introduced_witnesses(const std::vector<ProofStep>& trace) {
  std::vector<std::string> out;
  for (const auto& s : trace)
    if (s.tag == StepTag::MetaExists)
      for (const auto& w : s.witnesses) out.push_back(w);
  return out;
}

}  // namespace

std::vector<std::pair<std::string, Term>> GoalState::witness_values() const {
  Substitution intro = witness_renaming(witnesses_, introduced_witnesses(trace_));
  std::vector<std::pair<std::string, Term>> out;
  for (const auto& w : witnesses_) out.emplace_back(w.name(), inst_.apply(intro.apply(w)));
  return out;
}

bool operator==(const GoalState& a, const GoalState& b) {
  return a.logic_ == b.logic_ && a.subgoals_ == b.subgoals_ && a.metas_ == b.metas_ &&
         a.inst_ == b.inst_ && a.counter_ == b.counter_ && a.trace_ == b.trace_ &&
         a.original_ == b.original_ && a.witnesses_ == b.witnesses_;
}

GoalState set_goal(const LogicSpec& logic, const std::vector<Judgment>& hyps,
                   const Judgment& target, const std::vector<std::string>& witnesses) {
  for (const auto& h : hyps) check_plain(logic, h);
  check_plain(logic, target);
  GoalState st;
  st.logic_ = logic.name();
  st.syntax_ = logic.shared_syntax();
  st.original_ = Goal{hyps, target};
  std::vector<Term> vars = variables(target);
  for (const auto& h : hyps) collect_variables(h, vars);
  for (const auto& name : witnesses) {
    auto it = std::find_if(vars.begin(), vars.end(),
                           [&](const Term& v) { return v.name() == name; });
    if (it == vars.end()) throw Error("witness '" + name + "' does not occur in the goal");
    if (std::find(st.witnesses_.begin(), st.witnesses_.end(), *it) != st.witnesses_.end())
      throw Error("witness '" + name + "' declared twice");
    st.witnesses_.push_back(*it);
  }
  st.counter_ = bump(1, vars);
  st.subgoals_.push_back(normalize_goal(st.original_));
  return st;
}

GoalState refine(const GoalState& state, std::size_t i, const Substitution& sigma,
                 std::vector<Goal> children, ProofStep step) {
  if (i >= state.subgoals_.size())
    throw Error("subgoal " + std::to_string(i + 1) + " does not exist");
  for (const auto& [v, t] : sigma.bindings()) {
    if (v.var_kind() == VarKind::Free)
      throw Error("substitution touches goal variable '" + v.name() + "'");
    if (v.var_kind() == VarKind::Meta && !state.metas_.contains(v.name()))
      throw Error("substitution binds unknown metavariable '" + v.name() + "'");
    if (contains_kind(t, VarKind::Schematic))
      throw Error("substitution leaves schematic variables in '" + v.name() + "'");
  }
  GoalState out = state;
  std::vector<Goal> goals;
  goals.reserve(state.subgoals_.size() + children.size());
  for (std::size_t j = 0; j < state.subgoals_.size(); ++j) {
    if (j != i) {
      goals.push_back(normalize_goal(state.subgoals_[j], sigma));
      continue;
    }
    for (const auto& c : children) goals.push_back(normalize_goal(c, sigma));
  }
  out.subgoals_ = std::move(goals);
  Substitution m = metas_only(sigma);
  out.inst_ = compose(state.inst_, m);
  out.metas_ = updated_metas(state.metas_, sigma);
  out.counter_ = bump(state.counter_, step.copy.schematic_vars);
  for (const auto& [v, t] : sigma.bindings()) out.counter_ = bump(out.counter_, variables(t));
  step.subgoal = i;
  step.produced = children.size();
  out.trace_.push_back(std::move(step));
  return out;
}

GoalState introduce_metas(const GoalState& state, std::size_t i,
                          const std::vector<std::string>& names) {
  if (i >= state.subgoals_.size() && !names.empty())
    throw Error("subgoal " + std::to_string(i + 1) + " does not exist");
  for (const auto& n : names) {
    bool declared = std::any_of(state.witnesses_.begin(), state.witnesses_.end(),
                                [&](const Term& w) { return w.name() == n; });
    if (!declared) throw UnknownSymbol("witness", n);
    auto done = introduced_witnesses(state.trace_);
    if (std::find(done.begin(), done.end(), n) != done.end())
      throw Error("witness '" + n + "' is already a metavariable");
  }
  if (names.empty()) return state;
  Substitution ren = witness_renaming(state.witnesses_, names);
  GoalState out = state;
  for (auto& g : out.subgoals_) g = normalize_goal(g, ren);
  for (const auto& n : names) out.metas_.insert(n);
  ProofStep step;
  step.tag = StepTag::MetaExists;
  step.subgoal = i;
  step.produced = 1;
  step.witnesses = names;
  out.trace_.push_back(std::move(step));
  return out;
}

Theorem qed(const GoalState& state) {
  if (!state.done()) {
    std::string msg = std::to_string(state.subgoals().size()) + " open subgoal(s)";
    for (const auto& g : state.subgoals())
      msg += "\n  " + (state.syntax_ ? state.syntax_->print(g.target) : g.target.key());
    throw Error(msg);
  }
  ProofRecord rec;
  rec.logic = state.logic_name();
  rec.original = state.original();
  rec.witnesses = state.witnesses();
  rec.trace = state.trace();
  finish(rec.original, rec.witnesses, introduced_witnesses(rec.trace), state.inst(),
         rec.statement, rec.witness_values);
  return Theorem(std::move(rec));
}

// ---------------------------------------------------------------------------
// Replay

namespace {

// True iff `copy` is `rule` with its schematic variables renamed injectively.
bool renames(const Term& a, const Term& b, std::map<std::string, std::string>& fwd,
             std::map<std::string, std::string>& bwd) {
  if (a.sort() != b.sort()) return false;
  if (a.is_var() != b.is_var()) return false;
  if (a.is_var()) {
    if (a.var_kind() != VarKind::Schematic || b.var_kind() != VarKind::Schematic) return false;
    auto [it, fresh] = fwd.emplace(a.name(), b.name());
    auto [jt, fresh2] = bwd.emplace(b.name(), a.name());
    return it->second == b.name() && jt->second == a.name();
  }
  if (a.name() != b.name() || a.arity() != b.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!renames(a.arg(i), b.arg(i), fwd, bwd)) return false;
  return true;
}

bool renames(const Judgment& a, const Judgment& b, std::map<std::string, std::string>& fwd,
             std::map<std::string, std::string>& bwd) {
  if (a.symbol != b.symbol || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!renames(a.args[i], b.args[i], fwd, bwd)) return false;
  return true;
}

bool is_renaming(const Rule& rule, const Rule& copy) {
  if (rule.premises.size() != copy.premises.size()) return false;
  std::map<std::string, std::string> fwd, bwd;
  for (std::size_t i = 0; i < rule.premises.size(); ++i)
    if (!renames(rule.premises[i], copy.premises[i], fwd, bwd)) return false;
  return renames(rule.conclusion, copy.conclusion, fwd, bwd);
}

ReplayResult failure(std::optional<std::size_t> step, std::string msg) {
  ReplayResult r;
  r.ok = false;
  r.step = step;
  r.diagnostic = step ? "step " + std::to_string(*step + 1) + ": " + msg : msg;
  return r;
}

}  // namespace

ReplayResult replay(const LogicSpec& logic, const ProofRecord& rec) {
  if (rec.logic != logic.name())
    return failure(std::nullopt, "theorem belongs to logic '" + rec.logic + "'");
  for (const auto& w : rec.witnesses)
    if (!w.is_var(VarKind::Free)) return failure(std::nullopt, "witness is not a free variable");
  std::vector<Goal> open{normalize_goal(rec.original)};
  MetaSet metas;
  Substitution inst;
  std::vector<std::string> introduced;

  for (std::size_t k = 0; k < rec.trace.size(); ++k) {
    const ProofStep& st = rec.trace[k];
    if (st.subgoal >= open.size()) return failure(k, "no subgoal " + std::to_string(st.subgoal + 1));
    const Goal parent = open[st.subgoal];

    if (st.tag == StepTag::MetaExists) {
      for (const auto& n : st.witnesses) {
        bool declared = std::any_of(rec.witnesses.begin(), rec.witnesses.end(),
                                    [&](const Term& w) { return w.name() == n; });
        if (!declared || std::find(introduced.begin(), introduced.end(), n) != introduced.end())
          return failure(k, "bad witness '" + n + "'");
        introduced.push_back(n);
        metas.insert(n);
      }
      if (st.produced != 1) return failure(k, "meta_exists must keep the subgoal");
      Substitution ren = witness_renaming(rec.witnesses, st.witnesses);
      for (auto& g : open) g = normalize_goal(g, ren);
      continue;
    }

    const Substitution& sigma = st.sigma;
    for (const auto& [v, t] : sigma.bindings()) {
      if (v.var_kind() == VarKind::Free) return failure(k, "binds goal variable " + v.name());
      if (v.var_kind() == VarKind::Meta && !metas.contains(v.name()))
        return failure(k, "binds unknown metavariable " + v.name());
      if (contains_kind(t, VarKind::Schematic))
        return failure(k, "leaves a schematic variable in the binding of " + v.name());
      if (!check_sorted(logic.signature(), t)) return failure(k, "ill-sorted binding");
    }

    if (st.tag == StepTag::Close) {
      if (st.hyp >= parent.hyps.size()) return failure(k, "no hypothesis " + std::to_string(st.hyp));
      if (!normalize_equal(sigma.apply(parent.hyps[st.hyp]), sigma.apply(parent.target)))
        return failure(k, "hypothesis does not close the goal");
    } else {
      const Rule* rule = logic.find_rule(st.rule);
      if (!rule) return failure(k, "unknown rule " + st.rule);
      if (!is_renaming(*rule, st.copy)) return failure(k, "recorded copy is not an instance of " + st.rule);
      for (const auto& v : rule_variables(st.copy.premises, st.copy.conclusion))
        if (!sigma.binds(v)) return failure(k, "schematic " + v.name() + " left unbound");
      const auto& prem = st.copy.premises;
      switch (st.tag) {
        case StepTag::RuleSeq:
          if (!normalize_equal(sigma.apply(st.copy.conclusion), sigma.apply(parent.target)))
            return failure(k, st.rule + " conclusion does not match the goal");
          break;
        case StepTag::ERule:
          if (prem.empty() || st.hyp >= parent.hyps.size())
            return failure(k, "erule needs a premise and a hypothesis");
          if (!normalize_equal(sigma.apply(st.copy.conclusion), sigma.apply(parent.target)))
            return failure(k, st.rule + " conclusion does not match the goal");
          if (!normalize_equal(sigma.apply(prem[0]), sigma.apply(parent.hyps[st.hyp])))
            return failure(k, st.rule + " premise does not match the hypothesis");
          break;
        case StepTag::DRule:
        case StepTag::FRule:
          if (prem.empty() || st.hyp >= parent.hyps.size())
            return failure(k, "drule/frule needs a premise and a hypothesis");
          if (!normalize_equal(sigma.apply(prem[0]), sigma.apply(parent.hyps[st.hyp])))
            return failure(k, st.rule + " premise does not match the hypothesis");
          break;
        default:
          break;
      }
    }
    std::vector<Goal> children = step_children(st, parent);
    if (children.size() != st.produced)
      return failure(k, "recorded " + std::to_string(st.produced) + " subgoals, rule gives " +
                            std::to_string(children.size()));
    std::vector<Goal> next;
    for (std::size_t j = 0; j < open.size(); ++j) {
      if (j != st.subgoal) {
        next.push_back(normalize_goal(open[j], sigma));
        continue;
      }
      for (const auto& c : children) next.push_back(normalize_goal(c, sigma));
    }
    open = std::move(next);
    inst = compose(inst, metas_only(sigma));
    metas = updated_metas(metas, sigma);
  }
  if (!open.empty())
    return failure(std::nullopt, std::to_string(open.size()) + " subgoal(s) left open");

  Judgment statement;
  std::vector<std::pair<std::string, Term>> values;
  finish(rec.original, rec.witnesses, introduced, inst, statement, values);
  if (!(statement == rec.statement)) return failure(std::nullopt, "statement differs from the proof");
  if (values != rec.witness_values) return failure(std::nullopt, "witnesses differ from the proof");
  ReplayResult ok;
  ok.ok = true;
  return ok;
}

std::vector<GoalState> undo(std::vector<GoalState> history) {
  if (history.empty()) throw Error("no proof in progress");
  if (history.size() < 2) throw Error("nothing to undo");
  history.pop_back();
  return history;
}

// ---------------------------------------------------------------------------
// Rendering

std::string render_goal(const LogicSpec& logic, const Goal& g) {
  std::string out = logic.print(g.target);
  for (std::size_t k = 0; k < g.hyps.size(); ++k)
    out += "\n     [" + std::to_string(k) + "] " + logic.print(g.hyps[k]);
  return out;
}

std::string render_goals(const LogicSpec& logic, const GoalState& state) {
  if (state.done()) return "No subgoals.\n";
  std::string out;
  for (std::size_t i = 0; i < state.subgoals().size(); ++i)
    out += " " + std::to_string(i + 1) + ". " + render_goal(logic, state.subgoals()[i]) + "\n";
  return out;
}

std::string render_state(const LogicSpec& logic, const GoalState& state) {
  std::string out = render_goals(logic, state);
  if (!state.metas().empty()) {
    out += "metas:";
    for (const auto& m : state.metas()) out += " " + m;
    out += "\n";
  }
  for (const auto& [n, t] : state.witness_values()) out += n + " := " + logic.print(t) + "\n";
  return out;
}

std::string serialize(const LogicSpec& logic, const ProofRecord& rec) {
  std::ostringstream out;
  out << "theorem " << logic.print(rec.statement) << "\n";
  out << "logic " << rec.logic << "\n";
  for (const auto& h : rec.original.hyps) out << "assume " << logic.print(h) << "\n";
  out << "goal " << logic.print(rec.original.target) << "\n";
  for (const auto& [n, t] : rec.witness_values) out << "witness " << n << " := " << logic.print(t) << "\n";
  for (std::size_t k = 0; k < rec.trace.size(); ++k) {
    const ProofStep& s = rec.trace[k];
    out << "step " << k + 1 << " " << to_string(s.tag);
    if (!s.rule.empty()) out << " " << s.rule;
    out << " subgoal=" << s.subgoal + 1 << " produced=" << s.produced;
    if (s.tag == StepTag::ERule || s.tag == StepTag::DRule || s.tag == StepTag::FRule ||
        s.tag == StepTag::Close)
      out << " hyp=" << s.hyp;
    out << "\n";
    for (const auto& w : s.witnesses) out << "  exists " << w << "\n";
    if (!s.rule.empty()) out << "  copy " << print_rule(logic, s.copy) << "\n";
    for (const auto& [v, t] : s.sigma.bindings())
      out << "  " << to_string(v.var_kind()) << " " << v.name() << " := " << logic.print(t) << "\n";
  }
  return out.str();
}

}  // namespace seqcraft
