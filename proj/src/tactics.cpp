#include "seqcraft/tactics.hpp"

#include <cctype>

#include "seqcraft/search.hpp"
#include "seqcraft/unify.hpp"
#include "tactics_internal.hpp"

namespace seqcraft {

namespace detail {

GoalState commit_rule(const GoalState& st, std::size_t i, StepTag tag, const std::string& rule,
                      Rule copy, Substitution sigma, std::size_t hyp) {
  for (const auto& v : copy.schematic_vars)
    if (!sigma.binds(v)) sigma = sigma.extended(v, Term::var(v.name(), VarKind::Meta, v.sort()));
  ProofStep step;
  step.tag = tag;
  step.rule = rule;
  step.copy = std::move(copy);
  step.sigma = sigma;
  step.hyp = hyp;
  std::vector<Goal> children = step_children(step, st.subgoals()[i]);
  return refine(st, i, sigma, std::move(children), std::move(step));
}

}  // namespace detail

namespace {

const Goal& subgoal_at(const GoalState& st, std::size_t i) {
  if (i >= st.subgoals().size())
    throw Error("subgoal " + std::to_string(i + 1) + " does not exist (" +
                std::to_string(st.subgoals().size()) + " open)");
  return st.subgoals()[i];
}

VarScope goal_scope(const Goal& g) {
  VarScope scope;
  scope.fresh_kind = VarKind::Free;
  std::vector<Term> vars = variables(g.target);
  for (const auto& h : g.hyps) collect_variables(h, vars);
  for (const auto& v : vars) scope.add(v);
  return scope;
}

// Initial bindings on the freshened copy from `name := text` pairs that
// refer to the rule's own variable names.
Substitution initial_bindings(const LogicSpec& logic, const Rule& rule, const Substitution& ren,
                              const Goal& goal, const Bindings& bindings) {
  Substitution s0;
  VarScope scope = goal_scope(goal);
  for (const auto& [name, text] : bindings) {
    const Term* var = nullptr;
    for (const auto& v : rule.schematic_vars)
      if (v.name() == name) var = &v;
    if (!var) throw UnknownSymbol("variable", name + "' in rule '" + rule.name);
    Term value = logic.syntax().parse_term(text, var->sort(), &scope);
    Term target = ren.apply(*var);
    if (s0.binds(target)) throw Error("variable '" + name + "' bound twice");
    s0 = s0.extended(target, value);
  }
  return s0;
}

struct RuleTactic {
  StepTag tag;
  std::string rule;
  Bindings bindings;
  std::size_t hyp = 0;

  TacticResult operator()(const LogicSpec& logic, const GoalState& st, std::size_t i) const {
    const Goal& goal = subgoal_at(st, i);
    const Rule& r = logic.rule(rule);
    Substitution ren;
    auto [copy, counter] = freshen_rule(r, st.counter(), &ren);
    (void)counter;
    Substitution s0 = initial_bindings(logic, r, ren, goal, bindings);
    const MetaSet& metas = st.metas();
    auto mismatch = [&](const Judgment& a, const Judgment& b) {
      return TacticResult::failure("rule " + rule + " does not match: " + logic.print(a) +
                                   " against " + logic.print(b));
    };
    switch (tag) {
      case StepTag::RuleSeq: {
        auto s = unify_judgment(copy.conclusion, goal.target, metas, s0);
        if (!s) return mismatch(copy.conclusion, goal.target);
        return TacticResult::success(
            detail::commit_rule(st, i, tag, rule, std::move(copy), std::move(*s), 0));
      }
      case StepTag::ERule: {
        if (copy.premises.empty()) throw Error("rule " + rule + " has no premises");
        if (goal.hyps.empty()) return TacticResult::failure("no hypotheses to eliminate");
        auto s1 = unify_judgment(copy.conclusion, goal.target, metas, s0);
        if (!s1) return mismatch(copy.conclusion, goal.target);
        for (std::size_t k = 0; k < goal.hyps.size(); ++k) {
          if (goal.hyps[k].symbol != copy.premises[0].symbol) continue;
          auto s = unify_judgment(copy.premises[0], goal.hyps[k], metas, *s1);
          if (s)
            return TacticResult::success(
                detail::commit_rule(st, i, tag, rule, std::move(copy), std::move(*s), k));
        }
        return TacticResult::failure("no hypothesis matches the first premise of " + rule + ": " +
                                     logic.print(copy.premises[0]));
      }
      case StepTag::DRule:
      case StepTag::FRule: {
        if (copy.premises.empty()) throw Error("rule " + rule + " has no premises");
        if (hyp >= goal.hyps.size())
          throw Error("hypothesis " + std::to_string(hyp) + " does not exist (" +
                      std::to_string(goal.hyps.size()) + " present)");
        auto s = unify_judgment(copy.premises[0], goal.hyps[hyp], metas, s0);
        if (!s) return mismatch(copy.premises[0], goal.hyps[hyp]);
        return TacticResult::success(
            detail::commit_rule(st, i, tag, rule, std::move(copy), std::move(*s), hyp));
      }
      default:
        break;
    }
    throw Error("bad rule tactic");
  }
};

// Applies `t` to each of `count` consecutive subgoals starting at `i`,
// left to right, shifting past whatever each application produces.
TacticResult each_subgoal(const LogicSpec& logic, GoalState st, std::size_t i, std::size_t count,
                          const std::function<const Etactic&(std::size_t)>& tactic_for) {
  std::size_t at = i;
  for (std::size_t k = 0; k < count; ++k) {
    TacticResult r = tactic_for(k)(logic, st, at);
    if (!r.ok()) return r;
    at += produced_between(st, *r.state);
    st = std::move(*r.state);
  }
  return TacticResult::success(std::move(st));
}

}  // namespace

std::size_t produced_between(const GoalState& before, const GoalState& after) {
  return after.subgoals().size() + 1 - before.subgoals().size();
}

Etactic ruleseq(std::string rule) { return RuleTactic{StepTag::RuleSeq, std::move(rule), {}, 0}; }
Etactic rule_seqtac(Bindings b, std::string rule) {
  return RuleTactic{StepTag::RuleSeq, std::move(rule), std::move(b), 0};
}
Etactic erule_seq(std::string rule) { return RuleTactic{StepTag::ERule, std::move(rule), {}, 0}; }
Etactic erule_seqtac(Bindings b, std::string rule) {
  return RuleTactic{StepTag::ERule, std::move(rule), std::move(b), 0};
}
Etactic drule_seq(std::size_t hyp, std::string rule) {
  return RuleTactic{StepTag::DRule, std::move(rule), {}, hyp};
}
Etactic drule_seqtac(Bindings b, std::size_t hyp, std::string rule) {
  return RuleTactic{StepTag::DRule, std::move(rule), std::move(b), hyp};
}
Etactic frule_seq(std::size_t hyp, std::string rule) {
  return RuleTactic{StepTag::FRule, std::move(rule), {}, hyp};
}
Etactic frule_seqtac(Bindings b, std::size_t hyp, std::string rule) {
  return RuleTactic{StepTag::FRule, std::move(rule), std::move(b), hyp};
}

Etactic assumption() {
  return [](const LogicSpec& logic, const GoalState& st, std::size_t i) -> TacticResult {
    const Goal& goal = subgoal_at(st, i);
    for (std::size_t k = 0; k < goal.hyps.size(); ++k) {
      if (goal.hyps[k].symbol != goal.target.symbol) continue;
      auto s = unify_judgment(goal.hyps[k], goal.target, st.metas());
      if (!s) continue;
      ProofStep step;
      step.tag = StepTag::Close;
      step.sigma = *s;
      step.hyp = k;
      return TacticResult::success(refine(st, i, *s, {}, std::move(step)));
    }
    return TacticResult::failure("no hypothesis matches " + logic.print(goal.target));
  };
}

Etactic meta_exists(std::vector<std::string> vars) {
  return [vars = std::move(vars)](const LogicSpec&, const GoalState& st,
                                  std::size_t i) -> TacticResult {
    if (vars.empty()) return TacticResult::success(st);
    subgoal_at(st, i);
    return TacticResult::success(introduce_metas(st, i, vars));
  };
}

Etactic ETHEN(Etactic first, Etactic then) {
  return [first = std::move(first), then = std::move(then)](
             const LogicSpec& logic, const GoalState& st, std::size_t i) -> TacticResult {
    TacticResult r = first(logic, st, i);
    if (!r.ok()) return r;
    std::size_t n = produced_between(st, *r.state);
    return each_subgoal(logic, std::move(*r.state), i, n,
                        [&](std::size_t) -> const Etactic& { return then; });
  };
}

Etactic ETHENL(Etactic first, std::vector<Etactic> each) {
  return [first = std::move(first), each = std::move(each)](
             const LogicSpec& logic, const GoalState& st, std::size_t i) -> TacticResult {
    TacticResult r = first(logic, st, i);
    if (!r.ok()) return r;
    std::size_t n = produced_between(st, *r.state);
    if (n != each.size())
      return TacticResult::failure("ETHENL: tactic produced " + std::to_string(n) +
                                   " subgoals but " + std::to_string(each.size()) +
                                   " tactics were given");
    return each_subgoal(logic, std::move(*r.state), i, n,
                        [&](std::size_t k) -> const Etactic& { return each[k]; });
  };
}

Etactic EORELSE(Etactic first, Etactic second) {
  return [first = std::move(first), second = std::move(second)](
             const LogicSpec& logic, const GoalState& st, std::size_t i) -> TacticResult {
    TacticResult r = first(logic, st, i);
    if (r.ok()) return r;
    return second(logic, st, i);
  };
}

Etactic EEVERY(std::vector<Etactic> tactics) {
  Etactic acc = ALL();
  for (auto it = tactics.rbegin(); it != tactics.rend(); ++it) acc = ETHEN(*it, acc);
  return acc;
}

namespace {

TacticResult repeat(const Etactic& t, const LogicSpec& logic, const GoalState& st, std::size_t i,
                    std::size_t depth) {
  if (depth > 10000) return TacticResult::success(st);
  TacticResult r = t(logic, st, i);
  if (!r.ok()) return TacticResult::success(st);
  std::size_t n = produced_between(st, *r.state);
  GoalState cur = std::move(*r.state);
  std::size_t at = i;
  for (std::size_t k = 0; k < n; ++k) {
    TacticResult sub = repeat(t, logic, cur, at, depth + 1);
    at += produced_between(cur, *sub.state);
    cur = std::move(*sub.state);
  }
  return TacticResult::success(std::move(cur));
}

}  // namespace

Etactic EREPEAT(Etactic t) {
  return [t = std::move(t)](const LogicSpec& logic, const GoalState& st, std::size_t i) {
    return repeat(t, logic, st, i, 0);
  };
}

Etactic ALL() {
  return [](const LogicSpec&, const GoalState& st, std::size_t) {
    return TacticResult::success(st);
  };
}

Etactic FAIL() {
  return [](const LogicSpec&, const GoalState&, std::size_t) {
    return TacticResult::failure("FAIL");
  };
}

// ---------------------------------------------------------------------------
// Tactic expressions

namespace {

class TacticParser {
 public:
  explicit TacticParser(std::string_view text) : s_(text) {}

  Etactic parse() {
    Etactic t = tactic();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(s_.substr(pos_, 1)) + "'");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("tactic: " + msg, 1, pos_ + 1);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool at(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  void expect(char c) {
    if (!at(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  static bool delimiter(char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '[' ||
           c == ']' || c == ';';
  }

  std::string word() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && !delimiter(s_[pos_])) ++pos_;
    if (start == pos_) fail("expected a name");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string rule_name() {
    if (at('(')) {
      ++pos_;
      std::string n = word();
      expect(')');
      return n;
    }
    return word();
  }

  std::size_t number() {
    std::string w = word();
    std::size_t n = 0;
    for (char c : w) {
      if (!std::isdigit(static_cast<unsigned char>(c))) fail("expected a number, got '" + w + "'");
      n = n * 10 + static_cast<std::size_t>(c - '0');
    }
    return n;
  }

  // Raw text between balanced square brackets.
  std::string bracketed() {
    expect('[');
    std::size_t start = pos_;
    int depth = 0;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '[' || c == '(' || c == '{') ++depth;
      if (c == ')' || c == '}') --depth;
      if (c == ']') {
        if (depth == 0) break;
        --depth;
      }
      ++pos_;
    }
    if (pos_ == s_.size()) fail("missing ']'");
    std::string out(s_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  std::vector<Etactic> tactic_list() {
    expect('[');
    std::vector<Etactic> out;
    if (at(']')) {
      ++pos_;
      return out;
    }
    while (true) {
      out.push_back(tactic());
      if (at(';') || at(',')) {
        ++pos_;
        continue;
      }
      expect(']');
      return out;
    }
  }

  std::vector<std::string> names() {
    std::vector<std::string> out;
    if (at('[')) {
      std::string inner = bracketed();
      std::string cur;
      for (char c : inner + ",") {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
          if (!cur.empty()) out.push_back(cur);
          cur.clear();
        } else {
          cur += c;
        }
      }
      return out;
    }
    while (true) {
      skip();
      if (pos_ == s_.size() || delimiter(s_[pos_])) return out;
      out.push_back(word());
    }
  }

  Etactic tactic() {
    if (at('(')) {
      ++pos_;
      Etactic t = tactic();
      expect(')');
      return t;
    }
    std::string kw = word();
    if (kw == "ruleseq") return ruleseq(rule_name());
    if (kw == "rule_seqtac") {
      Bindings b = parse_bindings(bracketed());
      return rule_seqtac(std::move(b), rule_name());
    }
    if (kw == "erule_seq") return erule_seq(rule_name());
    if (kw == "erule_seqtac") {
      Bindings b = parse_bindings(bracketed());
      return erule_seqtac(std::move(b), rule_name());
    }
    if (kw == "drule_seq" || kw == "frule_seq") {
      std::size_t k = number();
      std::string r = rule_name();
      return kw == "drule_seq" ? drule_seq(k, r) : frule_seq(k, r);
    }
    if (kw == "drule_seqtac" || kw == "frule_seqtac") {
      Bindings b = parse_bindings(bracketed());
      std::size_t k = number();
      std::string r = rule_name();
      return kw == "drule_seqtac" ? drule_seqtac(std::move(b), k, r)
                                  : frule_seqtac(std::move(b), k, r);
    }
    if (kw == "assumption" || kw == "close") return assumption();
    if (kw == "meta_exists") return meta_exists(names());
    if (kw == "auto_ll") {
      SearchConfig cfg;
      cfg.max_depth = number();
      return auto_ll(cfg);
    }
    if (kw == "ETHEN") {
      Etactic a = tactic();
      Etactic b = tactic();
      return ETHEN(std::move(a), std::move(b));
    }
    if (kw == "ETHENL") {
      Etactic a = tactic();
      return ETHENL(std::move(a), tactic_list());
    }
    if (kw == "EORELSE") {
      Etactic a = tactic();
      Etactic b = tactic();
      return EORELSE(std::move(a), std::move(b));
    }
    if (kw == "EEVERY") return EEVERY(tactic_list());
    if (kw == "EREPEAT") return EREPEAT(tactic());
    if (kw == "ALL") return ALL();
    if (kw == "FAIL") return FAIL();
    fail("unknown tactic '" + kw + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string trimmed(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

}  // namespace

Bindings parse_bindings(std::string_view text) {
  Bindings out;
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char c : text) {
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
      continue;
    }
    cur += c;
  }
  parts.push_back(cur);
  for (const auto& p : parts) {
    if (trimmed(p).empty()) continue;
    std::size_t eq = p.find(":=");
    if (eq == std::string::npos) throw ParseError("expected 'name := term' in bindings", 1, 1);
    std::string name = trimmed(std::string_view(p).substr(0, eq));
    std::string term = trimmed(std::string_view(p).substr(eq + 2));
    if (name.empty() || term.empty()) throw ParseError("empty binding", 1, 1);
    out.emplace_back(name, term);
  }
  return out;
}

Etactic parse_tactic(std::string_view text) { return TacticParser(text).parse(); }

Theorem prove_seq(const LogicSpec& logic, const std::vector<Judgment>& hyps,
                  const Judgment& target, const Etactic& tactic) {
  return constr_prove(logic, hyps, target, {}, tactic);
}

Theorem constr_prove(const LogicSpec& logic, const std::vector<Judgment>& hyps,
                     const Judgment& target, const std::vector<std::string>& witnesses,
                     const Etactic& tactic) {
  GoalState st = set_goal(logic, hyps, target, witnesses);
  if (!witnesses.empty()) st = introduce_metas(st, 0, witnesses);
  TacticResult r = tactic(logic, st, 0);
  if (!r.ok()) throw TacticError(r.message);
  if (!r.state->done())
    throw TacticError("proof unfinished:\n" + render_goals(logic, *r.state));
  return qed(*r.state);
}

}  // namespace seqcraft
