#include "support.hpp"
#include "doctest.h"

using namespace seqcraft;
using namespace seqcraft::testing;

namespace {

const LogicSpec& sp() { return simple_prop(); }

GoalState goal(std::string_view target, std::vector<std::string_view> hyps = {}) {
  std::vector<Judgment> hs;
  VarScope scope;
  for (auto h : hyps) hs.push_back(sp().syntax().parse_judgment(h, &scope));
  return set_goal(sp(), hs, sp().syntax().parse_judgment(target, &scope));
}

std::vector<std::string> targets(const GoalState& st) {
  std::vector<std::string> out;
  for (const auto& g : st.subgoals()) out.push_back(sp().print(g.target));
  return out;
}

std::vector<std::string> hyps_of(const GoalState& st, std::size_t i) {
  std::vector<std::string> out;
  for (const auto& h : st.subgoals()[i].hyps) out.push_back(sp().print(h));
  return out;
}

GoalState run(const Etactic& t, const GoalState& st, std::size_t i = 0) {
  TacticResult r = t(sp(), st, i);
  if (!r.ok()) FAIL_CHECK(r.message);
  REQUIRE(r.ok());
  return *r.state;
}

using V = std::vector<std::string>;

}  // namespace

TEST_SUITE("tactics") {
  TEST_CASE("ruleseq steps of the commutativity proof") {
    GoalState s1 = run(ruleseq("R→"), goal("∅ ⊢ X × Y → Y × X"));
    CHECK(targets(s1) == V{"{X × Y} ⊢ Y × X"});
    GoalState s2 = run(ruleseq("C"), s1);
    CHECK(targets(s2) == V{"{X × Y} ⊎ {X × Y} ⊢ Y × X"});
    GoalState s3 = run(ruleseq("R×"), s2);
    CHECK(targets(s3) == V{"{X × Y} ⊢ Y", "{X × Y} ⊢ X"});
    CHECK(run(ruleseq("Ax"), goal("{X} ⊢ X")).done());
  }

  TEST_CASE("ruleseq failure names the rule and the goal") {
    TacticResult r = ruleseq("R×")(sp(), goal("∅ ⊢ X → Y"), 0);
    CHECK_FALSE(r.ok());
    CHECK(r.message.find("R×") != std::string::npos);
    CHECK(r.message.find("X → Y") != std::string::npos);
    CHECK_THROWS_AS(ruleseq("Nope")(sp(), goal("∅ ⊢ X"), 0), UnknownSymbol);
    CHECK_THROWS_AS(ruleseq("Ax")(sp(), goal("∅ ⊢ X"), 4), Error);
  }

  TEST_CASE("ruleseq never binds goal variables") {
    TermGen gen(sp().signature(), 77);
    for (int i = 0; i < 200; ++i) {
      Judgment j = gen.judgment(3);
      GoalState st = set_goal(sp(), {}, j);
      for (const auto& r : sp().rules()) {
        TacticResult res = ruleseq(r.name)(sp(), st, 0);
        if (!res.ok()) continue;
        CHECK(res.state->inst().empty());
        CHECK(res.state->original() == st.original());
      }
    }
  }

  TEST_CASE("rule_seqtac chooses the context split") {
    GoalState s2 = run(ruleseq("C"), run(ruleseq("R→"), goal("∅ ⊢ X × Y → Y × X")));
    GoalState wanted = run(rule_seqtac({{"Γ", "{X × Y}"}}, "R×"), s2);
    CHECK(targets(wanted) == V{"{X × Y} ⊢ Y", "{X × Y} ⊢ X"});
    GoalState lopsided = run(rule_seqtac({{"Γ", "∅"}}, "R×"), s2);
    CHECK(targets(lopsided) == V{"∅ ⊢ Y", "{X × Y} ⊎ {X × Y} ⊢ X"});
    CHECK(run(rule_seqtac({}, "R×"), s2) == run(ruleseq("R×"), s2));
  }

  TEST_CASE("rule_seqtac rejects bad bindings before matching") {
    GoalState st = goal("{X} ⊎ {Y} ⊢ X × Y");
    CHECK_THROWS_AS(rule_seqtac({{"Γ", "X"}}, "R×")(sp(), st, 0), Error);
    CHECK_THROWS_AS(rule_seqtac({{"Q", "X"}}, "R×")(sp(), st, 0), UnknownSymbol);
  }

  TEST_CASE("erule with Cut consumes the hypothesis") {
    GoalState st = goal("∅ ⊢ C", {"∅ ⊢ X"});
    GoalState next = run(erule_seq("Cut"), st);
    CHECK(targets(next) == V{"{X} ⊢ C"});
    CHECK(hyps_of(next, 0).empty());

    GoalState provable = goal("∅ ⊢ X", {"∅ ⊢ X"});
    GoalState done = run(ETHEN(erule_seq("Cut"), ruleseq("Ax")), provable);
    REQUIRE(done.done());
    CHECK(replay(sp(), qed(done)).ok);
  }

  TEST_CASE("erule with a one-premise rule closes the goal") {
    GoalState st = goal("{X} ⊢ Y", {"∅ ⊢ Y"});
    GoalState next = run(erule_seq("W"), st);
    CHECK(next.done());
    CHECK(replay(sp(), qed(next)).ok);
  }

  TEST_CASE("erule without hypotheses fails") {
    TacticResult r = erule_seq("Cut")(sp(), goal("∅ ⊢ X"), 0);
    CHECK_FALSE(r.ok());
    CHECK_THROWS_AS(erule_seq("Ax")(sp(), goal("∅ ⊢ X", {"∅ ⊢ X"}), 0), Error);
  }

  TEST_CASE("frule adds the conclusion and keeps the hypothesis") {
    GoalState st = goal("∅ ⊢ Y", {"∅ ⊢ X"});
    GoalState next = run(frule_seq(0, "W"), st);
    REQUIRE(next.subgoals().size() == 1);
    V hs = hyps_of(next, 0);
    REQUIRE(hs.size() == 2);
    CHECK(hs[0] == "∅ ⊢ X");
    // The new hypothesis holds a fresh metavariable for the added formula.
    const Judgment& added = next.subgoals()[0].hyps[1];
    MultisetView ctx = normalize(added.args[0]);
    REQUIRE(ctx.singles.size() == 1);
    REQUIRE(ctx.singles[0].is_var(VarKind::Meta));
    CHECK(name_base(ctx.singles[0].name()) == "A");
    CHECK(next.metas().contains(ctx.singles[0].name()));
    CHECK(hs[1] == "{" + ctx.singles[0].name() + "} ⊢ X");
  }

  TEST_CASE("drule removes the hypothesis") {
    GoalState st = goal("∅ ⊢ Y", {"∅ ⊢ X"});
    GoalState next = run(drule_seq(0, "W"), st);
    REQUIRE(next.subgoals().size() == 1);
    REQUIRE(hyps_of(next, 0).size() == 1);
    CHECK(hyps_of(next, 0)[0].find("⊢ X") != std::string::npos);
    CHECK_THROWS_AS(drule_seq(3, "W")(sp(), st, 0), Error);
  }

  TEST_CASE("drule premises beyond the first become extra subgoals") {
    GoalState st = goal("∅ ⊢ Z", {"∅ ⊢ X"});
    GoalState next = run(drule_seqtac({{"A", "X"}}, 0, "Cut"), st);
    REQUIRE(next.subgoals().size() == 2);
    CHECK(targets(next)[0] == "∅ ⊢ Z");
    // the side premise of Cut, still open in its other context and conclusion
    CHECK(targets(next)[1].find("{X} ⊎ ") == 0);
  }

  TEST_CASE("assumption closes a goal from a hypothesis") {
    GoalState done = run(assumption(), goal("{X} ⊢ Y", {"{X} ⊢ Y"}));
    CHECK(done.done());
    CHECK(replay(sp(), qed(done)).ok);
    CHECK_FALSE(assumption()(sp(), goal("∅ ⊢ Y", {"∅ ⊢ X"}), 0).ok());
  }

  TEST_CASE("the packaged commutativity proof") {
    Theorem thm = prove_seq(sp(), {}, J(sp(), "∅ ⊢ X × Y → Y × X"), parse_tactic(times_comm_packaged()));
    CHECK(thm.trace().size() == 7);
    CHECK(replay(sp(), thm).ok);
    Etactic built = ETHENL(ETHEN(ruleseq("R→"), ETHEN(ruleseq("C"), ruleseq("R×"))),
                           {ETHEN(ruleseq("L2×"), ruleseq("Ax")), ETHEN(ruleseq("L1×"), ruleseq("Ax"))});
    Theorem again = prove_seq(sp(), {}, J(sp(), "∅ ⊢ X × Y → Y × X"), built);
    CHECK(serialize(sp(), again) == serialize(sp(), thm));
  }

  TEST_CASE("ETHENL arity mismatch is a recoverable failure") {
    TacticResult r = ETHENL(ruleseq("R×"), {ALL()})(sp(), goal("{X} ⊎ {Y} ⊢ X × Y"), 0);
    CHECK_FALSE(r.ok());
  }

  TEST_CASE("EREPEAT, EORELSE, EEVERY") {
    GoalState st = goal("∅ ⊢ X × Y → Y × X");
    CHECK(run(EREPEAT((FAIL)()), st) == st);
    CHECK(run(EORELSE((FAIL)(), ruleseq("R→")), st) == run(ruleseq("R→"), st));
    CHECK(run(EORELSE(ruleseq("R→"), (FAIL)()), st) == run(ruleseq("R→"), st));
    CHECK(run(EEVERY({ruleseq("R→"), ruleseq("C")}), st) ==
          run(ruleseq("C"), run(ruleseq("R→"), st)));
    // Repeating R→ stops once the target is no longer an implication.
    GoalState curried = goal("∅ ⊢ X → Y → X");
    CHECK(targets(run(EREPEAT(ruleseq("R→")), curried)) == V{"{X} ⊎ {Y} ⊢ X"});
  }

  TEST_CASE("EORELSE lets hard errors through") {
    GoalState st = goal("{X} ⊎ {Y} ⊢ X × Y");
    CHECK_THROWS_AS(EORELSE(rule_seqtac({{"Γ", "X"}}, "R×"), ALL())(sp(), st, 0), Error);
  }

  TEST_CASE("ETHEN applies the second tactic to every new subgoal") {
    GoalState st = goal("{X} ⊎ {Y} ⊢ X × Y");
    GoalState done = run(ETHEN(ruleseq("R×"), ruleseq("Ax")), st);
    CHECK(done.done());
  }

  TEST_CASE("tactic parser") {
    GoalState st = goal("∅ ⊢ X × Y → Y × X");
    CHECK(run(parse_tactic("ruleseq (R→)"), st) == run(ruleseq("R→"), st));
    CHECK(run(parse_tactic("EREPEAT (ruleseq R→)"), st) == run(ruleseq("R→"), st));
    CHECK_THROWS_AS(parse_tactic("frobnicate X"), ParseError);
    CHECK_THROWS_AS(parse_tactic("ETHEN (ruleseq R→"), ParseError);
    Bindings b = parse_bindings("Γ := {X, Y}, A := X × Y");
    REQUIRE(b.size() == 2);
    CHECK(b[0] == std::pair<std::string, std::string>{"Γ", "{X, Y}"});
    CHECK(b[1].second == "X × Y");
  }

  TEST_CASE("produced_between") {
    GoalState a = goal("{X} ⊎ {Y} ⊢ X × Y");
    GoalState b = run(ruleseq("R×"), a);
    CHECK(produced_between(a, b) == 2);
    CHECK(produced_between(b, run(ruleseq("Ax"), b)) == 0);
  }

  TEST_CASE("meta_exists") {
    const LogicSpec& ch = curry_howard();
    GoalState st = set_goal(ch, {}, J(ch, "∅ ⊢ f : X × Y → Y × X"), {"f"});
    TacticResult r = meta_exists({"f"})(ch, st, 0);
    REQUIRE(r.ok());
    CHECK(r.state->metas() == MetaSet{"f"});
    CHECK(ch.print(r.state->subgoals()[0].target) == "∅ ⊢ f : X × Y → Y × X");
    CHECK(*meta_exists({})(ch, st, 0).state == st);
    CHECK_THROWS_AS(meta_exists({"g"})(ch, st, 0), Error);
  }

  TEST_CASE("constr_prove extracts the swap function") {
    const LogicSpec& ch = curry_howard();
    Theorem thm = constr_prove(ch, {}, J(ch, "∅ ⊢ f : X × Y → Y × X"), {"f"}, parse_tactic(times_comm_packaged()));
    REQUIRE(thm.witness_values().size() == 1);
    CHECK(ch.print(thm.witness_values()[0].second) == "λx.(snd(Var x), fst(Var x))");
    CHECK(ch.print(thm.statement()) == "∅ ⊢ λx.(snd(Var x), fst(Var x)) : X × Y → Y × X");
    CHECK(replay(ch, thm).ok);
  }

  TEST_CASE("constr_prove with the forced identity witness") {
    const LogicSpec& ch = curry_howard();
    Theorem thm = constr_prove(ch, {}, J(ch, "{Var v : X} ⊢ g : X"), {"g"}, ruleseq("Ax"));
    CHECK(ch.print(thm.witness_values()[0].second) == "Var v");
  }

  TEST_CASE("intermediate instantiations of the construction") {
    const LogicSpec& ch = curry_howard();
    GoalState st = introduce_metas(set_goal(ch, {}, J(ch, "∅ ⊢ f : X × Y → Y × X"), {"f"}), 0, {"f"});
    std::vector<GoalState> run = run_steps(ch, st, times_comm_steps());
    REQUIRE(run.size() == 8);
    Term f = Term::var("f", VarKind::Meta, Sort::base("Lam"));
    // λx.y after the arrow rule, λx.(x', y') after the pairing rule
    Term after1 = *run[1].inst().find(f);
    REQUIRE(after1.name() == "lam");
    CHECK(after1.arg(0).is_var(VarKind::Meta));
    CHECK(after1.arg(1).is_var(VarKind::Meta));
    Term after3 = *run[3].inst().find(f);
    REQUIRE(after3.name() == "lam");
    CHECK(after3.arg(0) == after1.arg(0));
    REQUIRE(after3.arg(1).name() == "pair");
    CHECK(after3.arg(1).arg(0).is_var(VarKind::Meta));
    CHECK(after3.arg(1).arg(1).is_var(VarKind::Meta));
    CHECK(name_base(after3.arg(1).arg(0).name()) == "x");
    CHECK(name_base(after3.arg(1).arg(1).name()) == "y");
  }

  TEST_CASE("prove_seq errors") {
    CHECK_THROWS_AS(prove_seq(sp(), {}, J(sp(), "∅ ⊢ X → X"), ALL()), TacticError);
    CHECK_THROWS_AS(prove_seq(sp(), {}, J(sp(), "∅ ⊢ X → X"), ruleseq("R×")), TacticError);
  }

  TEST_CASE("the same script proves all three readings") {
    const LogicSpec& ch = curry_howard();
    std::vector<Theorem> thms;
    Etactic script = parse_tactic(times_comm_packaged());
    thms.push_back(prove_seq(sp(), {}, J(sp(), "∅ ⊢ X × Y → Y × X"), script));
    thms.push_back(prove_seq(ch, {}, J(ch, "∅ ⊢ λx.(snd(Var x), fst(Var x)) : X × Y → Y × X"), script));
    thms.push_back(constr_prove(ch, {}, J(ch, "∅ ⊢ f : X × Y → Y × X"), {"f"}, script));
    std::vector<std::string> rules0;
    for (const auto& s : thms[0].trace()) rules0.push_back(s.rule);
    for (const auto& t : thms) {
      std::vector<std::string> rules;
      for (const auto& s : t.trace())
        if (s.tag != StepTag::MetaExists) rules.push_back(s.rule);
      CHECK(rules == rules0);
    }
  }
}
