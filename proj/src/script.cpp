#include "seqcraft/script.hpp"

#include <cctype>
#include <istream>
#include <ostream>

#include "seqcraft/tactics.hpp"

namespace seqcraft {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

bool starts_with_word(const std::string& line, std::string_view word) {
  if (line.compare(0, word.size(), word) != 0) return false;
  return line.size() == word.size() || std::isspace(static_cast<unsigned char>(line[word.size()]));
}

std::vector<std::string> name_list(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : std::string(s) + " ") {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

ParseError relocate(const ParseError& e, std::size_t line, std::size_t col_offset) {
  std::string msg = e.what();
  std::size_t cut = msg.find(": ");
  if (cut != std::string::npos) msg = msg.substr(cut + 2);
  return ParseError(msg, line, col_offset + e.column());
}

}  // namespace

std::vector<ScriptTheorem> parse_script(std::string_view text) {
  std::vector<ScriptTheorem> out;
  ScriptTheorem* cur = nullptr;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string raw(text.substr(start, end - start));
    start = end + 1;
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (starts_with_word(line, "theorem")) {
      if (cur && !cur->closed)
        throw ParseError("theorem '" + cur->name + "' is missing qed", lineno, 1);
      std::string rest = trim(std::string_view(line).substr(7));
      std::size_t colon = rest.find(':');
      if (colon == std::string::npos) throw ParseError("expected 'theorem <name> : <judgment>'", lineno, 1);
      ScriptTheorem t;
      t.name = trim(std::string_view(rest).substr(0, colon));
      t.statement = trim(std::string_view(rest).substr(colon + 1));
      t.line = lineno;
      if (t.name.empty() || t.statement.empty())
        throw ParseError("expected 'theorem <name> : <judgment>'", lineno, 1);
      out.push_back(std::move(t));
      cur = &out.back();
      continue;
    }
    if (!cur || cur->closed) throw ParseError("'" + line + "' outside a theorem block", lineno, 1);
    if (line == "qed") {
      cur->closed = true;
    } else if (starts_with_word(line, "assume")) {
      if (!cur->tactics.empty()) throw ParseError("assume after the first tactic", lineno, 1);
      cur->assumptions.push_back(trim(std::string_view(line).substr(6)));
    } else if (starts_with_word(line, "exists")) {
      if (!cur->tactics.empty()) throw ParseError("exists after the first tactic", lineno, 1);
      for (auto& n : name_list(std::string_view(line).substr(6))) cur->witnesses.push_back(n);
    } else {
      cur->tactics.push_back({line, lineno});
    }
  }
  if (cur && !cur->closed) throw ParseError("theorem '" + cur->name + "' is missing qed", lineno, 1);
  return out;
}

ScriptOutcome run_script(const LogicSpec& logic, std::string_view script, std::ostream& out,
                         std::ostream& err) {
  ScriptOutcome res;
  struct Prepared {
    std::vector<Judgment> hyps;
    Judgment target;
    std::vector<Etactic> tactics;
  };
  std::vector<ScriptTheorem> blocks;
  std::vector<Prepared> prepared;
  try {
    blocks = parse_script(script);
    for (const auto& b : blocks) {
      Prepared p;
      VarScope scope;
      std::size_t line = b.line;
      try {
        for (const auto& a : b.assumptions) p.hyps.push_back(logic.syntax().parse_judgment(a, &scope));
        p.target = logic.syntax().parse_judgment(b.statement, &scope);
        for (const auto& t : b.tactics) {
          line = t.line;
          p.tactics.push_back(parse_tactic(t.text));
        }
      } catch (const ParseError& e) {
        throw relocate(e, line, 0);
      } catch (const Error& e) {
        throw ParseError(e.what(), line, 1);
      }
      prepared.push_back(std::move(p));
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    res.exit_code = 2;
    return res;
  }

  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const ScriptTheorem& b = blocks[k];
    const Prepared& p = prepared[k];
    std::vector<std::string> transcript;
    out << "theorem " << b.name << " : " << logic.print(p.target) << "\n";
    std::size_t step = 0;
    try {
      GoalState st = set_goal(logic, p.hyps, p.target, b.witnesses);
      if (!b.witnesses.empty()) st = introduce_metas(st, 0, b.witnesses);
      transcript.push_back(render_state(logic, st));
      out << "Initial state\n" << transcript.back();
      for (; step < p.tactics.size(); ++step) {
        const std::string& text = b.tactics[step].text;
        if (st.done()) {
          err << "error: " << b.name << " step " << step + 1 << " (" << text
              << "): no subgoals left\n";
          res.exit_code = 1;
          return res;
        }
        TacticResult r = p.tactics[step](logic, st, 0);
        if (!r.ok()) {
          err << "error: " << b.name << " step " << step + 1 << " (" << text << "): " << r.message
              << "\n";
          res.exit_code = 1;
          return res;
        }
        st = std::move(*r.state);
        transcript.push_back(render_state(logic, st));
        out << "Step " << step + 1 << ": " << text << "\n" << transcript.back();
      }
      if (!st.done()) {
        err << "error: " << b.name << ": qed with open subgoals\n" << render_goals(logic, st);
        res.exit_code = 1;
        return res;
      }
      Theorem thm = qed(st);
      ReplayResult rr = replay(logic, thm);
      if (!rr) {
        err << "error: " << b.name << ": replay failed: " << rr.diagnostic << "\n";
        res.exit_code = 1;
        return res;
      }
      out << "qed " << b.name << " : " << logic.print(thm.statement()) << " (replayed)\n";
      for (const auto& [n, t] : thm.witness_values()) out << n << " := " << logic.print(t) << "\n";
      res.theorems.push_back(std::move(thm));
      res.transcripts.push_back(std::move(transcript));
    } catch (const Error& e) {
      err << "error: " << b.name << " step " << step + 1;
      if (step < b.tactics.size()) err << " (" << b.tactics[step].text << ")";
      err << ": " << e.what() << "\n";
      res.exit_code = 1;
      return res;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------

void run_repl(const LogicSpec& logic, std::istream& in, std::ostream& out, bool prompt) {
  std::vector<GoalState> history;
  std::vector<Judgment> assumptions;
  VarScope scope;
  std::string line;
  auto show = [&] { out << render_state(logic, history.back()); };
  while (true) {
    if (prompt) out << "> " << std::flush;
    if (!std::getline(in, line)) break;
    std::string cmd = trim(line);
    if (cmd.empty() || cmd[0] == '#') continue;
    std::string word = cmd.substr(0, cmd.find(' '));
    std::string arg = trim(std::string_view(cmd).substr(word.size()));
    try {
      if (word == "quit" || word == "exit") {
        break;
      } else if (word == "assume") {
        assumptions.push_back(logic.syntax().parse_judgment(arg, &scope));
        out << "assumption " << assumptions.size() - 1 << ": " << logic.print(assumptions.back())
            << "\n";
      } else if (word == "g") {
        Judgment target = logic.syntax().parse_judgment(arg, &scope);
        history = {set_goal(logic, assumptions, target)};
        assumptions.clear();
        scope = VarScope{};
        show();
      } else if (word == "exists") {
        if (history.size() != 1) throw Error("exists must directly follow g");
        const GoalState& s0 = history.front();
        std::vector<std::string> names = name_list(arg);
        GoalState fresh = set_goal(logic, s0.original().hyps, s0.original().target, names);
        history = {fresh, introduce_metas(fresh, 0, names)};
        show();
      } else if (word == "e") {
        if (history.empty()) throw Error("no goal; use g <judgment>");
        std::size_t sub = 0;
        if (arg.size() > 1 && arg[0] == '#') {
          std::size_t sp = arg.find(' ');
          sub = std::stoul(arg.substr(1, sp - 1)) - 1;
          arg = trim(std::string_view(arg).substr(sp == std::string::npos ? arg.size() : sp));
        }
        TacticResult r = parse_tactic(arg)(logic, history.back(), sub);
        if (!r.ok()) {
          out << "error: " << r.message << "\n";
          continue;
        }
        history.push_back(std::move(*r.state));
        show();
      } else if (word == "b") {
        history = undo(std::move(history));
        show();
      } else if (word == "p") {
        if (history.empty()) throw Error("no goal");
        show();
        const Substitution& inst = history.back().inst();
        for (const auto& [v, t] : inst.bindings())
          out << "inst " << v.name() << " := " << logic.print(t) << "\n";
      } else if (word == "top_thm") {
        if (history.empty()) throw Error("no goal");
        if (!history.back().done()) {
          out << "error: " << history.back().subgoals().size() << " open subgoal(s)\n"
              << render_goals(logic, history.back());
          continue;
        }
        Theorem thm = qed(history.back());
        ReplayResult rr = replay(logic, thm);
        out << "theorem " << logic.print(thm.statement()) << (rr ? " (replayed)" : " (replay FAILED: " + rr.diagnostic + ")") << "\n";
        for (const auto& [n, t] : thm.witness_values()) out << n << " := " << logic.print(t) << "\n";
      } else if (word == "rules") {
        for (const auto& r : logic.rules()) out << print_rule(logic, r) << "\n";
      } else {
        out << "error: unknown command '" << word << "' (g, assume, exists, e, b, p, top_thm, rules, quit)\n";
      }
    } catch (const std::exception& e) {
      out << "error: " << e.what() << "\n";
    }
  }
}

}  // namespace seqcraft
