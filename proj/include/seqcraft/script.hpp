#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seqcraft/kernel.hpp"
#include "seqcraft/logic.hpp"

namespace seqcraft {

/// One `theorem ... qed` block of a proof script.
struct ScriptTheorem {
  std::string name;
  std::string statement;
  std::size_t line = 0;
  std::vector<std::string> assumptions;
  std::vector<std::string> witnesses;
  struct Line {
    std::string text;
    std::size_t line = 0;
  };
  std::vector<Line> tactics;
  bool closed = false;  // saw qed
};

/// Splits a script into theorem blocks. Throws ParseError.
std::vector<ScriptTheorem> parse_script(std::string_view text);

struct ScriptOutcome {
  int exit_code = 0;  // 0 proved and replayed, 1 tactic failure, 2 parse error
  std::vector<Theorem> theorems;
  /// Rendered goal list after the initial state and after each step, per theorem.
  std::vector<std::vector<std::string>> transcripts;
};

/// Runs every block, printing each intermediate state to `out` and
/// diagnostics to `err`.
ScriptOutcome run_script(const LogicSpec& logic, std::string_view script, std::ostream& out,
                         std::ostream& err);

/// Line-oriented interactive loop; see the README for the command set.
void run_repl(const LogicSpec& logic, std::istream& in, std::ostream& out, bool prompt = false);

}  // namespace seqcraft
