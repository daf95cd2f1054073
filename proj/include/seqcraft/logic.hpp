#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seqcraft/syntax.hpp"
#include "seqcraft/term.hpp"

namespace seqcraft {

/// premises ==> ... ==> conclusion, over schematic variables only.
struct Rule {
  std::string name;
  std::vector<Judgment> premises;
  Judgment conclusion;
  std::vector<Term> schematic_vars;  // order of first occurrence, premises first
  std::string section;

  friend bool operator==(const Rule& a, const Rule& b) {
    return a.name == b.name && a.premises == b.premises && a.conclusion == b.conclusion &&
           a.section == b.section;
  }
};

/// Collects the schematic variables of the rule's judgments.
std::vector<Term> rule_variables(const std::vector<Judgment>& premises, const Judgment& conclusion);

class LogicSpec {
 public:
  LogicSpec(std::string name, Signature sig, std::vector<Rule> rules,
            std::vector<std::string> search_order = {});

  const std::string& name() const { return name_; }
  const Signature& signature() const { return syntax_->signature(); }
  const Syntax& syntax() const { return *syntax_; }
  const std::shared_ptr<const Syntax>& shared_syntax() const { return syntax_; }
  const std::vector<Rule>& rules() const { return rules_; }
  /// Rules tried by automated search, in order. Empty means all but Cut.
  const std::vector<std::string>& search_order() const { return search_; }

  const Rule* find_rule(std::string_view name) const;
  /// Throws UnknownSymbol.
  const Rule& rule(std::string_view name) const;

  std::string print(const Judgment& j) const { return syntax_->print(j); }
  std::string print(const Term& t) const { return syntax_->print(t); }

  friend bool operator==(const LogicSpec& a, const LogicSpec& b);

 private:
  std::string name_;
  std::shared_ptr<const Syntax> syntax_;
  std::vector<Rule> rules_;
  std::vector<std::string> search_;
};

/// Parses the logic definition language. Errors carry line and column.
LogicSpec parse_logic(std::string_view text);
std::string print_logic(const LogicSpec& spec);

/// Renames every schematic variable to `base<n>` with n drawn from `counter`
/// upwards. `renaming`, if given, receives old ↦ new.
std::pair<Rule, std::uint64_t> freshen_rule(const Rule& r, std::uint64_t counter,
                                            Substitution* renaming = nullptr);

/// Applies `name := term` bindings to the rule's schematic variables.
Rule instantiate_rule(const Rule& r, const std::vector<std::pair<std::string, Term>>& bindings);

/// Text of a rule in the definition language, without the `rule` keyword.
std::string print_rule(const LogicSpec& spec, const Rule& r);

}  // namespace seqcraft
