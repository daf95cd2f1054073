#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seqcraft/term.hpp"

namespace seqcraft {

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Variables visible while parsing. Unknown identifiers become new
/// variables of `fresh_kind` when their sort can be inferred.
struct VarScope {
  VarKind fresh_kind = VarKind::Free;
  bool allow_fresh = true;
  std::map<std::string, Term> known;

  void add(const Term& var) { known.insert_or_assign(var.name(), var); }
};

/// Compiled concrete syntax of a signature: the parser and printer for its
/// terms and judgments.
class Syntax {
 public:
  explicit Syntax(const Signature& sig);
  ~Syntax();
  Syntax(const Syntax&) = delete;
  Syntax& operator=(const Syntax&) = delete;

  Term parse_term(std::string_view text, std::optional<Sort> expected = std::nullopt,
                  VarScope* scope = nullptr) const;
  Judgment parse_judgment(std::string_view text, VarScope* scope = nullptr) const;

  std::string print(const Term& t) const;
  std::string print(const Judgment& j) const;

  const Signature& signature() const { return sig_; }

  struct Impl;

 private:
  Signature sig_;
  std::unique_ptr<Impl> impl_;
};

// Convenience wrappers that compile the syntax on each call.
Term parse_term(const Signature& sig, std::string_view text,
                std::optional<Sort> expected = std::nullopt, VarScope* scope = nullptr);
Judgment parse_judgment(const Signature& sig, std::string_view text, VarScope* scope = nullptr);
std::string print_term(const Signature& sig, const Term& t);
std::string print_judgment(const Signature& sig, const Judgment& j);

}  // namespace seqcraft
