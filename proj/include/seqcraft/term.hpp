#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace seqcraft {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ill-sorted term, binding or declaration.
class SortError : public Error {
 public:
  using Error::Error;
};

/// Reference to an operator, judgment, sort or rule that is not declared.
class UnknownSymbol : public Error {
 public:
  UnknownSymbol(std::string what, std::string name)
      : Error("unknown " + what + " '" + name + "'"), kind_(std::move(what)), name_(std::move(name)) {}
  const std::string& kind() const { return kind_; }
  const std::string& name() const { return name_; }

 private:
  std::string kind_;
  std::string name_;
};

// ---------------------------------------------------------------------------
// Sorts

/// A declared base sort, or the multiset sort derived from one. Multisets are
/// one level deep: there is no multiset of a multiset sort.
struct Sort {
  std::string name;
  bool multiset = false;

  static Sort base(std::string n) { return Sort{std::move(n), false}; }
  static Sort multiset_of(std::string n) { return Sort{std::move(n), true}; }

  Sort element() const { return Sort{name, false}; }
  std::string str() const { return multiset ? "multiset " + name : name; }

  friend bool operator==(const Sort&, const Sort&) = default;
  friend auto operator<=>(const Sort&, const Sort&) = default;
};

// ---------------------------------------------------------------------------
// Terms

enum class VarKind { Free, Schematic, Meta };

std::string_view to_string(VarKind kind);

/// Immutable first-order term. Nodes are shared; copying a Term is cheap.
///
/// Every node carries a stable serialization (`key()`) which doubles as the
/// canonical total order used for multiset elements, and as the equality test.
class Term {
 public:
  static Term var(std::string name, VarKind kind, Sort sort);
  static Term op(std::string name, std::vector<Term> args, Sort sort);

  bool is_var() const;
  bool is_op() const { return !is_var(); }
  const std::string& name() const;
  VarKind var_kind() const;
  const Sort& sort() const;
  std::span<const Term> args() const;
  const Term& arg(std::size_t i) const { return args()[i]; }
  std::size_t arity() const { return args().size(); }
  std::size_t size() const;
  const std::string& key() const;

  bool is_var(VarKind kind) const { return is_var() && var_kind() == kind; }
  bool identical(const Term& other) const { return node_ == other.node_; }

  friend bool operator==(const Term& a, const Term& b) {
    return a.node_ == b.node_ || a.key() == b.key();
  }
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    return a.key() <=> b.key();
  }

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Built-in multiset constructors; one family per base sort.
inline constexpr std::string_view kEmptyOp = "%empty";
inline constexpr std::string_view kSingleOp = "%single";
inline constexpr std::string_view kUnionOp = "%union";

Term mempty(const std::string& base);
Term msingle(const Term& element);
Term munion(const Term& lhs, const Term& rhs);

bool is_mempty(const Term& t);
bool is_msingle(const Term& t);
bool is_munion(const Term& t);
bool is_builtin_op(std::string_view name);

/// Distinct variables of `t` in order of first occurrence.
std::vector<Term> variables(const Term& t);
void collect_variables(const Term& t, std::vector<Term>& out);
bool occurs(const Term& var, const Term& t);
bool contains_kind(const Term& t, VarKind kind);

// ---------------------------------------------------------------------------
// Judgments

/// An instance of a declared judgment symbol (e.g. the turnstile) applied to
/// multiset-sorted and term-sorted arguments.
struct Judgment {
  std::string symbol;
  std::vector<Term> args;

  std::string key() const;
  friend bool operator==(const Judgment& a, const Judgment& b) {
    return a.symbol == b.symbol && a.args == b.args;
  }
};

std::vector<Term> variables(const Judgment& j);
void collect_variables(const Judgment& j, std::vector<Term>& out);
bool contains_kind(const Judgment& j, VarKind kind);

// ---------------------------------------------------------------------------
// Signatures

enum class Assoc { Left, Right };

/// How an operator is written. Prefix operators print as `name(a, b)`,
/// infix ones as `a sym b`, templates substitute `$1..$n` in `text`.
struct Notation {
  enum class Kind { Prefix, Infix, Template };
  Kind kind = Kind::Prefix;
  std::string text;  // infix symbol or template text
  int prec = 100;
  Assoc assoc = Assoc::Left;

  friend bool operator==(const Notation&, const Notation&) = default;
};

struct OpDecl {
  std::string name;
  std::vector<Sort> args;
  Sort result;
  Notation notation;

  /// Template text equivalent to the notation, e.g. "$1 × $2".
  std::string display_template() const;
  friend bool operator==(const OpDecl&, const OpDecl&) = default;
};

struct JudgmentDecl {
  std::string name;
  std::vector<Sort> args;
  std::optional<std::string> display;  // template; default `name($1, ..)`

  std::string display_template() const;
  friend bool operator==(const JudgmentDecl&, const JudgmentDecl&) = default;
};

class Signature {
 public:
  Signature();

  void add_sort(const std::string& name);
  void add_op(OpDecl decl);
  void add_judgment(JudgmentDecl decl);
  /// ASCII spelling accepted by the parser in place of `symbol`.
  void add_alias(const std::string& ascii, const std::string& symbol);

  bool has_sort(const Sort& s) const;
  const OpDecl* find_op(std::string_view name) const;
  const JudgmentDecl* find_judgment(std::string_view name) const;

  const std::vector<std::string>& sorts() const { return sorts_; }
  const std::vector<OpDecl>& ops() const { return ops_; }
  const std::vector<JudgmentDecl>& judgments() const { return judgments_; }
  const std::vector<std::pair<std::string, std::string>>& aliases() const { return aliases_; }

  /// Builds a well-sorted operator application; throws on unknown operator
  /// or sort mismatch.
  Term make(std::string_view op, std::vector<Term> args) const;
  Judgment make_judgment(std::string_view symbol, std::vector<Term> args) const;

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  std::vector<std::string> sorts_;
  std::vector<OpDecl> ops_;
  std::vector<JudgmentDecl> judgments_;
  std::vector<std::pair<std::string, std::string>> aliases_;
};

/// True iff `t` is well-sorted under `sig`. Unknown operators raise
/// UnknownSymbol rather than returning false.
bool check_sorted(const Signature& sig, const Term& t);
bool check_sorted(const Signature& sig, const Judgment& j);

// ---------------------------------------------------------------------------
// Substitutions

/// Finite, sort-preserving map from variables to terms. Variables are
/// identified by (kind, name).
class Substitution {
 public:
  using Key = std::pair<VarKind, std::string>;

  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }

  const Term* find(const Term& var) const;
  bool binds(const Term& var) const { return find(var) != nullptr; }

  /// Inserts a binding as given. Throws SortError on a sort mismatch or when
  /// the variable is already bound to a different term.
  void bind(const Term& var, Term value);

  /// Adds `var ↦ value` keeping the substitution idempotent: `value` is
  /// normalized by the current bindings and the new binding is propagated
  /// into existing ranges. `var` must not be bound yet.
  Substitution extended(const Term& var, const Term& value) const;

  Term apply(const Term& t) const;
  Judgment apply(const Judgment& j) const;

  Substitution restricted(const std::function<bool(const Term&)>& keep) const;

  /// (variable, value) pairs ordered by variable key.
  std::vector<std::pair<Term, Term>> bindings() const;

  friend bool operator==(const Substitution& a, const Substitution& b);

 private:
  std::map<Key, std::pair<Term, Term>> map_;
};

/// `apply(compose(first, second), t) == second.apply(first.apply(t))`.
Substitution compose(const Substitution& first, const Substitution& second);

// ---------------------------------------------------------------------------
// Fresh names

/// Returns the variable `base<counter>` and the advanced counter.
std::pair<Term, std::uint64_t> fresh_var(std::uint64_t counter, std::string_view base, VarKind kind,
                                         Sort sort);

/// Name with any trailing decimal digits removed ("x12" -> "x").
std::string_view name_base(std::string_view name);
/// Trailing decimal number of a name, if any.
std::optional<std::uint64_t> numeric_suffix(std::string_view name);

}  // namespace seqcraft
