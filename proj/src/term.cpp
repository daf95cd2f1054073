#include "seqcraft/term.hpp"

#include <algorithm>
#include <cctype>

namespace seqcraft {

std::string_view to_string(VarKind kind) {
  switch (kind) {
    case VarKind::Free: return "free";
    case VarKind::Schematic: return "schematic";
    case VarKind::Meta: return "meta";
  }
  return "?";
}

struct Term::Node {
  bool is_var = false;
  std::string name;
  VarKind var_kind = VarKind::Free;
  Sort sort;
  std::vector<Term> args;
  std::string key;
  std::size_t size = 1;
};

namespace {

char kind_marker(VarKind kind) {
  switch (kind) {
    case VarKind::Free: return '!';
    case VarKind::Schematic: return '?';
    case VarKind::Meta: return '^';
  }
  return '!';
}

}  // namespace

Term Term::var(std::string name, VarKind kind, Sort sort) {
  auto node = std::make_shared<Node>();
  node->is_var = true;
  node->var_kind = kind;
  node->key.reserve(name.size() + sort.name.size() + 3);
  node->key += kind_marker(kind);
  node->key += name;
  node->key += ':';
  if (sort.multiset) node->key += '*';
  node->key += sort.name;
  node->name = std::move(name);
  node->sort = std::move(sort);
  return Term(std::move(node));
}

Term Term::op(std::string name, std::vector<Term> args, Sort sort) {
  auto node = std::make_shared<Node>();
  node->key = name;
  if (is_builtin_op(name)) {
    node->key += '[';
    node->key += sort.name;
    node->key += ']';
  }
  if (!args.empty()) {
    node->key += '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) node->key += ',';
      node->key += args[i].key();
      node->size += args[i].size();
    }
    node->key += ')';
  }
  node->name = std::move(name);
  node->args = std::move(args);
  node->sort = std::move(sort);
  return Term(std::move(node));
}

bool Term::is_var() const { return node_->is_var; }
const std::string& Term::name() const { return node_->name; }
VarKind Term::var_kind() const { return node_->var_kind; }
const Sort& Term::sort() const { return node_->sort; }
std::span<const Term> Term::args() const { return node_->args; }
std::size_t Term::size() const { return node_->size; }
const std::string& Term::key() const { return node_->key; }

// ---------------------------------------------------------------------------

bool is_builtin_op(std::string_view name) {
  return name == kEmptyOp || name == kSingleOp || name == kUnionOp;
}

Term mempty(const std::string& base) {
  return Term::op(std::string(kEmptyOp), {}, Sort::multiset_of(base));
}

Term msingle(const Term& element) {
  if (element.sort().multiset) throw SortError("singleton of multiset-sorted term " + element.key());
  return Term::op(std::string(kSingleOp), {element}, Sort::multiset_of(element.sort().name));
}

Term munion(const Term& lhs, const Term& rhs) {
  if (!lhs.sort().multiset || lhs.sort() != rhs.sort())
    throw SortError("multiset union of " + lhs.sort().str() + " and " + rhs.sort().str());
  return Term::op(std::string(kUnionOp), {lhs, rhs}, lhs.sort());
}

bool is_mempty(const Term& t) { return t.is_op() && t.name() == kEmptyOp; }
bool is_msingle(const Term& t) { return t.is_op() && t.name() == kSingleOp; }
bool is_munion(const Term& t) { return t.is_op() && t.name() == kUnionOp; }

void collect_variables(const Term& t, std::vector<Term>& out) {
  if (t.is_var()) {
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    return;
  }
  for (const auto& a : t.args()) collect_variables(a, out);
}

std::vector<Term> variables(const Term& t) {
  std::vector<Term> out;
  collect_variables(t, out);
  return out;
}

bool occurs(const Term& var, const Term& t) {
  if (t.is_var()) return t == var;
  for (const auto& a : t.args())
    if (occurs(var, a)) return true;
  return false;
}

bool contains_kind(const Term& t, VarKind kind) {
  if (t.is_var()) return t.var_kind() == kind;
  for (const auto& a : t.args())
    if (contains_kind(a, kind)) return true;
  return false;
}

std::string Judgment::key() const {
  std::string k = symbol + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) k += ',';
    k += args[i].key();
  }
  return k + ")";
}

void collect_variables(const Judgment& j, std::vector<Term>& out) {
  for (const auto& a : j.args) collect_variables(a, out);
}

std::vector<Term> variables(const Judgment& j) {
  std::vector<Term> out;
  collect_variables(j, out);
  return out;
}

bool contains_kind(const Judgment& j, VarKind kind) {
  return std::any_of(j.args.begin(), j.args.end(),
                     [&](const Term& a) { return contains_kind(a, kind); });
}

// ---------------------------------------------------------------------------
// Signature

std::string OpDecl::display_template() const {
  switch (notation.kind) {
    case Notation::Kind::Infix: return "$1 " + notation.text + " $2";
    case Notation::Kind::Template: return notation.text;
    case Notation::Kind::Prefix: break;
  }
  if (args.empty()) return name;
  std::string t = name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) t += ", ";
    t += "$" + std::to_string(i + 1);
  }
  return t + ")";
}

std::string JudgmentDecl::display_template() const {
  if (display) return *display;
  std::string t = name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) t += ", ";
    t += "$" + std::to_string(i + 1);
  }
  return t + ")";
}

Signature::Signature() {
  add_alias("+m", "⊎");
  add_alias("{}m", "∅");
  add_alias("{}", "∅");
}

void Signature::add_sort(const std::string& name) {
  if (std::find(sorts_.begin(), sorts_.end(), name) != sorts_.end())
    throw SortError("duplicate sort '" + name + "'");
  sorts_.push_back(name);
}

bool Signature::has_sort(const Sort& s) const {
  return std::find(sorts_.begin(), sorts_.end(), s.name) != sorts_.end();
}

void Signature::add_op(OpDecl decl) {
  if (is_builtin_op(decl.name)) throw SortError("reserved operator name '" + decl.name + "'");
  if (find_op(decl.name) || find_judgment(decl.name))
    throw SortError("duplicate operator '" + decl.name + "'");
  for (const auto& s : decl.args) {
    if (!has_sort(s)) throw UnknownSymbol("sort", s.name);
    if (s.multiset) throw SortError("operator '" + decl.name + "' takes a multiset argument");
  }
  if (!has_sort(decl.result)) throw UnknownSymbol("sort", decl.result.name);
  if (decl.result.multiset) throw SortError("operator '" + decl.name + "' returns a multiset");
  if (decl.notation.kind == Notation::Kind::Infix && decl.args.size() != 2)
    throw SortError("infix operator '" + decl.name + "' must be binary");
  ops_.push_back(std::move(decl));
}

void Signature::add_judgment(JudgmentDecl decl) {
  if (find_op(decl.name) || find_judgment(decl.name))
    throw SortError("duplicate judgment '" + decl.name + "'");
  for (const auto& s : decl.args)
    if (!has_sort(s)) throw UnknownSymbol("sort", s.name);
  judgments_.push_back(std::move(decl));
}

void Signature::add_alias(const std::string& ascii, const std::string& symbol) {
  for (auto& [from, to] : aliases_)
    if (from == ascii) {
      to = symbol;
      return;
    }
  aliases_.emplace_back(ascii, symbol);
}

const OpDecl* Signature::find_op(std::string_view name) const {
  for (const auto& d : ops_)
    if (d.name == name) return &d;
  return nullptr;
}

const JudgmentDecl* Signature::find_judgment(std::string_view name) const {
  for (const auto& d : judgments_)
    if (d.name == name) return &d;
  return nullptr;
}

Term Signature::make(std::string_view op, std::vector<Term> args) const {
  const OpDecl* d = find_op(op);
  if (!d) throw UnknownSymbol("operator", std::string(op));
  if (d->args.size() != args.size())
    throw SortError("operator '" + d->name + "' expects " + std::to_string(d->args.size()) +
                    " arguments, got " + std::to_string(args.size()));
  for (std::size_t i = 0; i < args.size(); ++i)
    if (args[i].sort() != d->args[i])
      throw SortError("argument " + std::to_string(i + 1) + " of '" + d->name + "' has sort " +
                      args[i].sort().str() + ", expected " + d->args[i].str());
  return Term::op(d->name, std::move(args), d->result);
}

Judgment Signature::make_judgment(std::string_view symbol, std::vector<Term> args) const {
  const JudgmentDecl* d = find_judgment(symbol);
  if (!d) throw UnknownSymbol("judgment", std::string(symbol));
  if (d->args.size() != args.size())
    throw SortError("judgment '" + d->name + "' expects " + std::to_string(d->args.size()) +
                    " arguments");
  for (std::size_t i = 0; i < args.size(); ++i)
    if (args[i].sort() != d->args[i])
      throw SortError("argument " + std::to_string(i + 1) + " of judgment '" + d->name +
                      "' has sort " + args[i].sort().str() + ", expected " + d->args[i].str());
  return Judgment{d->name, std::move(args)};
}

bool check_sorted(const Signature& sig, const Term& t) {
  if (t.is_var()) return sig.has_sort(t.sort());
  if (is_mempty(t)) return t.arity() == 0 && t.sort().multiset && sig.has_sort(t.sort());
  if (is_msingle(t)) {
    return t.arity() == 1 && t.sort().multiset && !t.arg(0).sort().multiset &&
           t.arg(0).sort().name == t.sort().name && check_sorted(sig, t.arg(0));
  }
  if (is_munion(t)) {
    return t.arity() == 2 && t.sort().multiset && t.arg(0).sort() == t.sort() &&
           t.arg(1).sort() == t.sort() && check_sorted(sig, t.arg(0)) &&
           check_sorted(sig, t.arg(1));
  }
  const OpDecl* d = sig.find_op(t.name());
  if (!d) throw UnknownSymbol("operator", t.name());
  if (d->args.size() != t.arity() || d->result != t.sort()) return false;
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (t.arg(i).sort() != d->args[i]) return false;
    if (!check_sorted(sig, t.arg(i))) return false;
  }
  return true;
}

bool check_sorted(const Signature& sig, const Judgment& j) {
  const JudgmentDecl* d = sig.find_judgment(j.symbol);
  if (!d) throw UnknownSymbol("judgment", j.symbol);
  if (d->args.size() != j.args.size()) return false;
  for (std::size_t i = 0; i < j.args.size(); ++i) {
    if (j.args[i].sort() != d->args[i]) return false;
    if (!check_sorted(sig, j.args[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Substitution

const Term* Substitution::find(const Term& var) const {
  if (!var.is_var()) return nullptr;
  auto it = map_.find(Key{var.var_kind(), var.name()});
  return it == map_.end() ? nullptr : &it->second.second;
}

void Substitution::bind(const Term& var, Term value) {
  if (!var.is_var()) throw SortError("binding a non-variable " + var.key());
  if (var.sort() != value.sort())
    throw SortError("binding " + var.key() + " to term of sort " + value.sort().str());
  Key k{var.var_kind(), var.name()};
  auto it = map_.find(k);
  if (it != map_.end()) {
    if (it->second.first.sort() != var.sort())
      throw SortError("conflicting sorts for variable " + var.name());
    if (it->second.second != value)
      throw SortError("variable " + var.name() + " bound twice");
    return;
  }
  map_.emplace(std::move(k), std::make_pair(var, std::move(value)));
}

Substitution Substitution::extended(const Term& var, const Term& value) const {
  Term v = apply(value);
  Substitution single;
  single.bind(var, v);
  Substitution out;
  for (const auto& [k, b] : map_) out.map_.emplace(k, std::make_pair(b.first, single.apply(b.second)));
  out.bind(var, v);
  return out;
}

Term Substitution::apply(const Term& t) const {
  if (map_.empty()) return t;
  if (t.is_var()) {
    const Term* b = find(t);
    return b ? *b : t;
  }
  if (t.arity() == 0) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (const auto& a : t.args()) {
    args.push_back(apply(a));
    changed = changed || !args.back().identical(a);
  }
  if (!changed) return t;
  return Term::op(t.name(), std::move(args), t.sort());
}

Judgment Substitution::apply(const Judgment& j) const {
  Judgment out{j.symbol, {}};
  out.args.reserve(j.args.size());
  for (const auto& a : j.args) out.args.push_back(apply(a));
  return out;
}

Substitution Substitution::restricted(const std::function<bool(const Term&)>& keep) const {
  Substitution out;
  for (const auto& [k, b] : map_)
    if (keep(b.first)) out.map_.emplace(k, b);
  return out;
}

std::vector<std::pair<Term, Term>> Substitution::bindings() const {
  std::vector<std::pair<Term, Term>> out;
  out.reserve(map_.size());
  for (const auto& [k, b] : map_) out.push_back(b);
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first.key() < b.first.key(); });
  return out;
}

bool operator==(const Substitution& a, const Substitution& b) {
  if (a.map_.size() != b.map_.size()) return false;
  for (const auto& [k, v] : a.map_) {
    auto it = b.map_.find(k);
    if (it == b.map_.end() || it->second.first != v.first || it->second.second != v.second)
      return false;
  }
  return true;
}

Substitution compose(const Substitution& first, const Substitution& second) {
  Substitution out;
  for (const auto& [var, value] : first.bindings()) out.bind(var, second.apply(value));
  for (const auto& [var, value] : second.bindings()) {
    if (const Term* prev = first.find(var)) {
      if (prev->sort() != var.sort())
        throw SortError("conflicting sorts for variable " + var.name());
      continue;
    }
    out.bind(var, value);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::pair<Term, std::uint64_t> fresh_var(std::uint64_t counter, std::string_view base, VarKind kind,
                                         Sort sort) {
  std::string name(base);
  name += std::to_string(counter);
  return {Term::var(std::move(name), kind, std::move(sort)), counter + 1};
}

std::string_view name_base(std::string_view name) {
  std::size_t end = name.size();
  while (end > 0 && std::isdigit(static_cast<unsigned char>(name[end - 1]))) --end;
  return name.substr(0, end);
}

std::optional<std::uint64_t> numeric_suffix(std::string_view name) {
  std::string_view base = name_base(name);
  if (base.size() == name.size() || base.empty()) return std::nullopt;
  std::string_view digits = name.substr(base.size());
  if (digits.size() > 18) return std::nullopt;
  return std::stoull(std::string(digits));
}

}  // namespace seqcraft
