#include "seqcraft/logic.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace seqcraft {

std::vector<Term> rule_variables(const std::vector<Judgment>& premises, const Judgment& conclusion) {
  std::vector<Term> vars;
  for (const auto& p : premises) collect_variables(p, vars);
  collect_variables(conclusion, vars);
  return vars;
}

LogicSpec::LogicSpec(std::string name, Signature sig, std::vector<Rule> rules,
                     std::vector<std::string> search_order)
    : name_(std::move(name)),
      syntax_(std::make_shared<const Syntax>(sig)),
      rules_(std::move(rules)),
      search_(std::move(search_order)) {
  std::set<std::string> names;
  for (auto& r : rules_) {
    if (!names.insert(r.name).second) throw Error("duplicate rule '" + r.name + "'");
    for (const auto& j : r.premises)
      if (!check_sorted(signature(), j)) throw SortError("ill-sorted premise in rule " + r.name);
    if (!check_sorted(signature(), r.conclusion))
      throw SortError("ill-sorted conclusion in rule " + r.name);
    r.schematic_vars = rule_variables(r.premises, r.conclusion);
    for (const auto& v : r.schematic_vars)
      if (v.var_kind() != VarKind::Schematic)
        throw Error("rule " + r.name + " mentions non-schematic variable '" + v.name() + "'");
  }
  for (const auto& s : search_)
    if (!names.contains(s)) throw UnknownSymbol("rule", s);
}

const Rule* LogicSpec::find_rule(std::string_view name) const {
  for (const auto& r : rules_)
    if (r.name == name) return &r;
  return nullptr;
}

const Rule& LogicSpec::rule(std::string_view name) const {
  if (const Rule* r = find_rule(name)) return *r;
  throw UnknownSymbol("rule", std::string(name));
}

bool operator==(const LogicSpec& a, const LogicSpec& b) {
  return a.name_ == b.name_ && a.signature() == b.signature() && a.rules_ == b.rules_ &&
         a.search_ == b.search_;
}

// ---------------------------------------------------------------------------
// Definition language

namespace {

struct Word {
  std::string text;
  std::size_t col = 0;  // 1-based
  bool quoted = false;
};

std::vector<Word> split_words(const std::string& line, std::size_t lineno) {
  std::vector<Word> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    Word w;
    w.col = i + 1;
    if (line[i] == '"') {
      w.quoted = true;
      ++i;
      while (i < line.size() && line[i] != '"') {
        if (line[i] == '\\' && i + 1 < line.size()) ++i;
        w.text += line[i++];
      }
      if (i == line.size()) throw ParseError("unterminated string", lineno, w.col);
      ++i;
    } else {
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
        w.text += line[i++];
    }
    out.push_back(std::move(w));
  }
  return out;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

bool is_number(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

struct PendingRule {
  std::string name;
  std::string body;
  std::size_t line = 0;
  std::size_t body_col = 0;
  std::string section;
};

class DslParser {
 public:
  explicit DslParser(std::string_view text) : text_(text) {}

  LogicSpec run() {
    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= text_.size()) {
      std::size_t end = text_.find('\n', start);
      if (end == std::string_view::npos) end = text_.size();
      std::string line(text_.substr(start, end - start));
      if (!line.empty() && line.back() == '\r') line.pop_back();
      ++lineno;
      declaration(line, lineno);
      start = end + 1;
    }
    if (name_.empty()) throw ParseError("missing 'logic <name>' line", 1, 1);
    Syntax syn(sig_);
    std::vector<Rule> rules;
    for (const auto& pr : pending_) rules.push_back(rule(syn, pr));
    for (const auto& [name, line] : search_lines_) {
      bool found = std::any_of(pending_.begin(), pending_.end(),
                               [&](const PendingRule& p) { return p.name == name; });
      if (!found) throw ParseError("unknown rule '" + name + "' in search order", line, 1);
    }
    std::vector<std::string> search;
    for (const auto& s : search_lines_) search.push_back(s.first);
    return LogicSpec(name_, sig_, std::move(rules), std::move(search));
  }

 private:
  [[noreturn]] static void fail(const std::string& msg, std::size_t line, std::size_t col) {
    throw ParseError(msg, line, col);
  }

  Sort sort_named(const Word& w, bool multiset, std::size_t line) const {
    Sort s{w.text, multiset};
    if (!sig_.has_sort(s)) fail("unknown sort '" + w.text + "'", line, w.col);
    return s;
  }

  void declaration(const std::string& line, std::size_t lineno) {
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') return;
    if (line.compare(first, 5, "rule ") == 0) {
      rule_line(line, first, lineno);
      return;
    }
    std::vector<Word> w = split_words(line, lineno);
    const std::string& kw = w[0].text;
    try {
      if (kw == "logic") {
        if (w.size() != 2) fail("expected 'logic <name>'", lineno, w[0].col);
        if (!name_.empty()) fail("logic name given twice", lineno, w[0].col);
        name_ = w[1].text;
      } else if (kw == "sort") {
        if (w.size() < 2) fail("expected 'sort <name>'", lineno, w[0].col);
        for (std::size_t i = 1; i < w.size(); ++i) {
          if (seen_rule_) fail("declarations must precede rules", lineno, w[0].col);
          sig_.add_sort(w[i].text);
        }
      } else if (kw == "op") {
        op_line(w, lineno);
      } else if (kw == "judgment") {
        judgment_line(w, lineno);
      } else if (kw == "alias") {
        if (w.size() != 3) fail("expected 'alias \"ascii\" \"symbol\"'", lineno, w[0].col);
        sig_.add_alias(w[1].text, w[2].text);
      } else if (kw == "section") {
        std::string title;
        if (w.size() == 2 && w[1].quoted) {
          title = w[1].text;
        } else {
          for (std::size_t i = 1; i < w.size(); ++i) title += (i > 1 ? " " : "") + w[i].text;
        }
        section_ = title;
      } else if (kw == "search") {
        for (std::size_t i = 1; i < w.size(); ++i) search_lines_.emplace_back(w[i].text, lineno);
      } else {
        fail("unknown declaration '" + kw + "'", lineno, w[0].col);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), lineno, w[0].col);
    }
  }

  void op_line(const std::vector<Word>& w, std::size_t lineno) {
    if (seen_rule_) fail("declarations must precede rules", lineno, w[0].col);
    if (w.size() < 4 || w[2].text != ":") fail("expected 'op <name> : <sorts> -> <sort>'", lineno, w[0].col);
    OpDecl d;
    d.name = w[1].text;
    std::size_t i = 3;
    while (i < w.size() && w[i].text != "->") d.args.push_back(sort_named(w[i++], false, lineno));
    if (i + 1 >= w.size()) fail("expected '-> <sort>'", lineno, w.back().col);
    d.result = sort_named(w[i + 1], false, lineno);
    i += 2;
    if (i < w.size()) {
      const std::string& kind = w[i].text;
      if (kind == "infix")
        d.notation.kind = Notation::Kind::Infix;
      else if (kind == "display")
        d.notation.kind = Notation::Kind::Template;
      else
        fail("expected 'infix' or 'display'", lineno, w[i].col);
      if (i + 1 >= w.size() || !w[i + 1].quoted) fail("expected quoted notation", lineno, w[i].col);
      d.notation.text = w[i + 1].text;
      i += 2;
      if (i < w.size() && is_number(w[i].text)) d.notation.prec = std::stoi(w[i++].text);
      if (i < w.size() && (w[i].text == "left" || w[i].text == "right"))
        d.notation.assoc = w[i++].text == "left" ? Assoc::Left : Assoc::Right;
      if (i < w.size()) fail("unexpected '" + w[i].text + "'", lineno, w[i].col);
    }
    sig_.add_op(std::move(d));
  }

  void judgment_line(const std::vector<Word>& w, std::size_t lineno) {
    if (seen_rule_) fail("declarations must precede rules", lineno, w[0].col);
    if (w.size() < 4 || w[2].text != ":") fail("expected 'judgment <name> : <args>'", lineno, w[0].col);
    JudgmentDecl d;
    d.name = w[1].text;
    std::size_t i = 3;
    bool multiset = false;
    for (; i < w.size() && w[i].text != "display"; ++i) {
      std::string t = w[i].text;
      bool comma = !t.empty() && t.back() == ',';
      if (comma) t.pop_back();
      if (t == "multiset") {
        multiset = true;
      } else if (!t.empty()) {
        d.args.push_back(sort_named(Word{t, w[i].col, false}, multiset, lineno));
        multiset = false;
      }
    }
    if (multiset) fail("'multiset' without a sort", lineno, w.back().col);
    if (i < w.size()) {
      if (i + 1 >= w.size() || !w[i + 1].quoted) fail("expected quoted display", lineno, w[i].col);
      d.display = w[i + 1].text;
      if (i + 2 < w.size()) fail("unexpected '" + w[i + 2].text + "'", lineno, w[i + 2].col);
    }
    sig_.add_judgment(std::move(d));
  }

  void rule_line(const std::string& line, std::size_t first, std::size_t lineno) {
    seen_rule_ = true;
    std::size_t name_start = line.find_first_not_of(" \t", first + 5);
    std::size_t colon = line.find(" :", name_start);
    if (name_start == std::string::npos || colon == std::string::npos)
      fail("expected 'rule <name> : <judgments>'", lineno, first + 1);
    PendingRule pr;
    pr.name = line.substr(name_start, colon - name_start);
    while (!pr.name.empty() && std::isspace(static_cast<unsigned char>(pr.name.back())))
      pr.name.pop_back();
    if (pr.name.empty() || pr.name.find_first_of(" \t") != std::string::npos)
      fail("bad rule name", lineno, name_start + 1);
    for (const auto& p : pending_)
      if (p.name == pr.name) fail("duplicate rule '" + pr.name + "'", lineno, name_start + 1);
    pr.body = line.substr(colon + 2);
    pr.body_col = colon + 3;
    pr.line = lineno;
    pr.section = section_;
    pending_.push_back(std::move(pr));
  }

  Rule rule(const Syntax& syn, const PendingRule& pr) const {
    VarScope scope;
    scope.fresh_kind = VarKind::Schematic;
    std::vector<Judgment> parts;
    std::size_t at = 0;
    while (true) {
      std::size_t sep = pr.body.find("==>", at);
      std::string piece = pr.body.substr(at, sep == std::string::npos ? std::string::npos : sep - at);
      std::size_t col = pr.body_col + at;
      if (piece.find_first_not_of(" \t") == std::string::npos)
        fail("empty judgment in rule " + pr.name, pr.line, col);
      try {
        parts.push_back(syn.parse_judgment(piece, &scope));
      } catch (const ParseError& e) {
        std::string msg = e.what();
        msg = msg.substr(msg.find(": ") + 2);
        fail(msg + " in rule " + pr.name, pr.line, col + e.column() - 1);
      } catch (const Error& e) {
        fail(std::string(e.what()) + " in rule " + pr.name, pr.line, col);
      }
      if (sep == std::string::npos) break;
      at = sep + 3;
    }
    Rule r;
    r.name = pr.name;
    r.conclusion = parts.back();
    parts.pop_back();
    r.premises = std::move(parts);
    r.section = pr.section;
    r.schematic_vars = rule_variables(r.premises, r.conclusion);
    return r;
  }

  std::string_view text_;
  std::string name_;
  Signature sig_;
  std::vector<PendingRule> pending_;
  std::vector<std::pair<std::string, std::size_t>> search_lines_;
  std::string section_;
  bool seen_rule_ = false;
};

std::string sort_words(const Sort& s) { return s.multiset ? "multiset " + s.name : s.name; }

}  // namespace

LogicSpec parse_logic(std::string_view text) { return DslParser(text).run(); }

std::string print_rule(const LogicSpec& spec, const Rule& r) {
  std::string out = r.name + " : ";
  for (const auto& p : r.premises) out += spec.print(p) + " ==> ";
  return out + spec.print(r.conclusion);
}

std::string print_logic(const LogicSpec& spec) {
  std::ostringstream out;
  const Signature& sig = spec.signature();
  out << "logic " << spec.name() << "\n";
  for (const auto& s : sig.sorts()) out << "sort " << s << "\n";
  for (const auto& op : sig.ops()) {
    out << "op " << op.name << " :";
    for (const auto& a : op.args) out << " " << a.name;
    out << " -> " << op.result.name;
    const Notation& n = op.notation;
    if (n.kind != Notation::Kind::Prefix) {
      out << (n.kind == Notation::Kind::Infix ? " infix " : " display ") << quote(n.text) << " "
          << n.prec << (n.assoc == Assoc::Left ? " left" : " right");
    }
    out << "\n";
  }
  for (const auto& j : sig.judgments()) {
    out << "judgment " << j.name << " :";
    for (std::size_t i = 0; i < j.args.size(); ++i)
      out << (i ? ", " : " ") << sort_words(j.args[i]);
    if (j.display) out << " display " << quote(*j.display);
    out << "\n";
  }
  Signature plain;
  for (const auto& al : sig.aliases()) {
    bool builtin = std::find(plain.aliases().begin(), plain.aliases().end(), al) !=
                   plain.aliases().end();
    if (!builtin) out << "alias " << quote(al.first) << " " << quote(al.second) << "\n";
  }
  std::string section;
  for (const auto& r : spec.rules()) {
    if (r.section != section) {
      out << "section " << quote(r.section) << "\n";
      section = r.section;
    }
    out << "rule " << print_rule(spec, r) << "\n";
  }
  if (!spec.search_order().empty()) {
    out << "search";
    for (const auto& s : spec.search_order()) out << " " << s;
    out << "\n";
  }
  return out.str();
}

std::pair<Rule, std::uint64_t> freshen_rule(const Rule& r, std::uint64_t counter,
                                            Substitution* renaming) {
  Substitution ren;
  for (const auto& v : r.schematic_vars) {
    auto [nv, next] = fresh_var(counter, name_base(v.name()), VarKind::Schematic, v.sort());
    counter = next;
    ren.bind(v, nv);
  }
  Rule out = r;
  for (auto& p : out.premises) p = ren.apply(p);
  out.conclusion = ren.apply(r.conclusion);
  for (auto& v : out.schematic_vars) v = ren.apply(v);
  if (renaming) *renaming = ren;
  return {std::move(out), counter};
}

Rule instantiate_rule(const Rule& r, const std::vector<std::pair<std::string, Term>>& bindings) {
  Substitution s;
  for (const auto& [name, value] : bindings) {
    auto it = std::find_if(r.schematic_vars.begin(), r.schematic_vars.end(),
                           [&](const Term& v) { return v.name() == name; });
    if (it == r.schematic_vars.end()) throw UnknownSymbol("variable", name);
    if (it->sort() != value.sort())
      throw SortError("'" + name + "' has sort " + it->sort().str() + " but the term has sort " +
                      value.sort().str());
    s.bind(*it, value);
  }
  Rule out = r;
  for (auto& p : out.premises) p = s.apply(p);
  out.conclusion = s.apply(r.conclusion);
  std::vector<Term> vars = rule_variables(out.premises, out.conclusion);
  out.schematic_vars.clear();
  for (const auto& v : vars)
    if (v.var_kind() == VarKind::Schematic) out.schematic_vars.push_back(v);
  return out;
}

}  // namespace seqcraft
