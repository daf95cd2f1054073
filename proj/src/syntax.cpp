#include "seqcraft/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace seqcraft {

namespace {

constexpr int kUnionPrec = 10;
constexpr std::string_view kEmptySym = "∅";
constexpr std::string_view kUnionSym = "⊎";

bool ident_byte(unsigned char c) { return std::isalnum(c) || c == '_'; }
bool bracket_byte(char c) {
  return c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}' || c == ',' ||
         c == '.' || c == ';' || c == '|' || c == '\'';
}

std::size_t utf8_len(unsigned char c) {
  if (c < 0x80) return 1;
  if ((c >> 5) == 0x6) return 2;
  if ((c >> 4) == 0xe) return 3;
  if ((c >> 3) == 0x1e) return 4;
  return 1;
}

// Splits the literal text of a template into tokens: identifier runs,
// single bracket characters and runs of other symbol characters.
std::vector<std::string> literal_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = text[i];
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    if (ident_byte(c)) {
      while (j < text.size() && ident_byte(text[j])) ++j;
    } else if (bracket_byte(text[i])) {
      j = i + 1;
    } else {
      while (j < text.size()) {
        unsigned char d = text[j];
        if (std::isspace(d) || ident_byte(d) || bracket_byte(text[j])) break;
        j += utf8_len(d);
      }
    }
    out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

struct Piece {
  bool hole = false;
  std::size_t index = 0;  // argument position, 0-based
  std::string token;
};

struct Segment {
  bool hole = false;
  std::size_t index = 0;
  std::string text;
};

enum class TemplateKind { Op, Judgment, Group, Union };

struct Template {
  TemplateKind kind = TemplateKind::Op;
  std::string name;
  std::size_t arity = 0;
  std::vector<Piece> pieces;
  std::vector<Segment> segments;
  int prec = 100;
  Assoc assoc = Assoc::Left;

  bool left_open() const { return !pieces.empty() && pieces.front().hole; }
  bool right_open() const { return !pieces.empty() && pieces.back().hole; }
  int trailing_rbp() const { return assoc == Assoc::Right ? prec - 1 : prec; }
};

Template compile(TemplateKind kind, const std::string& name, std::size_t arity,
                 const std::string& text, int prec, Assoc assoc) {
  Template t;
  t.kind = kind;
  t.name = name;
  t.arity = arity;
  t.prec = prec;
  t.assoc = assoc;
  std::vector<bool> seen(arity, false);
  std::string chunk;
  auto flush = [&] {
    if (chunk.empty()) return;
    for (auto& tok : literal_tokens(chunk)) t.pieces.push_back(Piece{false, 0, tok});
    t.segments.push_back(Segment{false, 0, chunk});
    chunk.clear();
  };
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] == '$' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
      std::size_t j = i + 1;
      std::size_t n = 0;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
        n = n * 10 + static_cast<std::size_t>(text[j++] - '0');
      if (n == 0 || n > arity || seen[n - 1])
        throw Error("template '" + text + "' for '" + name + "': bad placeholder $" +
                    std::to_string(n));
      seen[n - 1] = true;
      flush();
      t.pieces.push_back(Piece{true, n - 1, {}});
      t.segments.push_back(Segment{true, n - 1, {}});
      i = j;
      continue;
    }
    chunk += text[i++];
  }
  flush();
  for (std::size_t k = 0; k < arity; ++k)
    if (!seen[k])
      throw Error("template '" + text + "' for '" + name + "' misses $" + std::to_string(k + 1));
  if (t.pieces.empty()) throw Error("empty template for '" + name + "'");
  if (t.pieces[0].hole && (t.pieces.size() < 2 || t.pieces[1].hole) &&
      kind != TemplateKind::Judgment)
    throw Error("template '" + text + "' for '" + name +
                "' must start with a symbol or a placeholder followed by a symbol");
  return t;
}

struct Token {
  enum Kind { Ident, Literal, End } kind = End;
  std::string text;
  std::size_t pos = 0;
};

struct Ast {
  enum Kind { Ident, App, Empty, Single, Enum, Union } kind = Ident;
  std::string name;
  std::vector<Ast> kids;
  std::size_t pos = 0;
};

}  // namespace

struct Syntax::Impl {
  std::vector<Template> templates;
  std::map<std::string, const Template*> by_op;
  std::vector<const Template*> judgment_templates;
  std::map<std::string, const Template*> by_judgment;
  std::map<std::string, std::vector<const Template*>> nud;
  std::map<std::string, std::vector<const Template*>> led;
  std::set<std::string> keywords;  // literal tokens spelled like identifiers
  std::vector<std::string> symbols;  // longest first
  std::map<std::string, std::string> aliases;
  const Template* group = nullptr;
  const Template* union_t = nullptr;

  explicit Impl(const Signature& sig);

  std::vector<Token> lex(std::string_view text) const;
  std::string print(const Term& t, int rbp, int follow) const;
  std::string render(const Template& t, const std::vector<std::string>& parts) const;
  std::vector<std::string> children(const Template& t, const std::vector<Term>& kids, int rbp,
                                    int follow) const;
};

Syntax::Impl::Impl(const Signature& sig) {
  templates.reserve(sig.ops().size() + sig.judgments().size() + 2);
  for (const auto& op : sig.ops()) {
    int prec = op.notation.prec;
    Assoc assoc = op.notation.assoc;
    templates.push_back(compile(TemplateKind::Op, op.name, op.args.size(), op.display_template(),
                                prec, assoc));
  }
  for (const auto& j : sig.judgments())
    templates.push_back(compile(TemplateKind::Judgment, j.name, j.args.size(),
                                j.display_template(), 0, Assoc::Left));
  templates.push_back(compile(TemplateKind::Group, "()", 1, "($1)", 100, Assoc::Left));
  templates.push_back(compile(TemplateKind::Union, std::string(kUnionOp), 2,
                              "$1 " + std::string(kUnionSym) + " $2", kUnionPrec, Assoc::Right));

  std::set<std::string> syms{"(", ")", ",", "{", "}", "'", std::string(kEmptySym),
                             std::string(kUnionSym)};
  for (const auto& t : templates) {
    for (const auto& p : t.pieces) {
      if (p.hole) continue;
      if (ident_byte(static_cast<unsigned char>(p.token[0])))
        keywords.insert(p.token);
      else
        syms.insert(p.token);
    }
    switch (t.kind) {
      case TemplateKind::Op:
        by_op[t.name] = &t;
        break;
      case TemplateKind::Judgment:
        judgment_templates.push_back(&t);
        by_judgment[t.name] = &t;
        continue;
      case TemplateKind::Group:
        group = &t;
        break;
      case TemplateKind::Union:
        union_t = &t;
        break;
    }
    if (t.pieces[0].hole)
      led[t.pieces[1].token].push_back(&t);
    else
      nud[t.pieces[0].token].push_back(&t);
  }
  for (const auto& [ascii, sym] : sig.aliases()) {
    aliases[ascii] = sym;
    syms.insert(ascii);
  }
  for (const auto& s : syms)
    if (!ident_byte(static_cast<unsigned char>(s[0]))) symbols.push_back(s);
  std::stable_sort(symbols.begin(), symbols.end(),
                   [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
}

std::vector<Token> Syntax::Impl::lex(std::string_view text) const {
  std::vector<Token> out;
  std::size_t i = 0;
  auto symbol_at = [&](std::size_t at) -> const std::string* {
    for (const auto& s : symbols)
      if (text.compare(at, s.size(), s) == 0) return &s;
    return nullptr;
  };
  auto emit = [&](std::string tok, std::size_t pos, bool ident_like) {
    if (auto it = aliases.find(tok); it != aliases.end()) {
      tok = it->second;
      ident_like = ident_byte(static_cast<unsigned char>(tok[0]));
    }
    Token t;
    t.pos = pos;
    t.kind = (!ident_like || keywords.contains(tok)) ? Token::Literal : Token::Ident;
    t.text = std::move(tok);
    out.push_back(std::move(t));
  };
  while (i < text.size()) {
    unsigned char c = text[i];
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (const std::string* s = symbol_at(i)) {
      emit(*s, i, false);
      i += s->size();
      continue;
    }
    if (ident_byte(c) || c >= 0x80) {
      std::size_t j = i;
      while (j < text.size()) {
        unsigned char d = text[j];
        if (ident_byte(d)) {
          ++j;
        } else if (d >= 0x80 && !symbol_at(j)) {
          j += utf8_len(d);
        } else {
          break;
        }
      }
      emit(std::string(text.substr(i, j - i)), i, true);
      i = j;
      continue;
    }
    throw ParseError("unexpected character '" + std::string(1, static_cast<char>(c)) + "'", 1,
                     i + 1);
  }
  Token end;
  end.pos = text.size();
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  using Impl = Syntax::Impl;

  Parser(const Impl& g, std::vector<Token> toks) : g_(g), toks_(std::move(toks)) {}

  Ast expr(int rbp, const std::set<std::string>& stop) {
    Ast left = nud(stop);
    while (true) {
      const Token& tok = peek();
      if (tok.kind != Token::Literal || stop.contains(tok.text)) break;
      auto it = g_.led.find(tok.text);
      if (it == g_.led.end()) break;
      std::vector<const Template*> cands;
      for (const Template* t : it->second)
        if (t->prec > rbp) cands.push_back(t);
      if (cands.empty()) break;
      std::size_t pos = tok.pos;
      next();
      std::vector<Ast> args{std::move(left)};
      const Template* t = lockstep(cands, 2, args, stop);
      left = build(*t, std::move(args), pos);
    }
    return left;
  }

  // Continues matching `cands` from piece `p`; returns the template that
  // completed. Arguments are appended in piece order.
  const Template* lockstep(std::vector<const Template*> cands, std::size_t p,
                           std::vector<Ast>& args, const std::set<std::string>& outer) {
    while (true) {
      const Template* complete = nullptr;
      std::vector<const Template*> going;
      for (const Template* t : cands) {
        if (t->pieces.size() == p)
          complete = complete ? complete : t;
        else
          going.push_back(t);
      }
      if (going.empty()) return check_done(complete);
      const Token& tok = peek();
      std::vector<const Template*> lits;
      std::vector<const Template*> holes;
      for (const Template* t : going) {
        const Piece& piece = t->pieces[p];
        if (piece.hole)
          holes.push_back(t);
        else if (tok.kind != Token::End && piece.token == tok.text)
          lits.push_back(t);
      }
      if (!lits.empty()) {
        next();
        cands = std::move(lits);
        ++p;
        continue;
      }
      if (!holes.empty() && starts_expr(tok)) {
        bool trailing = true;
        int rbp = 0;
        std::set<std::string> stop;
        for (const Template* t : holes) {
          if (p + 1 < t->pieces.size()) {
            trailing = false;
            if (!t->pieces[p + 1].hole) stop.insert(t->pieces[p + 1].token);
          } else {
            rbp = std::max(rbp, t->trailing_rbp());
          }
        }
        if (trailing) stop = outer;
        else rbp = 0;
        args.push_back(expr(rbp, stop));
        cands = std::move(holes);
        ++p;
        continue;
      }
      if (complete) return complete;
      std::string want;
      for (const Template* t : going)
        want += t->pieces[p].hole ? std::string(" a term") : " '" + t->pieces[p].token + "'";
      fail_at_token("expected" + want);
    }
  }

  const Token& peek() const { return toks_[pos_]; }
  void next() {
    if (pos_ + 1 < toks_.size()) ++pos_;
  }

  void expect_end() {
    if (peek().kind != Token::End) fail_at_token("unexpected '" + peek().text + "'");
  }

  // An identifier where an operator should be is most likely an undeclared
  // operator symbol (non-ASCII) or function name (followed by a paren).
  [[noreturn]] void fail_at_token(const std::string& msg) const {
    const Token& tok = peek();
    if (tok.kind == Token::Ident) {
      bool symbolic = static_cast<unsigned char>(tok.text[0]) >= 0x80;
      bool applied = pos_ + 1 < toks_.size() && toks_[pos_ + 1].text == "(";
      if (symbolic || applied) fail("unknown operator '" + tok.text + "'");
    }
    if (tok.kind == Token::End) fail(msg + ", found end of input");
    fail(msg + ", found '" + tok.text + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, 1, peek().pos + 1);
  }

  static Ast build(const Template& t, std::vector<Ast> args, std::size_t pos) {
    if (t.kind == TemplateKind::Group) return std::move(args[0]);
    Ast a;
    a.kind = t.kind == TemplateKind::Union ? Ast::Union : Ast::App;
    a.name = t.name;
    a.pos = pos;
    a.kids.resize(t.arity);
    // `args` is in piece order; store by argument index.
    std::size_t k = 0;
    for (const Piece& piece : t.pieces)
      if (piece.hole) a.kids[piece.index] = std::move(args[k++]);
    return a;
  }

 private:
  const Template* check_done(const Template* t) const {
    if (!t) fail("incomplete expression");
    return t;
  }

  bool starts_expr(const Token& tok) const {
    if (tok.kind == Token::End) return false;
    if (tok.kind == Token::Ident) return true;
    return tok.text == "{" || tok.text == "'" || tok.text == kEmptySym || g_.nud.contains(tok.text);
  }

  Ast nud(const std::set<std::string>& stop) {
    const Token tok = peek();
    if (tok.kind == Token::End) fail("unexpected end of input");
    if (tok.kind == Token::Ident) {
      next();
      return Ast{Ast::Ident, tok.text, {}, tok.pos};
    }
    if (tok.text == kEmptySym) {
      next();
      return Ast{Ast::Empty, {}, {}, tok.pos};
    }
    if (tok.text == "{") {
      next();
      Ast a{Ast::Enum, {}, {}, tok.pos};
      if (peek().text == "}" && peek().kind == Token::Literal) {
        next();
        a.kind = Ast::Empty;
        return a;
      }
      std::set<std::string> inner{",", "}"};
      a.kids.push_back(expr(0, inner));
      while (peek().kind == Token::Literal && peek().text == ",") {
        next();
        a.kids.push_back(expr(0, inner));
      }
      if (peek().text != "}") fail_at_token("expected '}'");
      next();
      if (a.kids.size() == 1) a.kind = Ast::Single;
      return a;
    }
    if (tok.text == "'") {
      next();
      Ast a{Ast::Single, {}, {}, tok.pos};
      a.kids.push_back(expr(0, {"'"}));
      if (peek().text != "'") fail_at_token("expected closing quote");
      next();
      return a;
    }
    auto it = g_.nud.find(tok.text);
    if (it == g_.nud.end()) fail("unexpected '" + tok.text + "'");
    next();
    std::vector<Ast> args;
    const Template* t = lockstep(it->second, 1, args, stop);
    return build(*t, std::move(args), tok.pos);
  }

  const Impl& g_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Sort-directed conversion from syntax trees to terms.
class Elaborator {
 public:
  Elaborator(const Signature& sig, VarScope& scope) : sig_(sig), scope_(scope) {}

  std::optional<Sort> infer(const Ast& a) const {
    switch (a.kind) {
      case Ast::Ident: {
        auto it = scope_.known.find(a.name);
        if (it != scope_.known.end()) return it->second.sort();
        return std::nullopt;
      }
      case Ast::App: {
        const OpDecl* d = sig_.find_op(a.name);
        return d ? std::optional<Sort>(d->result) : std::nullopt;
      }
      case Ast::Empty:
        return std::nullopt;
      case Ast::Single:
      case Ast::Enum:
        for (const auto& k : a.kids)
          if (auto s = infer(k)) return Sort::multiset_of(s->name);
        return std::nullopt;
      case Ast::Union:
        for (const auto& k : a.kids)
          if (auto s = infer(k)) return s;
        return std::nullopt;
    }
    return std::nullopt;
  }

  Term term(const Ast& a, std::optional<Sort> expected) {
    if (!expected) expected = infer(a);
    switch (a.kind) {
      case Ast::Ident:
        return ident(a, expected);
      case Ast::App: {
        const OpDecl* d = sig_.find_op(a.name);
        if (!d) throw UnknownSymbol("operator", a.name);
        std::vector<Term> args;
        for (std::size_t i = 0; i < a.kids.size(); ++i) args.push_back(term(a.kids[i], d->args[i]));
        check(a, d->result, expected);
        return Term::op(d->name, std::move(args), d->result);
      }
      case Ast::Empty:
        if (!expected) fail(a, "cannot infer the sort of '∅'");
        if (!expected->multiset) fail(a, "multiset where " + expected->str() + " expected");
        return mempty(expected->name);
      case Ast::Single:
      case Ast::Enum: {
        if (!expected) fail(a, "cannot infer the element sort of a multiset");
        if (!expected->multiset) fail(a, "multiset where " + expected->str() + " expected");
        std::optional<Term> acc;
        for (auto it = a.kids.rbegin(); it != a.kids.rend(); ++it) {
          Term s = msingle(term(*it, expected->element()));
          acc = acc ? munion(s, *acc) : s;
        }
        return *acc;
      }
      case Ast::Union: {
        if (!expected) fail(a, "cannot infer the sort of a multiset sum");
        if (!expected->multiset) fail(a, "multiset where " + expected->str() + " expected");
        Term l = term(a.kids[0], expected);
        Term r = term(a.kids[1], expected);
        return munion(l, r);
      }
    }
    fail(a, "bad expression");
  }

  [[noreturn]] static void fail(const Ast& a, const std::string& msg) {
    throw ParseError(msg, 1, a.pos + 1);
  }

 private:
  static void check(const Ast& a, const Sort& got, const std::optional<Sort>& expected) {
    if (expected && *expected != got)
      throw SortError("1:" + std::to_string(a.pos + 1) + ": '" + a.name + "' has sort " +
                      got.str() + ", expected " + expected->str());
  }

  Term ident(const Ast& a, const std::optional<Sort>& expected) {
    auto it = scope_.known.find(a.name);
    if (it != scope_.known.end()) {
      check(a, it->second.sort(), expected);
      return it->second;
    }
    if (!scope_.allow_fresh) throw UnknownSymbol("identifier", a.name);
    if (!expected) fail(a, "cannot infer the sort of '" + a.name + "'");
    if (!sig_.has_sort(*expected)) throw UnknownSymbol("sort", expected->name);
    Term v = Term::var(a.name, scope_.fresh_kind, *expected);
    scope_.add(v);
    return v;
  }

  const Signature& sig_;
  VarScope& scope_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Printing

std::string Syntax::Impl::render(const Template& t, const std::vector<std::string>& parts) const {
  std::string out;
  for (const auto& seg : t.segments) out += seg.hole ? parts[seg.index] : seg.text;
  return out;
}

// Printed children of an application in context (rbp, follow); see print().
std::vector<std::string> Syntax::Impl::children(const Template& t, const std::vector<Term>& kids,
                                                int rbp, int follow) const {
  std::vector<std::string> parts(t.arity);
  const std::size_t n = t.pieces.size();
  for (std::size_t p = 0; p < n; ++p) {
    const Piece& piece = t.pieces[p];
    if (!piece.hole) continue;
    int child_rbp = 0;
    int child_follow = 0;
    if (p == 0 && t.kind != TemplateKind::Judgment) {
      child_rbp = rbp;
      child_follow = t.prec;
    }
    if (p + 1 == n && t.kind != TemplateKind::Judgment) {
      child_rbp = std::max(child_rbp, t.trailing_rbp());
      child_follow = std::max(child_follow, follow);
    }
    parts[piece.index] = print(kids[piece.index], child_rbp, child_follow);
  }
  return parts;
}

// `rbp`: binding power of the slot the term is printed in; a left-open
// template needs parentheses unless its precedence exceeds it. `follow`:
// binding power of the token printed right after the term; a right-open
// template would swallow it when it binds tighter than the trailing slot.
std::string Syntax::Impl::print(const Term& t, int rbp, int follow) const {
  if (t.is_var()) return t.name();
  if (is_mempty(t)) return std::string(kEmptySym);
  if (is_msingle(t)) return "{" + print(t.arg(0), 0, 0) + "}";
  const Template* tp = nullptr;
  if (is_munion(t)) {
    tp = union_t;
  } else {
    auto it = by_op.find(t.name());
    if (it == by_op.end()) throw UnknownSymbol("operator", t.name());
    tp = it->second;
  }
  bool parens = (tp->left_open() && tp->prec <= rbp) ||
                (tp->right_open() && follow > tp->trailing_rbp());
  std::vector<Term> kids(t.args().begin(), t.args().end());
  if (parens) return "(" + render(*tp, children(*tp, kids, 0, 0)) + ")";
  return render(*tp, children(*tp, kids, rbp, follow));
}

// ---------------------------------------------------------------------------

Syntax::Syntax(const Signature& sig) : sig_(sig), impl_(std::make_unique<Impl>(sig_)) {}
Syntax::~Syntax() = default;

Term Syntax::parse_term(std::string_view text, std::optional<Sort> expected,
                        VarScope* scope) const {
  VarScope local;
  VarScope& sc = scope ? *scope : local;
  Parser p(*impl_, impl_->lex(text));
  Ast a = p.expr(0, {});
  p.expect_end();
  return Elaborator(sig_, sc).term(a, expected);
}

Judgment Syntax::parse_judgment(std::string_view text, VarScope* scope) const {
  std::vector<Token> toks = impl_->lex(text);
  std::optional<ParseError> first_error;
  for (const Template* t : impl_->judgment_templates) {
    VarScope trial = scope ? *scope : VarScope{};
    try {
      Parser p(*impl_, toks);
      std::vector<Ast> args;
      p.lockstep({t}, 0, args, {});
      p.expect_end();
      Ast a = Parser::build(*t, std::move(args), 0);
      const JudgmentDecl* d = sig_.find_judgment(t->name);
      Elaborator el(sig_, trial);
      // Term-sorted arguments first: they pin down variables that the
      // multiset arguments may mention.
      std::vector<std::optional<Term>> out(a.kids.size());
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t i = 0; i < a.kids.size(); ++i)
          if (d->args[i].multiset == (pass == 1)) out[i] = el.term(a.kids[i], d->args[i]);
      Judgment j{d->name, {}};
      for (auto& o : out) j.args.push_back(*o);
      if (scope) *scope = std::move(trial);
      return j;
    } catch (const ParseError& e) {
      if (!first_error) first_error = e;
    }
  }
  if (first_error) throw *first_error;
  throw ParseError("no judgment declared", 1, 1);
}

std::string Syntax::print(const Term& t) const { return impl_->print(t, 0, 0); }

std::string Syntax::print(const Judgment& j) const {
  auto it = impl_->by_judgment.find(j.symbol);
  if (it == impl_->by_judgment.end()) throw UnknownSymbol("judgment", j.symbol);
  return impl_->render(*it->second, impl_->children(*it->second, j.args, 0, 0));
}

Term parse_term(const Signature& sig, std::string_view text, std::optional<Sort> expected,
                VarScope* scope) {
  return Syntax(sig).parse_term(text, expected, scope);
}

Judgment parse_judgment(const Signature& sig, std::string_view text, VarScope* scope) {
  return Syntax(sig).parse_judgment(text, scope);
}

std::string print_term(const Signature& sig, const Term& t) { return Syntax(sig).print(t); }

std::string print_judgment(const Signature& sig, const Judgment& j) {
  return Syntax(sig).print(j);
}

}  // namespace seqcraft
