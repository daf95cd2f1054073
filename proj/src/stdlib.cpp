#include "seqcraft/stdlib.hpp"

#include <fstream>
#include <mutex>
#include <sstream>

#include "logic_sources.hpp"

namespace seqcraft {

namespace {

const LogicSpec& cached(std::string_view name) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<LogicSpec>, std::less<>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(name);
  if (it != cache.end()) return *it->second;
  auto src = builtin_logic_source(name);
  if (!src) throw UnknownSymbol("logic", std::string(name));
  auto spec = std::make_unique<LogicSpec>(parse_logic(*src));
  return *cache.emplace(std::string(name), std::move(spec)).first->second;
}

}  // namespace

const LogicSpec& simple_prop() { return cached("simple_prop"); }
const LogicSpec& curry_howard() { return cached("curry_howard"); }
const LogicSpec& ill() { return cached("ill"); }
const LogicSpec& cll_cp() { return cached("cll_cp"); }

std::vector<std::string> builtin_logic_names() {
  std::vector<std::string> out;
  for (const auto& s : detail::kLogicSources) out.emplace_back(s.name);
  return out;
}

std::optional<std::string_view> builtin_logic_source(std::string_view name) {
  for (const auto& s : detail::kLogicSources)
    if (s.name == name) return s.text;
  return std::nullopt;
}

const LogicSpec* builtin_logic(std::string_view name) {
  if (!builtin_logic_source(name)) return nullptr;
  return &cached(name);
}

LogicSpec load_logic(std::string_view what) {
  if (const LogicSpec* l = builtin_logic(what)) return *l;
  if (what.find('\n') != std::string_view::npos) return parse_logic(what);
  std::ifstream in{std::string(what)};
  if (!in) throw Error("no logic named '" + std::string(what) + "' and no such file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_logic(ss.str());
}

Term reduce_projections(const Term& t) {
  if (t.is_var() || t.arity() == 0) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const auto& a : t.args()) args.push_back(reduce_projections(a));
  if ((t.name() == "fst" || t.name() == "snd") && args.size() == 1 && args[0].is_op() &&
      args[0].name() == "pair" && args[0].arity() == 2)
    return args[0].arg(t.name() == "fst" ? 0 : 1);
  return Term::op(t.name(), std::move(args), t.sort());
}

}  // namespace seqcraft
