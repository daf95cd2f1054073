#include "seqcraft/protocol.hpp"

#include <istream>
#include <optional>
#include <ostream>
#include <vector>

#include "seqcraft/stdlib.hpp"
#include "seqcraft/tactics.hpp"

namespace seqcraft {

Json state_json(const LogicSpec& logic, const GoalState& st) {
  Json s;
  Json goals = Json::array();
  for (const auto& g : st.subgoals()) {
    Json hyps = Json::array();
    for (const auto& h : g.hyps) hyps.push_back(logic.print(h));
    goals.push_back(Json{{"hyps", hyps}, {"target", logic.print(g.target)}});
  }
  s["subgoals"] = goals;
  s["metas"] = Json::array();
  for (const auto& m : st.metas()) s["metas"].push_back(m);
  s["inst"] = Json::array();
  for (const auto& [v, t] : st.inst().bindings())
    s["inst"].push_back(Json{{"var", v.name()}, {"term", logic.print(t)}});
  s["witnesses"] = Json::array();
  for (const auto& [n, t] : st.witness_values())
    s["witnesses"].push_back(Json{{"var", n}, {"term", logic.print(t)}});
  s["done"] = st.done();
  return s;
}

struct ProtocolServer::Session {
  std::mutex mu;
  std::string id;
  LogicSpec logic;
  std::vector<GoalState> history;

  Session(std::string i, LogicSpec l) : id(std::move(i)), logic(std::move(l)) {}

  std::string status() const {
    if (history.empty()) return "idle";
    return history.back().done() ? "done" : "proving";
  }
};

ProtocolServer::ProtocolServer() = default;
ProtocolServer::~ProtocolServer() = default;

std::shared_ptr<ProtocolServer::Session> ProtocolServer::find(const std::string& id) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

namespace {

struct RequestError {
  std::string code;
  std::string detail;
};

const Json& field(const Json& req, const char* name) {
  if (!req.contains(name)) throw RequestError{"bad_request", std::string("missing field '") + name + "'"};
  return req.at(name);
}

std::string string_field(const Json& req, const char* name) {
  const Json& v = field(req, name);
  if (!v.is_string()) throw RequestError{"bad_request", std::string("'") + name + "' must be a string"};
  return v.get<std::string>();
}

std::vector<std::string> string_list(const Json& req, const char* name) {
  std::vector<std::string> out;
  if (!req.contains(name) || req.at(name).is_null()) return out;
  const Json& v = req.at(name);
  if (!v.is_array()) throw RequestError{"bad_request", std::string("'") + name + "' must be a list"};
  for (const auto& e : v) {
    if (!e.is_string()) throw RequestError{"bad_request", std::string("'") + name + "' must hold strings"};
    out.push_back(e.get<std::string>());
  }
  return out;
}

Json rule_json(const LogicSpec& logic, const Rule& r) {
  Json prem = Json::array();
  for (const auto& p : r.premises) prem.push_back(logic.print(p));
  return Json{{"name", r.name},
              {"premises", prem},
              {"conclusion", logic.print(r.conclusion)},
              {"section", r.section}};
}

}  // namespace

Json ProtocolServer::handle(const Json& req) {
  Json resp;
  std::string cmd;
  std::optional<std::string> sid;
  try {
    if (!req.is_object()) throw RequestError{"bad_request", "request must be a JSON object"};
    cmd = string_field(req, "cmd");
    if (req.contains("session") && req.at("session").is_string()) sid = req.at("session").get<std::string>();

    if (cmd == "create_session") {
      std::string spec = string_field(req, "logic");
      LogicSpec logic = load_logic(spec);
      std::string id;
      {
        std::lock_guard<std::mutex> lock(mu_);
        id = "s" + std::to_string(next_id_++);
        sessions_.emplace(id, std::make_shared<Session>(id, logic));
      }
      sid = id;
      resp["ok"] = true;
      resp["logic"] = logic.name();
      resp["rules"] = Json::array();
      for (const auto& r : logic.rules()) resp["rules"].push_back(rule_json(logic, r));
    } else {
      if (!sid) throw RequestError{"bad_request", "missing field 'session'"};
      auto session = find(*sid);
      if (!session) throw RequestError{"unknown_session", "no session '" + *sid + "'"};
      std::lock_guard<std::mutex> lock(session->mu);
      const LogicSpec& logic = session->logic;
      auto& history = session->history;
      auto need_goal = [&] {
        if (history.empty()) throw RequestError{"no_goal", "no goal set in this session"};
      };
      if (cmd == "set_goal") {
        VarScope scope;
        std::vector<Judgment> hyps;
        for (const auto& h : string_list(req, "hyps")) hyps.push_back(logic.syntax().parse_judgment(h, &scope));
        Judgment target = logic.syntax().parse_judgment(string_field(req, "goal"), &scope);
        std::vector<std::string> witnesses = string_list(req, "exists");
        GoalState st = set_goal(logic, hyps, target, witnesses);
        history = {st};
        if (!witnesses.empty()) history.push_back(introduce_metas(st, 0, witnesses));
        resp["ok"] = true;
        resp["state"] = state_json(logic, history.back());
      } else if (cmd == "apply_tactic") {
        need_goal();
        std::size_t sub = 0;
        if (req.contains("subgoal")) {
          const Json& v = req.at("subgoal");
          if (!v.is_number_integer() || v.get<long long>() < 0)
            throw RequestError{"bad_request", "'subgoal' must be a non-negative integer"};
          sub = v.get<std::size_t>();
        }
        if (sub >= history.back().subgoals().size())
          throw RequestError{"bad_index", "subgoal " + std::to_string(sub) + " does not exist"};
        Etactic tac = parse_tactic(string_field(req, "tactic"));
        TacticResult r = tac(logic, history.back(), sub);
        if (!r.ok()) throw RequestError{"no_match", r.message};
        history.push_back(std::move(*r.state));
        resp["ok"] = true;
        resp["state"] = state_json(logic, history.back());
      } else if (cmd == "undo") {
        need_goal();
        if (history.size() < 2) throw RequestError{"nothing_to_undo", "already at the initial state"};
        history = undo(std::move(history));
        resp["ok"] = true;
        resp["state"] = state_json(logic, history.back());
      } else if (cmd == "state") {
        need_goal();
        resp["ok"] = true;
        resp["state"] = state_json(logic, history.back());
        resp["history"] = history.size();
        resp["status"] = session->status();
      } else if (cmd == "extract") {
        need_goal();
        if (!history.back().done())
          throw RequestError{"not_done", std::to_string(history.back().subgoals().size()) + " open subgoal(s)"};
        Theorem thm = qed(history.back());
        resp["ok"] = true;
        resp["theorem"] = logic.print(thm.statement());
        resp["witnesses"] = Json::array();
        for (const auto& [n, t] : thm.witness_values())
          resp["witnesses"].push_back(Json{{"var", n}, {"term", logic.print(t)}});
      } else if (cmd == "replay") {
        need_goal();
        if (!history.back().done())
          throw RequestError{"not_done", std::to_string(history.back().subgoals().size()) + " open subgoal(s)"};
        Theorem thm = qed(history.back());
        ReplayResult rr = replay(logic, thm);
        resp["ok"] = true;
        resp["replay"] = rr.ok;
        if (!rr.ok) resp["diagnostic"] = rr.diagnostic;
        resp["trace"] = serialize(logic, thm);
      } else {
        throw RequestError{"unknown_command", "unknown command '" + cmd + "'"};
      }
    }
  } catch (const RequestError& e) {
    resp = Json{{"ok", false}, {"error", e.code}, {"detail", e.detail}};
  } catch (const UnknownSymbol& e) {
    std::string code = e.kind() == "rule" ? "unknown_rule" : "unknown_symbol";
    resp = Json{{"ok", false}, {"error", code}, {"detail", e.what()}};
  } catch (const ParseError& e) {
    resp = Json{{"ok", false}, {"error", "parse_error"}, {"detail", e.what()}};
  } catch (const SortError& e) {
    resp = Json{{"ok", false}, {"error", "sort_error"}, {"detail", e.what()}};
  } catch (const Error& e) {
    resp = Json{{"ok", false}, {"error", "failed"}, {"detail", e.what()}};
  } catch (const std::exception& e) {
    resp = Json{{"ok", false}, {"error", "internal"}, {"detail", e.what()}};
  }
  if (sid) resp["session"] = *sid;
  if (req.is_object() && req.contains("seq")) {
    resp["seq"] = req.at("seq");
  } else {
    std::lock_guard<std::mutex> lock(mu_);
    resp["seq"] = ++seq_;
  }
  return resp;
}

std::string ProtocolServer::handle_line(const std::string& line) {
  Json req;
  try {
    req = Json::parse(line);
  } catch (const Json::parse_error& e) {
    Json resp{{"ok", false}, {"error", "bad_json"}, {"detail", e.what()}};
    std::lock_guard<std::mutex> lock(mu_);
    resp["seq"] = ++seq_;
    return resp.dump();
  }
  return handle(req).dump();
}

void ProtocolServer::serve_stream(std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out << handle_line(line) << "\n" << std::flush;
  }
}

}  // namespace seqcraft
