#include "support.hpp"
#include "doctest.h"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <future>
#include <sstream>
#include <thread>

#include "seqcraft/protocol.hpp"
#include "seqcraft/script.hpp"

using namespace seqcraft;
using namespace seqcraft::testing;

namespace {

// Goal list in the rendering used by scripts and the REPL.
std::string listing(const Json& state) {
  std::string out;
  std::size_t i = 1;
  for (const auto& g : state.at("subgoals")) out += " " + std::to_string(i++) + ". " + g.at("target").get<std::string>() + "\n";
  if (out.empty()) out = "No subgoals.\n";
  return out;
}

std::vector<std::string> script_transcript(const LogicSpec& logic, const std::string& statement) {
  std::string script = "theorem T : " + statement + "\n";
  for (const auto& t : times_comm_steps()) script += t + "\n";
  script += "qed\n";
  std::ostringstream out, err;
  ScriptOutcome o = run_script(logic, script, out, err);
  REQUIRE(o.exit_code == 0);
  return o.transcripts.at(0);
}

struct Client {
  ProtocolServer server;
  std::string session;

  Json call(Json req) {
    if (!session.empty() && !req.contains("session")) req["session"] = session;
    return server.handle(req);
  }

  void open(const std::string& logic) {
    Json r = server.handle(Json{{"cmd", "create_session"}, {"logic", logic}});
    REQUIRE(r.at("ok") == true);
    session = r.at("session").get<std::string>();
  }
};

int connect_local(int port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(fd);
    return -1;
  }
  return fd;
}

std::string exchange(int fd, const std::string& line) {
  std::string msg = line + "\n";
  if (::send(fd, msg.data(), msg.size(), 0) < 0) return {};
  std::string got;
  char c;
  while (::recv(fd, &c, 1, 0) == 1 && c != '\n') got += c;
  return got;
}

}  // namespace

TEST_SUITE("protocol") {
  TEST_CASE("create_session lists the rules") {
    ProtocolServer server;
    Json r = server.handle(Json{{"cmd", "create_session"}, {"logic", "simple_prop"}, {"seq", 5}});
    CHECK(r.at("ok") == true);
    CHECK(r.at("seq") == 5);
    CHECK(r.at("logic") == "simple_prop");
    CHECK(r.at("rules").size() == 9);
    CHECK(r.at("rules")[6].at("name") == "R×");
    CHECK(r.at("rules")[6].at("conclusion") == "Γ ⊎ Δ ⊢ A × B");
  }

  TEST_CASE("the commutativity proof over the protocol matches the script") {
    std::vector<std::string> expected = script_transcript(simple_prop(), "∅ ⊢ X × Y → Y × X");
    Client c;
    c.open("simple_prop");
    Json r = c.call(Json{{"cmd", "set_goal"}, {"goal", "∅ |- (X * Y) --> (Y * X)"}});
    REQUIRE(r.at("ok") == true);
    std::vector<std::string> got{listing(r.at("state"))};
    for (const auto& t : times_comm_steps()) {
      r = c.call(Json{{"cmd", "apply_tactic"}, {"tactic", t}});
      REQUIRE(r.at("ok") == true);
      got.push_back(listing(r.at("state")));
    }
    CHECK(got == expected);
    CHECK(r.at("state").at("done") == true);
    Json rep = c.call(Json{{"cmd", "replay"}});
    CHECK(rep.at("replay") == true);
  }

  TEST_CASE("undo returns to the previous state") {
    std::vector<std::string> expected = script_transcript(simple_prop(), "∅ ⊢ X × Y → Y × X");
    Client c;
    c.open("simple_prop");
    c.call(Json{{"cmd", "set_goal"}, {"goal", "∅ ⊢ X × Y → Y × X"}});
    for (std::size_t k = 0; k < 4; ++k) c.call(Json{{"cmd", "apply_tactic"}, {"tactic", times_comm_steps()[k]}});
    Json r = c.call(Json{{"cmd", "undo"}});
    REQUIRE(r.at("ok") == true);
    CHECK(listing(r.at("state")) == expected[3]);
    r = c.call(Json{{"cmd", "state"}});
    CHECK(r.at("history") == 4);
    CHECK(r.at("status") == "proving");
    for (int k = 0; k < 3; ++k) c.call(Json{{"cmd", "undo"}});
    r = c.call(Json{{"cmd", "undo"}});
    CHECK(r.at("ok") == false);
    CHECK(r.at("error") == "nothing_to_undo");
  }

  TEST_CASE("apply_tactic on a chosen subgoal") {
    Client c;
    c.open("simple_prop");
    c.call(Json{{"cmd", "set_goal"}, {"goal", "{X} ⊎ {Y} ⊢ X × Y"}});
    c.call(Json{{"cmd", "apply_tactic"}, {"tactic", "ruleseq R×"}});
    Json r = c.call(Json{{"cmd", "apply_tactic"}, {"tactic", "ruleseq Ax"}, {"subgoal", 1}});
    REQUIRE(r.at("ok") == true);
    CHECK(r.at("state").at("subgoals").size() == 1);
    r = c.call(Json{{"cmd", "apply_tactic"}, {"tactic", "ruleseq Ax"}, {"subgoal", 4}});
    CHECK(r.at("error") == "bad_index");
  }

  TEST_CASE("error codes") {
    Client c;
    c.open("simple_prop");
    Json r = c.call(Json{{"cmd", "apply_tactic"}, {"tactic", "ruleseq Ax"}});
    CHECK(r.at("error") == "no_goal");
    c.call(Json{{"cmd", "set_goal"}, {"goal", "∅ ⊢ X"}});
    CHECK(c.call(Json{{"cmd", "apply_tactic"}, {"tactic", "ruleseq Nope"}}).at("error") == "unknown_rule");
    CHECK(c.call(Json{{"cmd", "apply_tactic"}, {"tactic", "ruleseq Ax"}}).at("error") == "no_match");
    CHECK(c.call(Json{{"cmd", "set_goal"}, {"goal", "∅ ⊢ X ×"}}).at("error") == "parse_error");
    CHECK(c.call(Json{{"cmd", "extract"}}).at("error") == "not_done");
    CHECK(c.call(Json{{"cmd", "frobnicate"}}).at("error") == "unknown_command");
    CHECK(c.server.handle(Json{{"cmd", "state"}, {"session", "s999"}}).at("error") == "unknown_session");
    CHECK(c.server.handle(Json{{"cmd", "state"}}).at("error") == "bad_request");
    CHECK(c.server.handle(Json::array()).at("error") == "bad_request");
    Json bad = Json::parse(c.server.handle_line("{not json"));
    CHECK(bad.at("ok") == false);
    CHECK(bad.at("error") == "bad_json");
    CHECK(bad.contains("seq"));
  }

  TEST_CASE("extract shows the constructed witness") {
    Client c;
    c.open("curry_howard");
    Json r = c.call(Json{{"cmd", "set_goal"}, {"goal", "∅ ⊢ f : X × Y → Y × X"}, {"exists", {"f"}}});
    REQUIRE(r.at("ok") == true);
    CHECK(r.at("state").at("metas") == Json::array({"f"}));
    for (const auto& t : times_comm_steps()) {
      r = c.call(Json{{"cmd", "apply_tactic"}, {"tactic", t}});
      REQUIRE(r.at("ok") == true);
    }
    Json ex = c.call(Json{{"cmd", "extract"}});
    REQUIRE(ex.at("ok") == true);
    CHECK(ex.at("theorem") == "∅ ⊢ λx.(snd(Var x), fst(Var x)) : X × Y → Y × X");
    CHECK(ex.at("witnesses")[0].at("term") == "λx.(snd(Var x), fst(Var x))");
  }

  TEST_CASE("state_json carries the instantiation") {
    const LogicSpec& ch = curry_howard();
    GoalState st = introduce_metas(set_goal(ch, {}, J(ch, "∅ ⊢ f : X × Y → Y × X"), {"f"}), 0, {"f"});
    TacticResult r = ruleseq("R→")(ch, st, 0);
    REQUIRE(r.ok());
    Json s = state_json(ch, *r.state);
    CHECK(s.at("done") == false);
    REQUIRE(s.at("inst").size() == 1);
    CHECK(s.at("inst")[0].at("var") == "f");
    CHECK(s.at("inst")[0].at("term").get<std::string>().rfind("λ", 0) == 0);
  }

  TEST_CASE("serve_stream answers one line per request") {
    ProtocolServer server;
    std::istringstream in(R"({"cmd":"create_session","logic":"ill","seq":1})"
                          "\n\n"
                          R"({"cmd":"set_goal","session":"s1","goal":"{a ⊗ b} ⊢ b ⊗ a","seq":2})"
                          "\n"
                          R"({"cmd":"apply_tactic","session":"s1","tactic":"auto_ll 8","seq":3})"
                          "\n");
    std::ostringstream out;
    server.serve_stream(in, out);
    std::istringstream lines(out.str());
    std::vector<Json> resp;
    for (std::string l; std::getline(lines, l);) resp.push_back(Json::parse(l));
    REQUIRE(resp.size() == 3);
    CHECK(resp[2].at("seq") == 3);
    CHECK(resp[2].at("state").at("done") == true);
  }

  TEST_CASE("sessions are independent") {
    ProtocolServer server;
    std::string a = server.handle(Json{{"cmd", "create_session"}, {"logic", "simple_prop"}}).at("session");
    std::string b = server.handle(Json{{"cmd", "create_session"}, {"logic", "simple_prop"}}).at("session");
    CHECK(a != b);
    server.handle(Json{{"cmd", "set_goal"}, {"session", a}, {"goal", "∅ ⊢ X → X"}});
    CHECK(server.handle(Json{{"cmd", "state"}, {"session", b}}).at("error") == "no_goal");
  }

  TEST_CASE("concurrent sessions") {
    ProtocolServer server;
    std::vector<std::future<bool>> jobs;
    for (int i = 0; i < 4; ++i) {
      jobs.push_back(std::async(std::launch::async, [&server] {
        std::string s = server.handle(Json{{"cmd", "create_session"}, {"logic", "simple_prop"}}).at("session");
        server.handle(Json{{"cmd", "set_goal"}, {"session", s}, {"goal", "∅ ⊢ X × Y → Y × X"}});
        Json r;
        for (const auto& t : times_comm_steps())
          r = server.handle(Json{{"cmd", "apply_tactic"}, {"session", s}, {"tactic", t}});
        return r.at("state").at("done") == true;
      }));
    }
    for (auto& j : jobs) CHECK(j.get());
  }

  TEST_CASE("TCP transport") {
    ProtocolServer server;
    std::atomic<bool> stop{false};
    std::promise<int> ready;
    std::future<int> port = ready.get_future();
    std::thread t([&] { serve_tcp(server, 0, [&](int p) { ready.set_value(p); }, &stop); });
    int p = port.get();
    REQUIRE(p > 0);
    int fd = connect_local(p);
    REQUIRE(fd >= 0);
    Json r = Json::parse(exchange(fd, R"({"cmd":"create_session","logic":"simple_prop","seq":1})"));
    CHECK(r.at("ok") == true);
    r = Json::parse(exchange(fd, R"({"cmd":"set_goal","session":"s1","goal":"{X} ⊢ X","seq":2})"));
    CHECK(r.at("ok") == true);
    r = Json::parse(exchange(fd, R"({"cmd":"apply_tactic","session":"s1","tactic":"ruleseq Ax","seq":3})"));
    CHECK(r.at("state").at("done") == true);
    ::close(fd);
    stop = true;
    // wake the accept loop
    int poke = connect_local(p);
    if (poke >= 0) ::close(poke);
    t.join();
  }
}
