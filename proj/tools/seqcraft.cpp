// seqcraft: run proof scripts, prove interactively, or serve the JSON protocol.
#include <unistd.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "seqcraft/protocol.hpp"
#include "seqcraft/script.hpp"
#include "seqcraft/stdlib.hpp"

namespace {

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path);
  if (!in) return false;
  std::stringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequent calculus proofs over user-defined logics"};
  app.require_subcommand(1);

  std::string logic_arg, script_path;
  auto* prove = app.add_subcommand("prove", "Run a proof script");
  prove->add_option("logic", logic_arg, "Shipped logic name or .logic file")->required();
  prove->add_option("script", script_path, "Proof script")->required();

  auto* repl = app.add_subcommand("repl", "Interactive proving");
  repl->add_option("logic", logic_arg, "Shipped logic name or .logic file")->required();

  int port = 7411;
  bool use_stdio = false;
  auto* serve = app.add_subcommand("serve", "Serve the JSON protocol");
  serve->add_option("--port", port, "TCP port on 127.0.0.1 (0 picks one)");
  serve->add_flag("--stdio", use_stdio, "Use standard input/output instead of a socket");

  auto* logics = app.add_subcommand("logics", "List or print the shipped logics");
  std::string show;
  logics->add_option("name", show, "Print this logic's definition");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*prove) {
      seqcraft::LogicSpec logic = seqcraft::load_logic(logic_arg);
      std::string script;
      if (!read_file(script_path, script)) {
        std::cerr << "error: cannot read " << script_path << "\n";
        return 2;
      }
      return seqcraft::run_script(logic, script, std::cout, std::cerr).exit_code;
    }
    if (*repl) {
      seqcraft::LogicSpec logic = seqcraft::load_logic(logic_arg);
      seqcraft::run_repl(logic, std::cin, std::cout, isatty(0));
      return 0;
    }
    if (*serve) {
      seqcraft::ProtocolServer server;
      if (use_stdio) {
        server.serve_stream(std::cin, std::cout);
        return 0;
      }
      seqcraft::serve_tcp(server, port, [](int p) {
        std::cerr << "listening on 127.0.0.1:" << p << std::endl;
      });
      return 0;
    }
    if (*logics) {
      if (show.empty()) {
        for (const auto& n : seqcraft::builtin_logic_names()) std::cout << n << "\n";
        return 0;
      }
      auto src = seqcraft::builtin_logic_source(show);
      if (!src) {
        std::cerr << "error: no shipped logic '" << show << "'\n";
        return 2;
      }
      std::cout << *src;
      return 0;
    }
  } catch (const seqcraft::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
