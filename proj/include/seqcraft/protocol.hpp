#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "json.hpp"
#include "seqcraft/kernel.hpp"
#include "seqcraft/logic.hpp"

namespace seqcraft {

using Json = nlohmann::ordered_json;

/// State object of the protocol: subgoals, metas, inst, done (plus the
/// current witness values).
Json state_json(const LogicSpec& logic, const GoalState& st);

/// Session table and request dispatch for the newline-delimited JSON
/// protocol. Safe to call from several threads; requests on one session are
/// serialized.
class ProtocolServer {
 public:
  ProtocolServer();
  ~ProtocolServer();

  Json handle(const Json& request);
  /// Parses one line and returns the response line (without newline).
  std::string handle_line(const std::string& line);

  /// Reads requests from `in` until EOF, writing one response per line.
  void serve_stream(std::istream& in, std::ostream& out);

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id);

  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
  std::uint64_t seq_ = 0;
};

/// Accepts connections on 127.0.0.1:`port` (0 picks a free port), one
/// thread per connection. `on_ready` receives the bound port. Blocks until
/// `stop` is set (checked between accepts) or the socket fails.
int serve_tcp(ProtocolServer& server, int port, const std::function<void(int)>& on_ready,
              const std::atomic<bool>* stop = nullptr);

}  // namespace seqcraft
