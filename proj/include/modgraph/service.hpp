#pragma once

#include <atomic>
#include <cstdint>
#include <istream>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "modgraph/pipeline.hpp"

namespace modgraph {

// Answers one newline-delimited JSON request against a loaded model and
// returns the one-line JSON response (without trailing newline). Never throws
// on bad input: malformed or unanswerable requests yield {"ok":false,...}
// with a code of "parse", "bad_request", or "not_found".
//
// Requests:
//   {"query":"predict","x":..,"y":..[,"z":..],"t":..}
//   {"query":"predict","node":<id>,"t":..}
//   {"query":"descriptors","x":..,"y":..[,"z":..]}
//   {"query":"descriptors","node":<id>}
// Success responses carry "bins" (per-bin vector), "flow", "direction" (or
// null), "resultant", and "entropy".
std::string handle_request_line(const BuiltModel& model, const std::string& line);

// Request loop over plain streams: reads requests from `in` until EOF and
// writes one response line per request to `out`. Backs `serve --stdio`.
void serve_stdio(const BuiltModel& model, std::istream& in, std::ostream& out);

// Loopback TCP front-end for the same line protocol, one thread per client.
// The model is read-only after load, so handlers share it without locking.
class LineProtocolServer {
 public:
  explicit LineProtocolServer(const BuiltModel& model) : model_(model) {}
  ~LineProtocolServer();

  LineProtocolServer(const LineProtocolServer&) = delete;
  LineProtocolServer& operator=(const LineProtocolServer&) = delete;

  // Binds 127.0.0.1:port (0 picks a free port), starts the accept thread,
  // and returns the bound port.
  std::uint16_t start(std::uint16_t port);
  void stop();
  bool running() const { return running_.load(); }

 private:
  void accept_loop();
  void client_loop(int fd);

  const BuiltModel& model_;
  int listen_fd_ = -1;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;
  std::mutex mutex_;
  std::vector<int> client_fds_;
  std::vector<std::thread> client_threads_;
};

}  // namespace modgraph
