#include "modgraph/service.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "modgraph/flow_histogram.hpp"
#include "modgraph/geometry.hpp"
#include "modgraph/ownership.hpp"

namespace modgraph {

namespace {

using nlohmann::json;

std::string error_line(const char* code, const std::string& message) {
  return json{{"ok", false}, {"code", code}, {"error", message}}.dump();
}

std::string descriptor_line(const Eigen::ArrayXd& bins, const FlowDescriptor& d) {
  json bins_json = json::array();
  for (Eigen::Index i = 0; i < bins.size(); ++i) {
    bins_json.push_back(bins[i]);
  }
  json out{{"ok", true},
           {"bins", std::move(bins_json)},
           {"flow", d.magnitude},
           {"resultant", d.resultant_length},
           {"entropy", d.entropy}};
  if (d.dominant_direction) {
    out["direction"] = *d.dominant_direction;
  } else {
    out["direction"] = nullptr;
  }
  return out.dump();
}

}  // namespace

std::string handle_request_line(const BuiltModel& model, const std::string& line) {
  const json req = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (req.is_discarded()) {
    return error_line("parse", "request is not valid JSON");
  }
  if (!req.is_object() || !req.contains("query") || !req["query"].is_string()) {
    return error_line("bad_request", "missing string field 'query'");
  }
  const std::string query = req["query"].get<std::string>();
  if (query != "predict" && query != "descriptors") {
    return error_line("bad_request", "unknown query '" + query + "'");
  }

  const bool by_node = req.contains("node");
  const bool by_position =
      req.contains("x") || req.contains("y") || req.contains("z");
  if (by_node == by_position) {
    return error_line("bad_request",
                      "target must be either 'node' or a position 'x'/'y'");
  }

  NodeId node_id = 0;
  Position position = Position::Zero();
  if (by_node) {
    if (!req["node"].is_number_integer()) {
      return error_line("bad_request", "'node' must be an integer id");
    }
    node_id = req["node"].get<NodeId>();
  } else {
    if (!req.contains("x") || !req.contains("y") || !req["x"].is_number() ||
        !req["y"].is_number()) {
      return error_line("bad_request", "position queries need numeric 'x' and 'y'");
    }
    if (req.contains("z") && !req["z"].is_number()) {
      return error_line("bad_request", "'z' must be numeric");
    }
    position = Position{req["x"].get<double>(), req["y"].get<double>(),
                        req.value("z", 0.0)};
    if (!position.allFinite()) {
      return error_line("bad_request", "position must be finite");
    }
  }

  if (query == "predict") {
    if (!req.contains("t") || !req["t"].is_number()) {
      return error_line("bad_request", "predict queries need numeric 't'");
    }
    const double t = req["t"].get<double>();
    if (!std::isfinite(t)) {
      return error_line("bad_request", "'t' must be finite");
    }
    Eigen::ArrayXd bins;
    if (by_node) {
      if (!model.graph.has_node(node_id)) {
        return error_line("not_found", "no node " + std::to_string(node_id));
      }
      // Node-level prediction is the sum over the cells the node owns, same
      // as the planner's view of predicted dynamics.
      bins = Eigen::ArrayXd::Zero(model.temporal.bins());
      bool any = false;
      for (const CellKey& key : model.graph.node(node_id).bound_keys) {
        if (model.temporal.has_location(key)) {
          bins += model.temporal.predict_location(key, t);
          any = true;
        }
      }
      if (!any) {
        return error_line("not_found", "node " + std::to_string(node_id) +
                                           " has no temporal channels");
      }
    } else {
      const CellKey key = hash_key(position, model.params.delta);
      if (!model.temporal.has_location(key)) {
        return error_line("not_found", "no temporal channels at this position");
      }
      bins = model.temporal.predict_location(key, t);
    }
    return descriptor_line(bins, descriptor_of_values(bins));
  }

  // Historical descriptors: bound cells answer through their owning node,
  // everything else through the hash map.
  const DirectionalHistogram* hist = nullptr;
  if (by_node) {
    if (!model.graph.has_node(node_id)) {
      return error_line("not_found", "no node " + std::to_string(node_id));
    }
    const NavNode& node = model.graph.node(node_id);
    if (!node.owned_dynamics) {
      return error_line("not_found",
                        "node " + std::to_string(node_id) + " owns no dynamics");
    }
    hist = &*node.owned_dynamics;
  } else {
    const CellKey key = hash_key(position, model.params.delta);
    if (const auto owner = owner_of(model.ownership, key)) {
      const NavNode& node = model.graph.node(*owner);
      if (!node.owned_dynamics) {
        return error_line("not_found", "bound owner has no dynamics");
      }
      hist = &*node.owned_dynamics;
    } else if (const HashCell* cell = model.map.lookup(key)) {
      hist = &cell->histogram;
    } else {
      return error_line("not_found", "no recorded dynamics at this position");
    }
  }
  return descriptor_line(hist->counts(), descriptor_of(*hist));
}

void serve_stdio(const BuiltModel& model, std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    out << handle_request_line(model, line) << '\n';
    out.flush();
  }
}

namespace {

bool send_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n =
        ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) {
      return false;
    }
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace

LineProtocolServer::~LineProtocolServer() { stop(); }

std::uint16_t LineProtocolServer::start(std::uint16_t port) {
  if (running_.load()) {
    throw std::logic_error("server already running");
  }
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) {
    throw std::runtime_error("socket() failed");
  }
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(listen_fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) < 0 ||
      ::listen(listen_fd_, 16) < 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw std::runtime_error("cannot listen on 127.0.0.1:" + std::to_string(port));
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  running_.store(true);
  accept_thread_ = std::thread(&LineProtocolServer::accept_loop, this);
  return ntohs(addr.sin_port);
}

void LineProtocolServer::stop() {
  running_.store(false);
  if (accept_thread_.joinable()) {
    accept_thread_.join();
  }
  if (listen_fd_ >= 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  {
    std::lock_guard<std::mutex> lock(mutex_);
    for (int fd : client_fds_) {
      if (fd >= 0) {
        ::shutdown(fd, SHUT_RDWR);
      }
    }
  }
  for (std::thread& t : client_threads_) {
    if (t.joinable()) {
      t.join();
    }
  }
  client_threads_.clear();
  client_fds_.clear();
}

void LineProtocolServer::accept_loop() {
  // Polling with a short timeout keeps shutdown simple: stop() just clears
  // the flag and joins, no cross-thread fd tricks on the listening socket.
  while (running_.load()) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, 100);
    if (rc <= 0) {
      continue;
    }
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      continue;
    }
    std::lock_guard<std::mutex> lock(mutex_);
    client_fds_.push_back(fd);
    client_threads_.emplace_back(&LineProtocolServer::client_loop, this, fd);
  }
}

void LineProtocolServer::client_loop(int fd) {
  std::string pending;
  char buf[4096];
  bool alive = true;
  while (alive) {
    const ssize_t n = ::recv(fd, buf, sizeof(buf), 0);
    if (n <= 0) {
      break;
    }
    pending.append(buf, static_cast<std::size_t>(n));
    std::size_t start = 0;
    for (;;) {
      const auto nl = pending.find('\n', start);
      if (nl == std::string::npos) {
        break;
      }
      std::string line = pending.substr(start, nl - start);
      start = nl + 1;
      if (!line.empty() && line.back() == '\r') {
        line.pop_back();
      }
      std::string response = handle_request_line(model_, line);
      response.push_back('\n');
      if (!send_all(fd, response)) {
        alive = false;
        break;
      }
    }
    pending.erase(0, start);
  }
  ::close(fd);
  std::lock_guard<std::mutex> lock(mutex_);
  for (int& cfd : client_fds_) {
    if (cfd == fd) {
      cfd = -1;
      break;
    }
  }
}

}  // namespace modgraph
