#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace modgraph {

/// Requested entity (cell, node, channel) does not exist.
struct NotFoundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operation needs at least one accumulated observation.
struct EmptyHistogramError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Position falls outside a bounded (dense) grid.
struct OutOfBoundsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Goal not reachable from start under the current topology.
struct NoPathError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two descriptor fields share no populated cells.
struct EmptyOverlapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Statistic is undefined for the given inputs (degenerate denominator).
struct UndefinedResultError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Internal consistency contract was broken (e.g. a redirect entry
/// pointing at a node that no longer exists).
struct ProtocolViolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the 1-based line number.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t line_number)
      : std::runtime_error(what + " (line " + std::to_string(line_number) + ")"),
        line(line_number) {}
  std::size_t line;
};

}  // namespace modgraph
