#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "evstl/scenario.hpp"
#include "evstl/simulation.hpp"

namespace evstl {

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ClientMessage {
  enum class Type { SetEvents, Start, Pause, Reset };
  Type type = Type::Start;
  std::set<std::string> events;
};

/// Validates one client text frame. Unknown types, non-string events and
/// undeclared event names are rejected.
ClientMessage parse_client_message(const std::string& text, const Declarations& decls);

std::string state_frame(const SampleRecord& record, const std::vector<SafeSet>& safe_sets);
std::string feedback_frame(const FeedbackEvent& event);
std::string status_frame(TerminalStatus status, bool running);
std::string error_frame(const std::string& message);
std::string ack_frame(const std::set<std::string>& events);

struct ServeOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8765;  // 0 picks a free port
  double speed = 1.0;         // simulated seconds per wall second
  bool autostart = true;
  std::ostream* log = nullptr;  // changepoints and terminal status
};

/// Event latched by a set_events message, stamped with the sample clock.
struct Changepoint {
  double wall = 0.0;
  double sim_time = 0.0;
  std::set<std::string> events;
};

/// Real-time host for an interactive scenario. The network runs on one
/// thread and the sample loop on another; they exchange only messages.
class Server {
 public:
  Server(const Scenario& scenario, const CompiledSpec& compiled, ServeOptions options);
  ~Server();

  /// Binds and starts both threads; returns the bound port.
  std::uint16_t start();
  void stop();

  std::vector<Changepoint> changepoints() const;
  RunLog log() const;

 private:
  friend class Session;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace evstl
