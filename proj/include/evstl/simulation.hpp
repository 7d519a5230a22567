#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "evstl/controller.hpp"
#include "evstl/feedback.hpp"
#include "evstl/planner.hpp"
#include "evstl/scenario.hpp"

namespace evstl {

enum class TerminalStatus { Running, HorizonAccepting, StoppedFatal, HorizonNonaccepting };

std::string to_string(TerminalStatus status);
TerminalStatus terminal_status_from_string(const std::string& text);

struct SampleRecord {
  double t = 0.0;
  Eigen::VectorXd x;
  std::set<std::string> sigma;
  std::string state;
  std::vector<std::string> active_props;
  std::vector<Eigen::VectorXd> u;
  std::vector<std::optional<double>> cbf;  // combined value per robot
  std::vector<FeedbackEvent> feedback;
  double compute_seconds = 0.0;
};

struct RunLog {
  double dt = 0.1;
  std::vector<SampleRecord> records;
  TerminalStatus status = TerminalStatus::Running;
  std::vector<FeedbackEvent> apriori;

  /// States and event sets at the recorded samples.
  Trace trace() const;
};

/// Region where an active barrier is nonnegative, for display.
struct SafeSet {
  std::string prop;
  std::string kind;  // "inside" or "outside"
  std::vector<std::size_t> dims;
  std::vector<double> center;  // empty for pair kinds: centered on the partner
  double radius = 0.0;
};

/// Sample loop: plan, arm barriers, check reachability, solve one QP per
/// robot, integrate. One call to step() per sample.
class Simulation {
 public:
  Simulation(const Scenario& scenario, const CompiledSpec& compiled);

  /// Processes sample k at t = k dt with the sensed events and advances x.
  const SampleRecord& step(const std::set<std::string>& sigma);
  bool done() const { return status_ != TerminalStatus::Running; }
  TerminalStatus status() const { return status_; }

  std::size_t sample() const { return k_; }
  double time() const { return static_cast<double>(k_) * scenario_.dt; }
  const Eigen::VectorXd& state() const { return x_; }
  const Planner& planner() const { return planner_; }
  const CbfRegistry& registry() const { return registry_; }
  const RunLog& log() const { return log_; }
  std::string buchi_state() const;

  std::vector<SafeSet> safe_sets() const;

  void reset();

 private:
  void stop(SampleRecord& rec, FeedbackEvent event);

  const Scenario& scenario_;
  const CompiledSpec& compiled_;
  Planner planner_;
  CbfRegistry registry_;
  Eigen::VectorXd x_;
  std::size_t k_ = 0;
  std::optional<std::set<std::string>> last_sigma_;
  TerminalStatus status_ = TerminalStatus::Running;
  RunLog log_;
};

/// Runs a scripted scenario to the horizon or the first fatal event.
RunLog run(const Scenario& scenario, const CompiledSpec& compiled);

/// Continues the last recorded state with u = 0 up to the horizon, events
/// latched at their last value.
Trace zero_control_extension(const RunLog& log, const Scenario& scenario);

std::string record_json(const SampleRecord& record);
std::string terminal_json(const RunLog& log);
void write_jsonl(const RunLog& log, std::ostream& out);
RunLog read_jsonl(std::istream& in);
void write_csv(const RunLog& log, const Scenario& scenario, std::ostream& out);

}  // namespace evstl
