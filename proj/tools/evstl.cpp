#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include "evstl/buchi.hpp"
#include "evstl/planner.hpp"
#include "evstl/scenario.hpp"
#include "evstl/server.hpp"
#include "evstl/simulation.hpp"

using namespace evstl;

namespace {

volatile std::sig_atomic_t interrupted = 0;

void print_feedback(const FeedbackEvent& e) {
  std::printf("%s %s", to_string(e.severity).c_str(), to_string(e.kind).c_str());
  if (!e.predicates.empty()) {
    std::printf(" {");
    for (std::size_t i = 0; i < e.predicates.size(); ++i) std::printf("%s%s", i ? ", " : "", e.predicates[i].c_str());
    std::printf("}");
  }
  if (!e.location.empty()) std::printf(" at %s", e.location.c_str());
  if (e.time) std::printf(" t=%.2f", *e.time);
  if (!e.events.empty()) {
    std::printf(" events:");
    for (const auto& ev : e.events) std::printf(" %s", ev.c_str());
  }
  if (!e.detail.empty()) std::printf(" (%s)", e.detail.c_str());
  std::printf("\n");
}

void summary(const CompiledSpec& c) {
  std::printf("ltl: %s\n", to_string(c.abstraction.ltl).c_str());
  std::printf("templates: %zu  observed: %zu\n", c.templates.size(), c.abstraction.observed.size());
  std::printf("automaton: %zu states, %zu transitions\n", c.automaton.size(), c.automaton.transitions().size());
  std::printf("compile: %.3f s\n", c.compile_seconds);
}

int cmd_compile(const std::string& path, bool dump_buchi, const std::string& out) {
  Scenario s = load_scenario(path);
  CompiledSpec c = compile_cached(path, s);
  summary(c);
  for (const auto& e : c.apriori()) print_feedback(e);
  if (dump_buchi) std::printf("%s", dump(c.automaton).c_str());
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw SpecError("cannot write " + out);
    f << to_json(c) << '\n';
  }
  return 0;
}

int cmd_check(const std::string& path) {
  Scenario s = load_scenario(path);
  CompiledSpec c = compile_cached(path, s);
  auto events = c.apriori();
  for (const auto& e : events) print_feedback(e);
  for (const auto& [p, q] : c.conflicts.unchecked) std::printf("unchecked {%s, %s}\n", p.c_str(), q.c_str());
  if (c.inadmissible.skipped) std::printf("inadmissible-environment check skipped: too many events\n");
  std::printf("%zu warning(s)\n", events.size());
  return events.empty() ? 0 : 1;
}

int cmd_run(const std::string& path, const std::string& log_path, const std::string& csv_path) {
  Scenario s = load_scenario(path);
  if (s.interactive) throw SpecError("run needs a scripted event source; use serve");
  CompiledSpec c = compile_cached(path, s);
  RunLog log = run(s, c);
  if (!log_path.empty()) {
    std::ofstream f(log_path);
    write_jsonl(log, f);
  }
  if (!csv_path.empty()) {
    std::ofstream f(csv_path);
    write_csv(log, s, f);
  }
  for (const auto& r : log.records) {
    for (const auto& e : r.feedback) print_feedback(e);
  }
  std::vector<double> times;
  for (const auto& r : log.records) times.push_back(r.compute_seconds);
  std::sort(times.begin(), times.end());
  const auto& last = log.records.back();
  std::printf("%s at t=%.2f, state %s\n", to_string(log.status).c_str(), last.t, last.state.c_str());
  if (!times.empty()) std::printf("median step %.3f ms\n", 1e3 * times[times.size() / 2]);
  return log.status == TerminalStatus::HorizonAccepting ? 0 : 1;
}

int cmd_monitor(const std::string& path, const std::string& log_path, bool extend) {
  Scenario s = load_scenario(path);
  std::ifstream f(log_path);
  if (!f) throw SpecError("cannot read " + log_path);
  RunLog log = read_jsonl(f);
  if (log.records.empty()) throw SpecError("run log has no samples");
  Trace trace = extend ? zero_control_extension(log, s) : log.trace();
  auto result = monitor(trace, parse_formula(s.formula, s.decls), s.decls);
  std::printf("%s", to_string(result.verdict).c_str());
  if (result.verdict == Verdict::Violated) {
    std::printf(" at t=%.2f: %s", result.witness_time, result.witness.c_str());
  }
  std::printf("\n");
  switch (result.verdict) {
    case Verdict::Satisfied:
      return 0;
    case Verdict::Violated:
      return 1;
    case Verdict::Inconclusive:
      return 2;
  }
  return 2;
}

int cmd_serve(const std::string& path, std::uint16_t port, double speed) {
  Scenario s = load_scenario(path);
  if (!s.interactive) std::fprintf(stderr, "note: scripted event changes ignored while serving\n");
  s.interactive = true;
  s.changes.clear();
  CompiledSpec c = compile_cached(path, s);
  ServeOptions opts;
  opts.port = port;
  opts.speed = speed;
  opts.log = &std::cout;
  Server server(s, c, opts);
  std::signal(SIGINT, [](int) { interrupted = 1; });
  std::signal(SIGTERM, [](int) { interrupted = 1; });
  auto bound = server.start();
  std::cout << "listening on ws://127.0.0.1:" << bound << std::endl;
  while (!interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-based STL planning and control"};
  app.require_subcommand(1);

  std::string scenario, out, log_path, csv_path, run_log;
  bool dump_buchi = false, extend = false;
  std::uint16_t port = 8765;
  double speed = 1.0;

  auto* compile_cmd = app.add_subcommand("compile", "translate a scenario and report a-priori feedback");
  compile_cmd->add_option("scenario", scenario)->required()->check(CLI::ExistingFile);
  compile_cmd->add_flag("--dump-buchi", dump_buchi, "print the automaton");
  compile_cmd->add_option("--out", out, "write the compiled artifact");

  auto* check_cmd = app.add_subcommand("check", "a-priori feedback only; exit 1 on any warning");
  check_cmd->add_option("scenario", scenario)->required()->check(CLI::ExistingFile);

  auto* run_cmd = app.add_subcommand("run", "simulate a scripted scenario");
  run_cmd->add_option("scenario", scenario)->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--log", log_path, "JSON-lines run log");
  run_cmd->add_option("--csv", csv_path, "trajectory as t,robot,dim,value");

  auto* monitor_cmd = app.add_subcommand("monitor", "check a run log against the formula");
  monitor_cmd->add_option("scenario", scenario)->required()->check(CLI::ExistingFile);
  monitor_cmd->add_option("log", run_log)->required()->check(CLI::ExistingFile);
  monitor_cmd->add_flag("--extend", extend, "continue with zero control up to the horizon");

  auto* serve_cmd = app.add_subcommand("serve", "interactive WebSocket session");
  serve_cmd->add_option("scenario", scenario)->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--port", port)->required();
  serve_cmd->add_option("--speed", speed, "simulated seconds per wall second")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*compile_cmd) return cmd_compile(scenario, dump_buchi, out);
    if (*check_cmd) return cmd_check(scenario);
    if (*run_cmd) return cmd_run(scenario, log_path, csv_path);
    if (*monitor_cmd) return cmd_monitor(scenario, run_log, extend);
    if (*serve_cmd) return cmd_serve(scenario, port, speed);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
  }
  return 3;
}
