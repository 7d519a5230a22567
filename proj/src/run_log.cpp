#include <istream>
#include <ostream>

#include "evstl/simulation.hpp"
#include "json_io.hpp"

namespace evstl {

std::string record_json(const SampleRecord& r) {
  json u = json::array();
  for (const auto& ui : r.u) u.push_back(vector_json(ui));
  json cbf = json::array();
  for (const auto& c : r.cbf) cbf.push_back(c ? json(*c) : json(nullptr));
  json feedback = json::array();
  for (const auto& e : r.feedback) feedback.push_back(feedback_json(e));
  json out{{"t", r.t},
           {"x", vector_json(r.x)},
           {"sigma", r.sigma},
           {"state", r.state},
           {"active_props", r.active_props},
           {"u", u},
           {"cbf", cbf},
           {"feedback", feedback},
           {"compute_s", r.compute_seconds}};
  return out.dump();
}

std::string terminal_json(const RunLog& log) {
  json apriori = json::array();
  for (const auto& e : log.apriori) apriori.push_back(feedback_json(e));
  return json{{"terminal", to_string(log.status)}, {"dt", log.dt}, {"samples", log.records.size()},
              {"apriori", apriori}}
      .dump();
}

void write_jsonl(const RunLog& log, std::ostream& out) {
  for (const auto& r : log.records) out << record_json(r) << '\n';
  out << terminal_json(log) << '\n';
}

RunLog read_jsonl(std::istream& in) {
  RunLog log;
  std::string line;
  bool have_dt = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SpecError("run log line " + std::to_string(lineno) + ": " + e.what());
    }
    if (j.contains("terminal")) {
      log.status = terminal_status_from_string(j["terminal"].get<std::string>());
      if (j.contains("dt")) {
        log.dt = j["dt"].get<double>();
        have_dt = true;
      }
      for (const auto& e : j.value("apriori", json::array())) log.apriori.push_back(json_feedback(e));
      continue;
    }
    SampleRecord r;
    r.t = j.at("t").get<double>();
    r.x = json_vector(j.at("x"));
    r.sigma = j.value("sigma", std::set<std::string>{});
    r.state = j.value("state", "");
    r.active_props = j.value("active_props", std::vector<std::string>{});
    for (const auto& u : j.value("u", json::array())) r.u.push_back(json_vector(u));
    for (const auto& c : j.value("cbf", json::array())) {
      r.cbf.push_back(c.is_null() ? std::nullopt : std::optional<double>(c.get<double>()));
    }
    for (const auto& e : j.value("feedback", json::array())) r.feedback.push_back(json_feedback(e));
    r.compute_seconds = j.value("compute_s", 0.0);
    if (!log.records.empty() && !(r.t > log.records.back().t)) {
      throw SpecError("run log line " + std::to_string(lineno) + ": timestamps not increasing");
    }
    log.records.push_back(std::move(r));
  }
  if (!have_dt && log.records.size() > 1) log.dt = log.records[1].t - log.records[0].t;
  return log;
}

void write_csv(const RunLog& log, const Scenario& scenario, std::ostream& out) {
  out.precision(12);
  out << "t,robot,dim,value\n";
  for (const auto& r : log.records) {
    for (const auto& robot : scenario.dynamics.robots) {
      for (std::size_t k = 0; k < robot.dims.size(); ++k) {
        out << r.t << ',' << robot.name << ',' << robot.labels[k] << ','
            << r.x[static_cast<Eigen::Index>(robot.dims[k])] << '\n';
      }
    }
  }
}

}  // namespace evstl
