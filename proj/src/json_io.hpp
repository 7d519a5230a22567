#pragma once

#include <Eigen/Core>

#include <json.hpp>

#include "evstl/feedback.hpp"

namespace evstl {

using nlohmann::json;

inline json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline Eigen::VectorXd json_vector(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

inline json feedback_json(const FeedbackEvent& e) {
  json out{{"kind", to_string(e.kind)},
           {"severity", to_string(e.severity)},
           {"location", e.location},
           {"predicates", e.predicates},
           {"events", e.events},
           {"detail", e.detail}};
  if (e.time) out["t"] = *e.time;
  if (e.robot) out["robot"] = *e.robot;
  return out;
}

inline FeedbackKind feedback_kind(const std::string& s) {
  for (auto k : {FeedbackKind::PossibleConflict, FeedbackKind::InadmissibleEnv, FeedbackKind::Unreachable,
                 FeedbackKind::QpInfeasible}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown feedback kind '" + s + "'");
}

inline FeedbackEvent json_feedback(const json& j) {
  FeedbackEvent e;
  e.kind = feedback_kind(j.at("kind").get<std::string>());
  e.severity = j.at("severity").get<std::string>() == "fatal" ? Severity::Fatal : Severity::Warning;
  e.location = j.value("location", "");
  e.predicates = j.value("predicates", std::vector<std::string>{});
  e.events = j.value("events", std::vector<std::string>{});
  e.detail = j.value("detail", "");
  if (j.contains("t")) e.time = j["t"].get<double>();
  if (j.contains("robot")) e.robot = j["robot"].get<std::size_t>();
  return e;
}

}  // namespace evstl
