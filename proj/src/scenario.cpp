#include "evstl/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "evstl/planner.hpp"
#include "json_io.hpp"

namespace evstl {

namespace {

Eigen::Index at(std::size_t i) { return static_cast<Eigen::Index>(i); }

template <class T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw SpecError(where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw SpecError(where + ": bad '" + key + "': " + e.what());
  }
}

Eigen::MatrixXd matrix(const json& j, std::size_t rows, std::size_t cols, const std::string& where) {
  if (!j.is_array() || j.size() != rows) throw SpecError(where + ": expected " + std::to_string(rows) + " rows");
  Eigen::MatrixXd m(at(rows), at(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw SpecError(where + ": expected " + std::to_string(cols) + " columns");
    }
    for (std::size_t c = 0; c < cols; ++c) m(at(r), at(c)) = j[r][c].get<double>();
  }
  return m;
}

RobotModel parse_robot(const json& j, std::size_t index, std::size_t offset, Eigen::VectorXd& x0_part) {
  RobotModel r;
  r.name = j.value("name", "r" + std::to_string(index + 1));
  const std::string where = "robot " + r.name;
  r.labels = field<std::vector<std::string>>(j, "state", where);
  if (r.labels.empty()) throw SpecError(where + ": empty state");
  const std::size_t n = r.labels.size();
  for (std::size_t k = 0; k < n; ++k) r.dims.push_back(offset + k);

  auto x0 = field<std::vector<double>>(j, "x0", where);
  if (x0.size() != n) throw SpecError(where + ": x0 has " + std::to_string(x0.size()) + " entries, state has " +
                                      std::to_string(n));
  x0_part = Eigen::Map<Eigen::VectorXd>(x0.data(), at(n));

  auto umax = field<std::vector<double>>(j, "u_max", where);
  r.u_max = Eigen::Map<Eigen::VectorXd>(umax.data(), at(umax.size()));
  if (j.contains("u_min")) {
    auto umin = field<std::vector<double>>(j, "u_min", where);
    if (umin.size() != umax.size()) throw SpecError(where + ": u_min/u_max size mismatch");
    r.u_min = Eigen::Map<Eigen::VectorXd>(umin.data(), at(umin.size()));
  } else {
    r.u_min = -r.u_max;
  }
  for (Eigen::Index i = 0; i < r.u_max.size(); ++i) {
    if (!(r.u_min[i] <= 0.0 && 0.0 <= r.u_max[i])) throw SpecError(where + ": control bounds must contain 0");
  }

  const std::size_t m = r.control_dim();
  if (j.contains("g")) {
    r.g = matrix(j["g"], n, m, where + " g");
  } else {
    if (m != n) throw SpecError(where + ": g required when control and state sizes differ");
    r.g = Eigen::MatrixXd::Identity(at(n), at(n));
  }
  if (j.contains("drift")) {
    const json& d = j["drift"];
    if (d.contains("A")) r.A = matrix(d["A"], n, n, where + " drift A");
    if (d.contains("c")) {
      auto c = field<std::vector<double>>(d, "c", where + " drift");
      if (c.size() != n) throw SpecError(where + ": drift c size mismatch");
      r.c = Eigen::Map<Eigen::VectorXd>(c.data(), at(n));
    }
  }
  return r;
}

std::size_t robot_index(const json& ref, const Dynamics& dyn, const std::string& where) {
  if (ref.is_number_unsigned()) {
    auto i = ref.get<std::size_t>();
    if (i >= dyn.robots.size()) throw SpecError(where + ": robot index out of range");
    return i;
  }
  auto name = ref.get<std::string>();
  for (std::size_t i = 0; i < dyn.robots.size(); ++i) {
    if (dyn.robots[i].name == name) return i;
  }
  throw SpecError(where + ": unknown robot '" + name + "'");
}

std::vector<std::size_t> resolve_dims(const json& dims, const RobotModel& r, const std::string& where) {
  std::vector<std::size_t> out;
  for (const auto& d : dims) {
    if (d.is_number_unsigned()) {
      auto k = d.get<std::size_t>();
      if (k >= r.dims.size()) throw SpecError(where + ": dimension index out of range");
      out.push_back(r.dims[k]);
      continue;
    }
    auto label = d.get<std::string>();
    auto it = std::find(r.labels.begin(), r.labels.end(), label);
    if (it == r.labels.end()) throw SpecError(where + ": robot " + r.name + " has no state '" + label + "'");
    out.push_back(r.dims[static_cast<std::size_t>(it - r.labels.begin())]);
  }
  return out;
}

Predicate parse_predicate(const std::string& name, const json& j, const Dynamics& dyn) {
  const std::string where = "predicate " + name;
  Predicate p;
  p.name = name;
  auto& f = p.func;
  f.kind = predicate_kind_from_string(field<std::string>(j, "kind", where));
  if (!j.contains("dims")) throw SpecError(where + ": missing 'dims'");
  if (f.kind == PredicateKind::PairDistanceMin) {
    if (!j.contains("robots") || j["robots"].size() != 2) throw SpecError(where + ": needs two robots");
    for (const auto& ref : j["robots"]) {
      auto i = robot_index(ref, dyn, where);
      f.robots.push_back(static_cast<int>(i));
    }
    for (int i : f.robots) {
      auto dims = resolve_dims(j["dims"], dyn.robots[static_cast<std::size_t>(i)], where);
      f.dims.insert(f.dims.end(), dims.begin(), dims.end());
    }
    f.min_distance = field<double>(j, "min_distance", where);
  } else {
    auto i = robot_index(j.at("robot"), dyn, where);
    f.robots.push_back(static_cast<int>(i));
    f.dims = resolve_dims(j["dims"], dyn.robots[i], where);
    switch (f.kind) {
      case PredicateKind::SphereInner:
      case PredicateKind::SphereOuter:
        f.center = field<std::vector<double>>(j, "center", where);
        f.radius = field<double>(j, "radius", where);
        break;
      case PredicateKind::AngleAbsTarget:
        f.target = field<double>(j, "target", where);
        f.tolerance = field<double>(j, "tolerance", where);
        break;
      case PredicateKind::Halfspace:
        f.normal = field<std::vector<double>>(j, "normal", where);
        f.offset = field<double>(j, "offset", where);
        break;
      case PredicateKind::PairDistanceMin:
        break;
    }
  }
  try {
    f.validate(dyn.state_dim);
  } catch (const SpecError& e) {
    throw SpecError(where + ": " + e.what());
  }
  return p;
}

bool on_grid(double v, double dt) {
  double k = v / dt;
  return std::abs(k - std::round(k)) < 1e-6;
}

void check_intervals(const StlFormula& f, double dt) {
  auto check = [&](const TimeInterval& iv) {
    if (!on_grid(iv.lower, dt) || (!iv.unbounded() && !on_grid(iv.upper, dt))) {
      throw SpecError("interval " + to_string(iv) + " is not a multiple of the sample period");
    }
  };
  if (f.kind != FormulaKind::Conjunction && f.kind != FormulaKind::Implies) check(f.interval);
  for (const auto& c : f.children) check_intervals(c, dt);
}

std::string hex(std::uint64_t v) {
  char buf[17];
  auto res = std::to_chars(buf, buf + 16, v, 16);
  std::string s(buf, res.ptr);
  return std::string(16 - s.size(), '0') + s;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Everything except translation; shared by compile and the cache loader.
CompiledSpec front_end(const Scenario& scenario) {
  CompiledSpec out;
  out.formula = parse_formula(scenario.formula, scenario.decls);
  check_intervals(out.formula, scenario.dt);
  out.abstraction = abstract(out.formula);
  out.templates = make_templates(out.abstraction, scenario.decls);
  return out;
}

void back_end(CompiledSpec& out, const Scenario& scenario) {
  Planner planner(out.automaton, out.abstraction, scenario.decls);
  out.conflicts = apriori_conflicts(planner, out.abstraction, scenario.decls);
  out.inadmissible = apriori_inadmissible_env(planner);
  auto sigma0 = scenario.interactive ? std::set<std::string>{} : scenario.events_at(0.0);
  try {
    planner.find_transition(sigma0, scenario.x0);
  } catch (const InadmissibleEnvironment& e) {
    throw SpecError(std::string("initial state violates the specification: ") + e.what());
  } catch (const SpecificationUnrealizable& e) {
    throw SpecError(std::string("specification unrealizable from the initial state: ") + e.what());
  }
}

}  // namespace

std::size_t Scenario::samples() const { return static_cast<std::size_t>(std::llround(horizon / dt)) + 1; }

std::set<std::string> Scenario::events_at(double t) const {
  std::set<std::string> out;
  for (const auto& c : changes) {
    if (c.t > t + 1e-9) break;
    out = c.events;
  }
  return out;
}

std::size_t Scenario::robot_of(std::size_t dim) const {
  for (std::size_t i = 0; i < dynamics.robots.size(); ++i) {
    const auto& d = dynamics.robots[i].dims;
    if (std::find(d.begin(), d.end(), dim) != d.end()) return i;
  }
  throw std::out_of_range("dimension " + std::to_string(dim) + " belongs to no robot");
}

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SpecError("scenario must be a JSON object");

  Scenario s;
  s.name = j.value("name", "scenario");
  s.dt = j.value("dt", 0.1);
  s.horizon = field<double>(j, "horizon", "scenario");
  s.gain.gamma = j.value("gamma", 1.0);
  s.gain.gamma_negative = j.value("gamma_negative", s.gain.gamma);
  if (!(s.dt > 0)) throw SpecError("dt must be positive");
  if (!(s.horizon >= 0) || !on_grid(s.horizon, s.dt)) throw SpecError("horizon must be a nonnegative multiple of dt");
  if (!(s.gain.gamma > 0) || !(s.gain.gamma_negative > 0)) throw SpecError("gamma must be positive");

  if (!j.contains("robots") || !j["robots"].is_array() || j["robots"].empty()) {
    throw SpecError("scenario needs at least one robot");
  }
  std::vector<Eigen::VectorXd> parts;
  for (const auto& rj : j["robots"]) {
    Eigen::VectorXd part;
    s.dynamics.robots.push_back(parse_robot(rj, s.dynamics.robots.size(), s.dynamics.state_dim, part));
    s.dynamics.state_dim += static_cast<std::size_t>(part.size());
    parts.push_back(std::move(part));
  }
  for (std::size_t i = 0; i < s.dynamics.robots.size(); ++i) {
    for (std::size_t k = i + 1; k < s.dynamics.robots.size(); ++k) {
      if (s.dynamics.robots[i].name == s.dynamics.robots[k].name) {
        throw SpecError("duplicate robot name '" + s.dynamics.robots[i].name + "'");
      }
    }
  }
  s.x0.resize(at(s.dynamics.state_dim));
  std::size_t off = 0;
  for (const auto& p : parts) {
    s.x0.segment(at(off), p.size()) = p;
    off += static_cast<std::size_t>(p.size());
  }

  for (const auto& e : j.value("events", std::vector<std::string>{})) {
    if (!s.decls.events.insert(e).second) throw SpecError("duplicate event '" + e + "'");
  }
  if (j.contains("predicates")) {
    for (const auto& [name, pj] : j["predicates"].items()) {
      if (s.decls.is_event(name)) throw SpecError("'" + name + "' declared as both event and predicate");
      s.decls.predicates.emplace(name, parse_predicate(name, pj, s.dynamics));
    }
  }
  s.formula = field<std::string>(j, "formula", "scenario");

  const json src = j.value("event_source", json{{"type", "scripted"}});
  const auto type = src.value("type", "scripted");
  if (type == "interactive") {
    s.interactive = true;
  } else if (type == "scripted") {
    for (const auto& c : src.value("changes", json::array())) {
      EventChange ch;
      ch.t = field<double>(c, "t", "event change");
      for (const auto& e : field<std::vector<std::string>>(c, "events", "event change")) {
        if (!s.decls.is_event(e)) throw SpecError("event change names undeclared event '" + e + "'");
        ch.events.insert(e);
      }
      s.changes.push_back(std::move(ch));
    }
    std::stable_sort(s.changes.begin(), s.changes.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  } else {
    throw SpecError("unknown event source type '" + type + "'");
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  Scenario s = parse_scenario(read_file(path));
  if (s.name == "scenario") s.name = path.stem().string();
  return s;
}

std::vector<FeedbackEvent> CompiledSpec::apriori() const {
  auto out = conflicts.conflicts;
  for (auto& e : to_events(inadmissible)) out.push_back(std::move(e));
  return out;
}

CompiledSpec compile(const Scenario& scenario, const TranslateOptions& options) {
  auto start = std::chrono::steady_clock::now();
  CompiledSpec out = front_end(scenario);
  out.automaton = translate(out.abstraction.ltl, options);
  back_end(out, scenario);
  out.compile_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::string to_json(const CompiledSpec& c) {
  auto prop_json = [](const ControlledProp& p, bool observed) {
    json iv = json::array({p.interval.lower});
    if (p.interval.unbounded()) iv.push_back("inf");
    else iv.push_back(p.interval.upper);
    return json{{"name", p.name},         {"predicate", p.predicate}, {"negated", p.negated},
                {"interval", iv},         {"kind", to_string(p.kind)}, {"partners", p.partners},
                {"observed", observed}};
  };
  json props = json::array();
  for (const auto& p : c.abstraction.controlled) props.push_back(prop_json(p, false));
  for (const auto& p : c.abstraction.observed) props.push_back(prop_json(p, true));

  const auto& b = c.automaton;
  json states = json::array();
  for (std::size_t s = 0; s < b.size(); ++s) states.push_back({{"name", b.name(s)}, {"accepting", b.accepting(s)}});
  json transitions = json::array();
  for (const auto& t : b.transitions()) {
    json cubes = json::array();
    for (const auto& cube : b.label(t).cubes) cubes.push_back(json::array({cube.pos, cube.neg}));
    transitions.push_back({{"src", b.name(t.source)},
                           {"dst", b.name(t.target)},
                           {"label", b.label_expr(t).to_string()},
                           {"cubes", cubes}});
  }
  json feedback = json::array();
  for (const auto& e : c.apriori()) feedback.push_back(feedback_json(e));
  json unchecked = json::array();
  for (const auto& [p, q] : c.conflicts.unchecked) unchecked.push_back(json::array({p, q}));

  json out{{"source_hash", hex(c.source_hash)},
           {"formula", to_string(c.formula)},
           {"ltl", to_string(c.abstraction.ltl)},
           {"props", props},
           {"automaton",
            {{"alphabet", b.alphabet()},
             {"initial", b.name(b.initial())},
             {"states", states},
             {"transitions", transitions}}},
           {"feedback", feedback},
           {"unchecked", unchecked},
           {"inadmissible_skipped", c.inadmissible.skipped},
           {"compile_seconds", c.compile_seconds}};
  return out.dump(2);
}

CompiledSpec compiled_from_json(const std::string& json_text, const Scenario& scenario) {
  auto start = std::chrono::steady_clock::now();
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("compiled artifact is not valid JSON: ") + e.what());
  }
  CompiledSpec out = front_end(scenario);
  if (to_string(out.abstraction.ltl) != j.value("ltl", "")) {
    throw SpecError("compiled artifact does not match the scenario formula");
  }
  const json& a = j.at("automaton");
  auto& b = out.automaton;
  for (const auto& p : a.at("alphabet")) b.intern(p.get<std::string>());
  for (const auto& s : a.at("states")) b.add_state(s.at("accepting").get<bool>(), s.at("name").get<std::string>());
  b.set_initial(b.state_named(a.at("initial").get<std::string>()));
  for (const auto& t : a.at("transitions")) {
    Guard g;
    for (const auto& cube : t.at("cubes")) g.cubes.push_back({cube[0].get<std::uint64_t>(), cube[1].get<std::uint64_t>()});
    auto src = b.state_named(t.at("src").get<std::string>());
    auto dst = b.state_named(t.at("dst").get<std::string>());
    if (src == BuchiAutomaton::npos || dst == BuchiAutomaton::npos) throw SpecError("compiled artifact is corrupt");
    b.add_transition(src, std::move(g), dst);
  }
  back_end(out, scenario);
  const std::string hash = j.value("source_hash", std::string("0"));
  std::from_chars(hash.data(), hash.data() + hash.size(), out.source_hash, 16);
  out.compile_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

CompiledSpec compile_cached(const std::filesystem::path& scenario_path, const Scenario& scenario) {
  const std::uint64_t hash = fnv1a(read_file(scenario_path));
  auto cache = scenario_path.parent_path() / (scenario_path.stem().string() + "." + hex(hash) + ".compiled.json");
  std::error_code ec;
  if (std::filesystem::exists(cache, ec)) {
    try {
      CompiledSpec c = compiled_from_json(read_file(cache), scenario);
      if (c.source_hash == hash) return c;
    } catch (const SpecError&) {
    } catch (const json::exception&) {
    }
  }
  CompiledSpec c = compile(scenario);
  c.source_hash = hash;
  std::ofstream(cache) << to_json(c) << '\n';
  return c;
}

}  // namespace evstl
