#include "evstl/controller.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace evstl {

namespace {

Eigen::Index at(std::size_t i) { return static_cast<Eigen::Index>(i); }

// Where a predicate pulls its dimensions; empty when it does not attract.
std::vector<std::pair<std::size_t, double>> target_point(const Predicate& p, const Eigen::VectorXd& x) {
  const auto& f = p.func;
  std::vector<std::pair<std::size_t, double>> out;
  auto stay = [&] {
    for (std::size_t d : f.dims) out.emplace_back(d, x[at(d)]);
  };
  switch (f.kind) {
    case PredicateKind::SphereInner:
    case PredicateKind::SphereOuter: {
      bool inside = (f.kind == PredicateKind::SphereInner) != p.negated;
      if (!inside) {
        stay();
        break;
      }
      for (std::size_t k = 0; k < f.dims.size(); ++k) out.emplace_back(f.dims[k], f.center[k]);
      break;
    }
    case PredicateKind::PairDistanceMin:
      stay();
      break;
    case PredicateKind::AngleAbsTarget: {
      if (p.negated) {
        stay();
        break;
      }
      double theta = x[at(f.dims[0])];
      out.emplace_back(f.dims[0], theta < 0 ? -f.target : f.target);
      break;
    }
    case PredicateKind::Halfspace: {
      double h = eval_h(p, x);
      if (h >= 0.0) {
        stay();
        break;
      }
      // step onto the boundary, a hair inside
      double sign = p.negated ? -1.0 : 1.0;
      double norm2 = 0.0;
      for (double a : f.normal) norm2 += a * a;
      double shift = (-h + 1e-9) / norm2;
      for (std::size_t k = 0; k < f.dims.size(); ++k) {
        out.emplace_back(f.dims[k], x[at(f.dims[k])] + sign * shift * f.normal[k]);
      }
      break;
    }
  }
  return out;
}

}  // namespace

bool RobotModel::reads(const PredicateFunction& f) const {
  return std::any_of(f.dims.begin(), f.dims.end(),
                     [&](std::size_t d) { return std::find(dims.begin(), dims.end(), d) != dims.end(); });
}

Eigen::VectorXd Dynamics::drift(const Eigen::VectorXd& x) const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(x.size());
  for (const auto& r : robots) {
    if (r.A.size() == 0 && r.c.size() == 0) continue;
    Eigen::VectorXd xi(r.dims.size());
    for (std::size_t k = 0; k < r.dims.size(); ++k) xi[at(k)] = x[at(r.dims[k])];
    Eigen::VectorXd fi = Eigen::VectorXd::Zero(xi.size());
    if (r.A.size()) fi += r.A * xi;
    if (r.c.size()) fi += r.c;
    for (std::size_t k = 0; k < r.dims.size(); ++k) f[at(r.dims[k])] = fi[at(k)];
  }
  return f;
}

Eigen::VectorXd Dynamics::euler(const Eigen::VectorXd& x, const std::vector<Eigen::VectorXd>& u, double dt) const {
  Eigen::VectorXd dx = drift(x);
  for (std::size_t i = 0; i < robots.size(); ++i) {
    Eigen::VectorXd gi = robots[i].g * u[i];
    for (std::size_t k = 0; k < robots[i].dims.size(); ++k) dx[at(robots[i].dims[k])] += gi[at(k)];
  }
  return x + dt * dx;
}

std::optional<Eigen::VectorXd> solve_qp(const Eigen::VectorXd& nominal,
                                        const std::optional<LinearConstraint>& constraint,
                                        const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  auto clamp = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd { return u.cwiseMax(lower).cwiseMin(upper); };
  Eigen::VectorXd u0 = clamp(nominal);
  if (!constraint) return u0;
  const Eigen::VectorXd& g = constraint->gvec;
  const double rhs = constraint->rhs;
  if (g.dot(u0) >= rhs) return u0;

  double lambda_max = 0.0;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    if (g[j] == 0.0) continue;
    double reach = std::max(std::abs(upper[j] - nominal[j]), std::abs(lower[j] - nominal[j]));
    lambda_max = std::max(lambda_max, reach / std::abs(g[j]));
  }
  auto u_of = [&](double lambda) -> Eigen::VectorXd { return clamp(nominal + lambda * g); };
  if (lambda_max == 0.0 || g.dot(u_of(lambda_max)) < rhs) return std::nullopt;

  double lo = 0.0, hi = lambda_max;
  while (hi - lo > 1e-9 * std::max(1.0, hi)) {
    double mid = 0.5 * (lo + hi);
    (g.dot(u_of(mid)) >= rhs ? hi : lo) = mid;
  }
  // exact multiplier for the clamping pattern found by bisection
  Eigen::VectorXd u = u_of(hi);
  double pinned = 0.0, slope = 0.0;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    double free_u = nominal[j] + hi * g[j];
    if (free_u <= lower[j] || free_u >= upper[j]) {
      pinned += g[j] * u[j];
    } else {
      pinned += g[j] * nominal[j];
      slope += g[j] * g[j];
    }
  }
  if (slope > 0.0) {
    Eigen::VectorXd exact = u_of((rhs - pinned) / slope);
    if (g.dot(exact) >= rhs - 1e-12 && (exact - nominal).norm() <= (u - nominal).norm()) return exact;
  }
  return u;
}

CbfRegistry::CbfRegistry(std::vector<CbfTemplate> templates) : templates_(std::move(templates)) {}

const CbfTemplate* CbfRegistry::find(const std::string& prop) const {
  for (const auto& t : templates_) {
    if (t.prop.name == prop) return &t;
  }
  return nullptr;
}

void CbfRegistry::update(const std::vector<std::string>& active_props, double t, const Eigen::VectorXd& x) {
  std::erase_if(entries_, [&](const auto& kv) {
    return std::find(active_props.begin(), active_props.end(), kv.first) == active_props.end();
  });
  for (const auto& name : active_props) {
    if (entries_.count(name)) continue;
    const CbfTemplate* tmpl = find(name);
    if (tmpl) entries_.emplace(name, Entry{instantiate(*tmpl, t, x)});
  }
  for (auto& [name, entry] : entries_) {
    if (entry.retired) continue;
    const ActiveCbf& c = entry.cbf;
    if (t > c.window_end() + 1e-9) entry.retired = true;
    if (c.tmpl.prop.kind == TemporalKind::UntilLeft && t >= c.window_start() - 1e-9) {
      bool right_holds = !c.tmpl.prop.partners.empty();
      for (const auto& partner : c.tmpl.prop.partners) {
        const CbfTemplate* other = find(partner);
        if (!other || eval_h(other->predicate, x) < 0.0) right_holds = false;
      }
      if (right_holds) entry.retired = true;
    }
  }
}

std::vector<const ActiveCbf*> CbfRegistry::active(double t) const {
  std::vector<const ActiveCbf*> out;
  for (const auto& [name, entry] : entries_) {
    if (!entry.retired && entry.cbf.in_window(t)) out.push_back(&entry.cbf);
  }
  return out;
}

Eigen::VectorXd nominal_control(const RobotModel& robot, const std::vector<const ActiveCbf*>& active,
                                const Eigen::VectorXd& x, double dt) {
  const std::size_t n = robot.dims.size();
  auto local = [&](std::size_t joint) -> std::optional<std::size_t> {
    auto it = std::find(robot.dims.begin(), robot.dims.end(), joint);
    if (it == robot.dims.end()) return std::nullopt;
    return static_cast<std::size_t>(it - robot.dims.begin());
  };

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> root = [&](std::size_t i) {
    return parent[i] == i ? i : parent[i] = root(parent[i]);
  };
  std::vector<double> sum(n, 0.0);
  std::vector<int> count(n, 0);
  for (const ActiveCbf* c : active) {
    if (!c->tmpl.shrinking()) continue;
    std::optional<std::size_t> first;
    for (auto [joint, value] : target_point(c->tmpl.predicate, x)) {
      auto k = local(joint);
      if (!k) continue;
      sum[*k] += value;
      count[*k] += 1;
      if (first) parent[root(*k)] = root(*first);
      else first = k;
    }
  }

  Eigen::VectorXd u = Eigen::VectorXd::Zero(at(robot.control_dim()));
  for (std::size_t group = 0; group < n; ++group) {
    if (root(group) != group) continue;
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(at(n));
    bool any = false;
    for (std::size_t k = 0; k < n; ++k) {
      if (root(k) != group || count[k] == 0) continue;
      dir[at(k)] = sum[k] / count[k] - x[at(robot.dims[k])];
      any = true;
    }
    double dist = dir.norm();
    if (!any || dist < 1e-12) continue;
    Eigen::VectorXd w = robot.g.transpose() * dir;
    if (w.norm() < 1e-15) continue;
    w.normalize();
    for (Eigen::Index j = 0; j < w.size(); ++j) w[j] *= w[j] > 0 ? robot.u_max[j] : -robot.u_min[j];
    double speed = (robot.g * w).norm();
    if (speed > 0 && dt > 0) w *= std::min(1.0, dist / (dt * speed));
    u += w;
  }
  return u;
}

LinearConstraint barrier_constraint(const RobotModel& robot, const CbfEval& combined,
                                    const Eigen::VectorXd& drift, const ClassK& nu) {
  Eigen::VectorXd slice(at(robot.dims.size()));
  for (std::size_t k = 0; k < robot.dims.size(); ++k) slice[at(k)] = combined.dx[at(robot.dims[k])];
  return {robot.g.transpose() * slice, -nu(combined.value) - combined.dx.dot(drift) - combined.dt};
}

std::optional<CbfEval> evaluate(const std::vector<const ActiveCbf*>& cbfs, const Eigen::VectorXd& x, double t) {
  if (cbfs.empty()) return std::nullopt;
  std::vector<CbfEval> parts;
  for (const ActiveCbf* c : cbfs) {
    CbfEval e;
    e.value = value(*c, x, t);
    e.dt = time_derivative(*c);
    try {
      e.dx = gradient(*c, x, t).dx;
    } catch (const GradientSingularity&) {
      e.dx = Eigen::VectorXd::Zero(x.size());
    }
    parts.push_back(std::move(e));
  }
  return combine(parts);
}

ControlResult control_step(const Dynamics& dynamics, std::size_t i, const std::vector<const ActiveCbf*>& active,
                           const Eigen::VectorXd& x, double t, double dt, const ClassK& nu) {
  const RobotModel& robot = dynamics.robots[i];
  std::vector<const ActiveCbf*> mine;
  for (const ActiveCbf* c : active) {
    if (robot.reads(c->tmpl.predicate.func)) mine.push_back(c);
  }
  ControlResult out;
  out.nominal = nominal_control(robot, mine, x, dt);
  out.combined = evaluate(mine, x, t);
  if (out.combined) out.constraint = barrier_constraint(robot, *out.combined, dynamics.drift(x), nu);
  auto u = solve_qp(out.nominal, out.constraint, robot.u_min, robot.u_max);
  out.feasible = u.has_value();
  out.u = u ? *u : Eigen::VectorXd::Zero(at(robot.control_dim()));
  return out;
}

}  // namespace evstl
