#include "evstl/cbf.hpp"

#include <algorithm>
#include <cmath>

namespace evstl {

namespace {

constexpr double kWindowSlack = 1e-9;

void require_window(const ActiveCbf& c, double t) {
  if (!c.in_window(t)) {
    throw ContractViolation("barrier for '" + c.tmpl.prop.name + "' evaluated outside its window");
  }
}

}  // namespace

bool CbfTemplate::shrinking() const {
  return prop.kind == TemporalKind::Eventually || prop.kind == TemporalKind::UntilRight;
}

std::vector<CbfTemplate> make_templates(const Abstraction& abstraction, const Declarations& decls) {
  std::vector<CbfTemplate> out;
  for (const auto& prop : abstraction.controlled) {
    CbfTemplate t;
    t.prop = prop;
    t.predicate = decls.predicate(prop.predicate);
    t.predicate.negated = prop.negated;
    out.push_back(std::move(t));
  }
  return out;
}

bool ActiveCbf::in_window(double t) const {
  return t >= window_start() - kWindowSlack && t <= window_end() + kWindowSlack;
}

ActiveCbf instantiate(const CbfTemplate& tmpl, double t_int, const Eigen::VectorXd& x_int) {
  return {tmpl, t_int, eval_h(tmpl.predicate, x_int)};
}

double value(const ActiveCbf& c, const Eigen::VectorXd& x, double t) {
  require_window(c, t);
  double h = eval_h(c.tmpl.predicate, x);
  if (!c.tmpl.shrinking()) return h;
  double span = c.tmpl.b() - c.tmpl.a();
  if (span <= 0.0) return h;
  if (std::isinf(span)) return h - c.h_int;
  return (t - c.t_int - c.tmpl.a()) * c.h_int / span - c.h_int + h;
}

double time_derivative(const ActiveCbf& c) {
  double span = c.tmpl.b() - c.tmpl.a();
  if (!c.tmpl.shrinking() || span <= 0.0 || std::isinf(span)) return 0.0;
  return c.h_int / span;
}

CbfGradient gradient(const ActiveCbf& c, const Eigen::VectorXd& x, double t) {
  require_window(c, t);
  return {grad_h(c.tmpl.predicate, x), time_derivative(c)};
}

CbfEval combine(const std::vector<CbfEval>& cbfs) {
  if (cbfs.empty()) throw ContractViolation("combine needs at least one barrier");
  double lowest = std::min_element(cbfs.begin(), cbfs.end(), [](const CbfEval& l, const CbfEval& r) {
                    return l.value < r.value;
                  })->value;
  std::vector<double> w(cbfs.size());
  double total = 0.0;
  for (std::size_t i = 0; i < cbfs.size(); ++i) total += w[i] = std::exp(-(cbfs[i].value - lowest));
  CbfEval out;
  out.value = lowest - std::log(total);
  out.dx = Eigen::VectorXd::Zero(cbfs.front().dx.size());
  for (std::size_t i = 0; i < cbfs.size(); ++i) {
    out.dx += (w[i] / total) * cbfs[i].dx;
    out.dt += (w[i] / total) * cbfs[i].dt;
  }
  return out;
}

}  // namespace evstl
