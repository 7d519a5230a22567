#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <vector>

#include "evstl/abstraction.hpp"
#include "evstl/formula.hpp"

namespace evstl {

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Barrier-function template for one controllable proposition. The
/// predicate carries the literal's polarity.
struct CbfTemplate {
  ControlledProp prop;
  Predicate predicate;

  double a() const { return prop.interval.lower; }
  double b() const { return prop.interval.upper; }
  /// F and U-right obligations use the shrinking template; G and U-left
  /// use h itself.
  bool shrinking() const;
};

std::vector<CbfTemplate> make_templates(const Abstraction& abstraction, const Declarations& decls);

struct ActiveCbf {
  CbfTemplate tmpl;
  double t_int = 0.0;
  double h_int = 0.0;

  double window_start() const { return t_int + tmpl.a(); }
  double window_end() const { return t_int + tmpl.b(); }
  bool in_window(double t) const;
};

ActiveCbf instantiate(const CbfTemplate& tmpl, double t_int, const Eigen::VectorXd& x_int);

/// cbf(x, t). Throws ContractViolation outside the active window.
double value(const ActiveCbf& cbf, const Eigen::VectorXd& x, double t);

struct CbfGradient {
  Eigen::VectorXd dx;
  double dt = 0.0;
};

/// Analytic derivatives. Throws GradientSingularity where h is not
/// differentiable and ContractViolation outside the window.
CbfGradient gradient(const ActiveCbf& cbf, const Eigen::VectorXd& x, double t);

/// dcbf/dt: h_int / (b - a) for the shrinking template, zero otherwise.
double time_derivative(const ActiveCbf& cbf);

struct CbfEval {
  double value = 0.0;
  Eigen::VectorXd dx;
  double dt = 0.0;
};

/// Smooth minimum -ln(sum exp(-v_i)) with the softmin-weighted gradient.
CbfEval combine(const std::vector<CbfEval>& cbfs);

}  // namespace evstl
