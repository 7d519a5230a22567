#pragma once

#include <Eigen/Core>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evstl/cbf.hpp"

namespace evstl {

/// One holonomic robot: a slice of the joint state, control-affine
/// dynamics dx_i = A x_i + c + g u_i, and box bounds on u_i.
struct RobotModel {
  std::string name;
  std::vector<std::size_t> dims;
  std::vector<std::string> labels;
  Eigen::VectorXd u_min;
  Eigen::VectorXd u_max;
  Eigen::MatrixXd g;  // |dims| x |u|
  Eigen::MatrixXd A;  // |dims| x |dims|
  Eigen::VectorXd c;

  std::size_t control_dim() const { return static_cast<std::size_t>(u_max.size()); }
  bool reads(const PredicateFunction& f) const;
};

struct Dynamics {
  std::vector<RobotModel> robots;
  std::size_t state_dim = 0;

  Eigen::VectorXd drift(const Eigen::VectorXd& x) const;
  /// x + dt (f(x) + g(x) u) with u stacked robot by robot.
  Eigen::VectorXd euler(const Eigen::VectorXd& x, const std::vector<Eigen::VectorXd>& u, double dt) const;
};

/// nu(z) = gamma z above zero and gamma_negative z below.
struct ClassK {
  double gamma = 1.0;
  double gamma_negative = 1.0;

  double operator()(double z) const { return z >= 0.0 ? gamma * z : gamma_negative * z; }
};

struct LinearConstraint {
  Eigen::VectorXd gvec;
  double rhs = 0.0;
};

/// min ||u - nominal|| over the box subject to gvec . u >= rhs; nullopt
/// when infeasible.
std::optional<Eigen::VectorXd> solve_qp(const Eigen::VectorXd& nominal,
                                        const std::optional<LinearConstraint>& constraint,
                                        const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

/// Instantiates barriers as their propositions enter the active set and
/// drops them when they leave. Barriers whose window closed, or U-left
/// barriers whose right operand holds, stay recorded as retired so they
/// are not re-armed while the proposition stays active.
class CbfRegistry {
 public:
  struct Entry {
    ActiveCbf cbf;
    bool retired = false;
  };

  explicit CbfRegistry(std::vector<CbfTemplate> templates);

  void update(const std::vector<std::string>& active_props, double t, const Eigen::VectorXd& x);
  std::vector<const ActiveCbf*> active(double t) const;
  const std::map<std::string, Entry>& entries() const { return entries_; }
  const std::vector<CbfTemplate>& templates() const { return templates_; }
  void clear() { entries_.clear(); }

 private:
  const CbfTemplate* find(const std::string& prop) const;

  std::vector<CbfTemplate> templates_;
  std::map<std::string, Entry> entries_;
};

/// Goal-directed control: for each group of robot dimensions read by an
/// in-window F-kind barrier, head for the centroid of the predicates'
/// target points at full box speed without overshooting in one sample.
Eigen::VectorXd nominal_control(const RobotModel& robot, const std::vector<const ActiveCbf*>& active,
                                const Eigen::VectorXd& x, double dt);

/// gvec . u >= rhs with gvec = g_i^T dcbf/dx_i and
/// rhs = -nu(v) - dcbf/dx . f(x) - dcbf/dt.
LinearConstraint barrier_constraint(const RobotModel& robot, const CbfEval& combined,
                                    const Eigen::VectorXd& drift, const ClassK& nu);

struct ControlResult {
  Eigen::VectorXd u;
  Eigen::VectorXd nominal;
  std::optional<CbfEval> combined;
  std::optional<LinearConstraint> constraint;
  bool feasible = true;
};

/// Barriers whose predicate reads robot `i`, combined into one
/// constraint, then the box QP.
ControlResult control_step(const Dynamics& dynamics, std::size_t i, const std::vector<const ActiveCbf*>& active,
                           const Eigen::VectorXd& x, double t, double dt, const ClassK& nu);

/// Combined value and derivatives of the given barriers with the
/// zero-gradient fallback at singular points.
std::optional<CbfEval> evaluate(const std::vector<const ActiveCbf*>& cbfs, const Eigen::VectorXd& x, double t);

}  // namespace evstl
