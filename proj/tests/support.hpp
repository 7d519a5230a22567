#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

#include "evstl/formula.hpp"

namespace evstl::testing {

inline std::filesystem::path scenario_file(const std::string& name) {
  return std::filesystem::path(EVSTL_SCENARIO_DIR) / (name + ".json");
}

inline Predicate sphere(std::string name, std::vector<std::size_t> dims, std::vector<double> center,
                        double radius, bool outer = false) {
  Predicate p;
  p.name = std::move(name);
  p.func.kind = outer ? PredicateKind::SphereOuter : PredicateKind::SphereInner;
  p.func.robots = {0};
  p.func.dims = std::move(dims);
  p.func.center = std::move(center);
  p.func.radius = radius;
  return p;
}

inline Predicate pair(std::string name, int ri, int rj, std::vector<std::size_t> dims, double d) {
  Predicate p;
  p.name = std::move(name);
  p.func.kind = PredicateKind::PairDistanceMin;
  p.func.robots = {ri, rj};
  p.func.dims = std::move(dims);
  p.func.min_distance = d;
  return p;
}

inline Predicate angle(std::string name, std::size_t dim, double target, double tolerance) {
  Predicate p;
  p.name = std::move(name);
  p.func.kind = PredicateKind::AngleAbsTarget;
  p.func.robots = {0};
  p.func.dims = {dim};
  p.func.target = target;
  p.func.tolerance = tolerance;
  return p;
}

inline Predicate halfspace(std::string name, std::vector<std::size_t> dims, std::vector<double> normal,
                           double offset) {
  Predicate p;
  p.name = std::move(name);
  p.func.kind = PredicateKind::Halfspace;
  p.func.robots = {0};
  p.func.dims = std::move(dims);
  p.func.normal = std::move(normal);
  p.func.offset = offset;
  return p;
}

inline void declare(Declarations& d, Predicate p) {
  auto name = p.name;
  d.predicates.emplace(name, std::move(p));
}

// alarm, near55 = ball of radius 1 around [5,5] on a 2-D state
inline Declarations single_robot_decls() {
  Declarations d;
  declare(d, sphere("near55", {0, 1}, {5, 5}, 1.0));
  d.events = {"alarm"};
  return d;
}

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

}  // namespace evstl::testing
