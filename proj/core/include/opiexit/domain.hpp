#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "opiexit/common.hpp"

namespace opiexit::exitstats {

// One closed half-space a.x <= b; the open side a.x < b counts as inside.
struct Halfspace {
  Eigen::Vector3d a;
  double b;
  std::string name;
};

// Bounded open region with an enumerable polytope boundary. Exit detection
// uses the strict interior; the quasipotential minimizes over the closed
// boundary facets.
class Domain {
 public:
  enum class Kind { box, simplex, intersection };

  static Domain box(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi);
  // {x_i >= m_i for each axis} intersected with {x1+x2+x3 <= 1 - mz}. The
  // all-zero margins give the physical simplex: exit means some compartment
  // fraction left [0, 1] feasibility.
  static Domain simplex(double m1, double m2, double m3, double mz);
  static Domain intersection(const Domain& box_part, const Domain& simplex_part);

  bool contains(double x1, double x2, double x3) const;
  bool contains(const Eigen::Vector3d& x) const {
    return contains(x[0], x[1], x[2]);
  }

  Kind kind() const { return kind_; }
  const std::vector<Halfspace>& facets() const { return faces_; }

  // Uniformly scaled copy c * D (every facet offset multiplied by c). Only
  // meaningful for domains described around the origin.
  Domain scaled(double c) const;

 private:
  Domain() = default;
  Kind kind_ = Kind::box;
  std::vector<Halfspace> faces_;
  // Fast-path data for contains():
  Eigen::Vector3d lo_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d hi_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d m_ = Eigen::Vector3d::Zero();
  double sum_cap_ = 0.0;
  bool has_box_ = false, has_simplex_ = false;
};

}  // namespace opiexit::exitstats
