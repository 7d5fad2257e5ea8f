#include "opiexit/domain.hpp"

namespace opiexit::exitstats {

Domain Domain::box(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
  static const char* axis[3] = {"x1", "x2", "x3"};
  for (int k = 0; k < 3; ++k)
    if (!(lo[k] < hi[k]))
      throw ValidationError(std::string("domain box: lower bound must be "
                                        "below upper bound on axis ") +
                            axis[k]);
  Domain d;
  d.kind_ = Kind::box;
  d.has_box_ = true;
  d.lo_ = lo;
  d.hi_ = hi;
  for (int k = 0; k < 3; ++k) {
    Eigen::Vector3d n = Eigen::Vector3d::Zero();
    n[k] = -1.0;
    d.faces_.push_back({n, -lo[k], std::string(axis[k]) + "_min"});
    n[k] = 1.0;
    d.faces_.push_back({n, hi[k], std::string(axis[k]) + "_max"});
  }
  return d;
}

Domain Domain::simplex(double m1, double m2, double m3, double mz) {
  if (m1 < 0 || m2 < 0 || m3 < 0 || mz < 0)
    throw ValidationError("domain simplex: margins must be >= 0");
  if (!(m1 + m2 + m3 < 1.0 - mz))
    throw ValidationError(
        "domain simplex: margins leave no interior (need m1+m2+m3 < 1-mz)");
  Domain d;
  d.kind_ = Kind::simplex;
  d.has_simplex_ = true;
  d.m_ = Eigen::Vector3d(m1, m2, m3);
  d.sum_cap_ = 1.0 - mz;
  static const char* floors[3] = {"x1_floor", "x2_floor", "x3_floor"};
  const double m[3] = {m1, m2, m3};
  for (int k = 0; k < 3; ++k) {
    Eigen::Vector3d n = Eigen::Vector3d::Zero();
    n[k] = -1.0;
    d.faces_.push_back({n, -m[k], floors[k]});
  }
  d.faces_.push_back({Eigen::Vector3d::Ones(), d.sum_cap_, "sum_cap"});
  return d;
}

Domain Domain::intersection(const Domain& box_part, const Domain& simplex_part) {
  if (box_part.kind_ != Kind::box || simplex_part.kind_ != Kind::simplex)
    throw ValidationError(
        "domain intersection expects a box part and a simplex part");
  Domain d;
  d.kind_ = Kind::intersection;
  d.has_box_ = true;
  d.has_simplex_ = true;
  d.lo_ = box_part.lo_;
  d.hi_ = box_part.hi_;
  d.m_ = simplex_part.m_;
  d.sum_cap_ = simplex_part.sum_cap_;
  d.faces_ = box_part.faces_;
  d.faces_.insert(d.faces_.end(), simplex_part.faces_.begin(),
                  simplex_part.faces_.end());
  return d;
}

// Closed membership, matching the facet description {a.x <= b}: a point on a
// face still counts as inside, and an exit is a sample strictly beyond one.
// This keeps boundary equilibria (x2 = x3 = 0 on the physical simplex)
// inside under zero noise.
bool Domain::contains(double x1, double x2, double x3) const {
  if (has_box_) {
    if (!(x1 >= lo_[0] && x1 <= hi_[0] && x2 >= lo_[1] && x2 <= hi_[1] &&
          x3 >= lo_[2] && x3 <= hi_[2]))
      return false;
  }
  if (has_simplex_) {
    if (!(x1 >= m_[0] && x2 >= m_[1] && x3 >= m_[2] &&
          x1 + x2 + x3 <= sum_cap_))
      return false;
  }
  return true;
}

Domain Domain::scaled(double c) const {
  if (!(c > 0.0)) throw ValidationError("domain scaling factor must be > 0");
  Domain d = *this;
  d.lo_ *= c;
  d.hi_ *= c;
  d.m_ *= c;
  d.sum_cap_ *= c;
  for (auto& f : d.faces_) f.b *= c;
  return d;
}

}  // namespace opiexit::exitstats
