#include "gaitlab/leg_kinematics.hpp"

#include <cmath>
#include <stdexcept>

namespace gaitlab {

namespace {
constexpr double kReachSlack = 1e-9;

double clamp_unit(double v) { return v < -1.0 ? -1.0 : (v > 1.0 ? 1.0 : v); }
}  // namespace

void LegGeometry::validate() const {
  if (!(l_upper > 0.0) || !(l_lower > 0.0))
    throw std::invalid_argument("LegGeometry: link lengths must be positive");
  if (hip_limits.lo > hip_limits.hi || knee_limits.lo > knee_limits.hi ||
      r_range.lo > r_range.hi || alpha_range.lo > alpha_range.hi)
    throw std::invalid_argument("LegGeometry: interval bounds out of order");
  const double r_min = std::abs(l_upper - l_lower);
  const double r_max = l_upper + l_lower;
  if (r_range.lo < r_min - kReachSlack || r_range.hi > r_max + kReachSlack)
    throw std::invalid_argument(
        "LegGeometry: r_range exceeds the reachable annulus");
}

JointPair inverse_kinematics(const LegGeometry& geom, const PolarEndpoint& p,
                             const std::string& leg_name) {
  const double l1 = geom.l_upper;
  const double l2 = geom.l_lower;
  const double r_min = std::abs(l1 - l2);
  const double r_max = l1 + l2;
  if (!(p.r >= r_min + kReachSlack) || !(p.r <= r_max + kReachSlack)) {
    std::string who = leg_name.empty() ? std::string("leg") : leg_name;
    throw std::domain_error("inverse_kinematics: radius " +
                            std::to_string(p.r) + " for " + who +
                            " outside reachable [" + std::to_string(r_min) +
                            ", " + std::to_string(r_max) + "]");
  }
  const double d = std::min(p.r, r_max);
  // Interior knee angle from the law of cosines; beta2 is its
  // deflection from the straight configuration.
  const double cos_int = clamp_unit((l1 * l1 + l2 * l2 - d * d) /
                                    (2.0 * l1 * l2));
  const double beta2 = M_PI - std::acos(cos_int);
  // Angle between the hip-foot chord and the upper link; the rearward
  // knee branch puts the upper link behind the chord.
  const double cos_hip = clamp_unit((l1 * l1 + d * d - l2 * l2) /
                                    (2.0 * l1 * d));
  const double beta1 = p.alpha - std::acos(cos_hip);
  return {beta1, beta2};
}

Eigen::Vector2d leg_forward_xz(const LegGeometry& geom, const JointPair& j) {
  const double a1 = j.beta1;
  const double a2 = j.beta1 + j.beta2;
  return {geom.l_upper * std::sin(a1) + geom.l_lower * std::sin(a2),
          geom.l_upper * std::cos(a1) + geom.l_lower * std::cos(a2)};
}

PolarEndpoint forward_kinematics(const LegGeometry& geom, const JointPair& j) {
  const Eigen::Vector2d f = leg_forward_xz(geom, j);
  return {f.norm(), std::atan2(f.x(), f.y())};
}

PolarEndpoint clamp_endpoint(const LegGeometry& geom, const PolarEndpoint& p) {
  return {geom.r_range.clamp(p.r), geom.alpha_range.clamp(p.alpha)};
}

JointPair clamp_joints(const LegGeometry& geom, const JointPair& j) {
  return {geom.hip_limits.clamp(j.beta1), geom.knee_limits.clamp(j.beta2)};
}

Eigen::Matrix2d leg_jacobian(const LegGeometry& geom, const JointPair& j) {
  const double a1 = j.beta1;
  const double a2 = j.beta1 + j.beta2;
  const double x1 = geom.l_upper * std::sin(a1);
  const double z1 = geom.l_upper * std::cos(a1);
  const double x2 = geom.l_lower * std::sin(a2);
  const double z2 = geom.l_lower * std::cos(a2);
  Eigen::Matrix2d jac;
  jac << z1 + z2, z2,
        -(x1 + x2), -x2;
  return jac;
}

}  // namespace gaitlab
