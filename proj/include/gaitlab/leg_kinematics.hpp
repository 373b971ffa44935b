#pragma once

#include <Eigen/Dense>
#include <string>

namespace gaitlab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
  bool contains(double v) const { return v >= lo && v <= hi; }
  double mid() const { return 0.5 * (lo + hi); }
  double half_width() const { return 0.5 * (hi - lo); }
};

// Two-link planar leg. The leg plane is spanned by x (forward) and z
// (downward from the hip). Angles follow one fixed convention:
//   alpha  endpoint direction from the downward vertical, positive forward
//   beta1  hip angle from the downward vertical, positive forward
//   beta2  knee deflection from the straight leg, positive bends the knee
//          rearward (the only branch the solver returns)
struct LegGeometry {
  double l_upper = 0.120;  // m
  double l_lower = 0.120;  // m
  Interval hip_limits{-0.785398163397448279, 0.785398163397448279};    // rad
  Interval knee_limits{-1.221730476396030703, 1.221730476396030703};   // rad
  Interval r_range{0.15, 0.24};                                        // m
  Interval alpha_range{-0.523598775598298816, 0.523598775598298816};   // rad

  void validate() const;  // throws std::invalid_argument on bad values
};

struct PolarEndpoint {
  double r = 0.0;      // radial distance from the hip, m
  double alpha = 0.0;  // angle from the downward vertical, rad
};

struct JointPair {
  double beta1 = 0.0;  // hip, rad
  double beta2 = 0.0;  // knee, rad
};

// Hip and knee angles reaching the endpoint, knee bent rearward.
// Throws std::domain_error when the radius is outside the reachable
// annulus; `leg_name`, when given, is included in the message.
JointPair inverse_kinematics(const LegGeometry& geom, const PolarEndpoint& p,
                             const std::string& leg_name = {});

PolarEndpoint forward_kinematics(const LegGeometry& geom, const JointPair& j);

// Foot position relative to the hip as (x forward, z downward), m.
Eigen::Vector2d leg_forward_xz(const LegGeometry& geom, const JointPair& j);

// Componentwise projection onto r_range x alpha_range.
PolarEndpoint clamp_endpoint(const LegGeometry& geom, const PolarEndpoint& p);

// Componentwise projection onto the hip/knee limit intervals.
JointPair clamp_joints(const LegGeometry& geom, const JointPair& j);

// d(foot x, foot z) / d(beta1, beta2); singular at the straight leg.
Eigen::Matrix2d leg_jacobian(const LegGeometry& geom, const JointPair& j);

}  // namespace gaitlab
