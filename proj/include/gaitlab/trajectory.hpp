#pragma once

#include <Eigen/Dense>
#include <array>

namespace gaitlab {

// Canonical joint column order used by every log, cycle and file format.
inline constexpr std::array<const char*, 8> kJointColumns = {
    "fl_hip", "fl_knee", "fr_hip", "fr_knee",
    "bl_hip", "bl_knee", "br_hip", "br_knee"};

inline constexpr int kNumLegs = 4;
inline constexpr int kNumJoints = 8;

// Uniformly sampled rollout record. Base position columns are optional
// in memory; the CSV schema always carries them.
struct TrajectoryLog {
  Eigen::VectorXd time;    // s, strictly increasing, uniform spacing
  Eigen::MatrixXd joints;  // N x 8, rad
  Eigen::MatrixXd vels;    // N x 8, rad/s
  Eigen::MatrixXd taus;    // N x 8, N*m
  Eigen::MatrixXd quat;    // N x 4, (w, x, y, z)
  bool has_base = false;
  Eigen::VectorXd base_x;  // m
  Eigen::VectorXd base_z;  // m

  int rows() const { return static_cast<int>(time.size()); }

  // Throws std::invalid_argument unless time increases strictly with a
  // constant step (within 1e-9) and all blocks have matching row counts.
  void validate() const;

  // Row range copy [begin, end).
  TrajectoryLog slice(int begin, int end) const;
};

}  // namespace gaitlab
