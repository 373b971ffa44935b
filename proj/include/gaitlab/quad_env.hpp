#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gaitlab/env_interface.hpp"
#include "gaitlab/leg_kinematics.hpp"
#include "gaitlab/trajectory.hpp"

namespace gaitlab {

enum class SymmetryMode {
  Full8,         // one endpoint per leg, 8 action scalars
  TrotDiagonal4  // diagonal legs share a command, 4 action scalars
};

struct EnvConfig {
  double dt = 0.01;          // s
  double mass = 3.0;         // kg
  double gravity = 9.8;      // m/s^2
  double w_vel = 1.0;
  double w_energy = 0.05;
  int horizon = 1000;        // episode length T
  double stance_tol = 0.002;     // m, height band counted as ground contact
  double speed_filter = 0.2;     // EMA coefficient for the speed readout
  double hip_span = 0.38;        // m, front-to-rear hip distance (pitch lever)
  SymmetryMode symmetry = SymmetryMode::TrotDiagonal4;
  LegGeometry geometry;

  void validate() const;  // throws std::invalid_argument
};

// Full simulator state. The policy sees observed(): angles, velocities,
// torques and the body quaternion, 28 values. Base position and foot
// points are bookkeeping for logs and analytics.
struct EnvState {
  Eigen::VectorXd joint_angles{Eigen::VectorXd::Zero(kNumJoints)};
  Eigen::VectorXd joint_velocities{Eigen::VectorXd::Zero(kNumJoints)};
  Eigen::VectorXd joint_torques{Eigen::VectorXd::Zero(kNumJoints)};
  Eigen::Vector4d orientation{1.0, 0.0, 0.0, 0.0};  // (w, x, y, z), pitch only
  double base_x = 0.0;
  double base_z = 0.0;
  double pitch = 0.0;
  Eigen::Matrix<double, 4, 2> foot_xz =
      Eigen::Matrix<double, 4, 2>::Zero();  // per leg: (forward, downward)

  Eigen::VectorXd observed() const;  // length 28
};

struct EnvAction {
  // One entry per independent leg group: 4 in Full8 (FL, FR, BL, BR),
  // 2 in TrotDiagonal4 ({FL,BR} then {FR,BL}).
  std::vector<PolarEndpoint> endpoints;
};

struct StepInfo {
  double dx = 0.0;
  double de = 0.0;
  double speed = 0.0;
};

struct StepResult {
  EnvState next_state;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

// r_t = w_vel * sign(dx) * max{|dx|, 0.1} - w_E * dE, with sign(0) = 0.
double reward(double dx, double de, double w_vel, double w_energy);

// Sum over joints of |tau * omega| * dt; never negative.
double energy_increment(const Eigen::VectorXd& torques,
                        const Eigen::VectorXd& velocities, double dt);

// Legs whose foot height is within tol of the lowest foot. Never empty.
std::vector<int> stance_assignment(const Eigen::Vector4d& foot_heights,
                                   double tol);

// Gravity load m*g split evenly over the stance legs and pushed through
// each stance leg's Jacobian transpose; swing joints get zero.
Eigen::VectorXd quasi_static_torques(const Eigen::VectorXd& joint_angles,
                                     const std::vector<int>& stance,
                                     const EnvConfig& config);

// Deterministic quasi-static surrogate of the quadruped MDP: planar
// body, stance feet anchor the trunk, forward motion equals the mean
// stance-foot retraction in the body frame.
class QuadEnv final : public RolloutEnv {
 public:
  explicit QuadEnv(EnvConfig config);

  int state_dim() const override { return 28; }
  int action_dim() const override {
    return config_.symmetry == SymmetryMode::Full8 ? 8 : 4;
  }
  std::vector<Interval> action_box() const override;

  Eigen::VectorXd reset(std::uint64_t seed) override;
  Feedback step(const Eigen::VectorXd& flat_action) override;

  // Rich-state variants of the same transitions.
  EnvState reset_state(std::uint64_t seed);
  StepResult step_action(const EnvAction& action);

  EnvAction action_from_flat(const Eigen::VectorXd& flat) const;
  const EnvState& state() const { return state_; }
  const EnvConfig& config() const { return config_; }
  int steps_taken() const { return step_count_; }

 private:
  EnvConfig config_;
  EnvState state_;
  int step_count_ = 0;
  double filtered_speed_ = 0.0;
  std::uint64_t seed_ = 0;
};

}  // namespace gaitlab
