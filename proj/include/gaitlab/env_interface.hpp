#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gaitlab/leg_kinematics.hpp"

namespace gaitlab {

// Minimal episodic-environment surface the rollout collector and
// trainer consume. Implementations own their episode state; one
// instance per worker.
class RolloutEnv {
 public:
  struct Feedback {
    Eigen::VectorXd next_state;
    double reward = 0.0;
    bool done = false;
    double dx = 0.0;     // forward base displacement this step, m
    double de = 0.0;     // actuator energy this step, J
    double speed = 0.0;  // filtered forward speed, m/s
  };

  virtual ~RolloutEnv() = default;

  virtual int state_dim() const = 0;
  virtual int action_dim() const = 0;
  // Per-dimension action bounds; policies map their tanh head onto this box.
  virtual std::vector<Interval> action_box() const = 0;

  virtual Eigen::VectorXd reset(std::uint64_t seed) = 0;
  virtual Feedback step(const Eigen::VectorXd& action) = 0;
};

}  // namespace gaitlab
