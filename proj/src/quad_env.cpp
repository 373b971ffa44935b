#include "gaitlab/quad_env.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gaitlab {

namespace {

// Leg indices in column order.
constexpr int kFL = 0, kFR = 1, kBL = 2, kBR = 3;

const char* leg_name(int leg) {
  static constexpr const char* names[4] = {"fl", "fr", "bl", "br"};
  return names[leg];
}

}  // namespace

void EnvConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("EnvConfig: dt must be > 0");
  if (!(mass > 0.0)) throw std::invalid_argument("EnvConfig: mass must be > 0");
  if (!(gravity > 0.0))
    throw std::invalid_argument("EnvConfig: gravity must be > 0");
  if (w_vel < 0.0 || w_energy < 0.0)
    throw std::invalid_argument("EnvConfig: reward weights must be >= 0");
  if (horizon <= 0)
    throw std::invalid_argument("EnvConfig: horizon must be positive");
  if (stance_tol < 0.0)
    throw std::invalid_argument("EnvConfig: stance_tol must be >= 0");
  if (!(speed_filter > 0.0) || speed_filter > 1.0)
    throw std::invalid_argument("EnvConfig: speed_filter must be in (0, 1]");
  if (!(hip_span > 0.0))
    throw std::invalid_argument("EnvConfig: hip_span must be > 0");
  geometry.validate();
}

Eigen::VectorXd EnvState::observed() const {
  Eigen::VectorXd s(28);
  s.segment(0, 8) = joint_angles;
  s.segment(8, 8) = joint_velocities;
  s.segment(16, 8) = joint_torques;
  s.segment(24, 4) = orientation;
  return s;
}

double reward(double dx, double de, double w_vel, double w_energy) {
  const double sgn = dx > 0.0 ? 1.0 : (dx < 0.0 ? -1.0 : 0.0);
  return w_vel * sgn * std::max(std::abs(dx), 0.1) - w_energy * de;
}

double energy_increment(const Eigen::VectorXd& torques,
                        const Eigen::VectorXd& velocities, double dt) {
  if (torques.size() != velocities.size())
    throw std::invalid_argument("energy_increment: size mismatch");
  if (!(dt > 0.0)) throw std::invalid_argument("energy_increment: dt <= 0");
  return torques.cwiseProduct(velocities).cwiseAbs().sum() * dt;
}

std::vector<int> stance_assignment(const Eigen::Vector4d& foot_heights,
                                   double tol) {
  const double lowest = foot_heights.minCoeff();
  std::vector<int> stance;
  for (int i = 0; i < kNumLegs; ++i)
    if (foot_heights(i) <= lowest + tol) stance.push_back(i);
  return stance;
}

Eigen::VectorXd quasi_static_torques(const Eigen::VectorXd& joint_angles,
                                     const std::vector<int>& stance,
                                     const EnvConfig& config) {
  if (stance.empty())
    throw std::invalid_argument("quasi_static_torques: empty stance set");
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(kNumJoints);
  const double load =
      config.mass * config.gravity / static_cast<double>(stance.size());
  for (int leg : stance) {
    const JointPair j{joint_angles(2 * leg), joint_angles(2 * leg + 1)};
    const Eigen::Matrix2d jac = leg_jacobian(config.geometry, j);
    const Eigen::Vector2d t = jac.transpose() * Eigen::Vector2d(0.0, load);
    tau(2 * leg) = t(0);
    tau(2 * leg + 1) = t(1);
  }
  return tau;
}

QuadEnv::QuadEnv(EnvConfig config) : config_(std::move(config)) {
  config_.validate();
  reset_state(0);
}

std::vector<Interval> QuadEnv::action_box() const {
  const int groups = action_dim() / 2;
  std::vector<Interval> box;
  box.reserve(2 * groups);
  for (int g = 0; g < groups; ++g) {
    box.push_back(config_.geometry.r_range);
    box.push_back(config_.geometry.alpha_range);
  }
  return box;
}

EnvAction QuadEnv::action_from_flat(const Eigen::VectorXd& flat) const {
  if (flat.size() != action_dim())
    throw std::invalid_argument("QuadEnv: expected " +
                                std::to_string(action_dim()) +
                                " action values, got " +
                                std::to_string(flat.size()));
  EnvAction a;
  for (int g = 0; g < action_dim() / 2; ++g)
    a.endpoints.push_back({flat(2 * g), flat(2 * g + 1)});
  return a;
}

EnvState QuadEnv::reset_state(std::uint64_t seed) {
  seed_ = seed;
  step_count_ = 0;
  filtered_speed_ = 0.0;

  state_ = EnvState{};
  const PolarEndpoint nominal{config_.geometry.r_range.mid(), 0.0};
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const JointPair j =
        inverse_kinematics(config_.geometry, nominal, leg_name(leg));
    state_.joint_angles(2 * leg) = j.beta1;
    state_.joint_angles(2 * leg + 1) = j.beta2;
    state_.foot_xz.row(leg) = leg_forward_xz(config_.geometry, j).transpose();
  }
  state_.base_z = state_.foot_xz.col(1).mean();
  return state_;
}

Eigen::VectorXd QuadEnv::reset(std::uint64_t seed) {
  return reset_state(seed).observed();
}

StepResult QuadEnv::step_action(const EnvAction& action) {
  // Expand leg-group commands to all four legs.
  std::array<PolarEndpoint, kNumLegs> target;
  if (config_.symmetry == SymmetryMode::Full8) {
    if (action.endpoints.size() != 4)
      throw std::invalid_argument("QuadEnv: Full8 expects 4 endpoints");
    for (int leg = 0; leg < kNumLegs; ++leg) target[leg] = action.endpoints[leg];
  } else {
    if (action.endpoints.size() != 2)
      throw std::invalid_argument("QuadEnv: TrotDiagonal4 expects 2 endpoints");
    target[kFL] = target[kBR] = action.endpoints[0];
    target[kFR] = target[kBL] = action.endpoints[1];
  }
  for (int leg = 0; leg < kNumLegs; ++leg)
    if (!std::isfinite(target[leg].r) || !std::isfinite(target[leg].alpha))
      throw std::runtime_error(std::string("QuadEnv: non-finite action for ") +
                               leg_name(leg));

  EnvState next = state_;
  Eigen::Matrix<double, 4, 2> foot_prev = state_.foot_xz;

  for (int leg = 0; leg < kNumLegs; ++leg) {
    const PolarEndpoint p = clamp_endpoint(config_.geometry, target[leg]);
    const JointPair j = inverse_kinematics(config_.geometry, p, leg_name(leg));
    next.joint_angles(2 * leg) = j.beta1;
    next.joint_angles(2 * leg + 1) = j.beta2;
    next.foot_xz.row(leg) = leg_forward_xz(config_.geometry, j).transpose();
  }
  next.joint_velocities =
      (next.joint_angles - state_.joint_angles) / config_.dt;

  // Ground contact: the lowest feet (largest downward extent) carry the body.
  Eigen::Vector4d heights = -next.foot_xz.col(1);
  const std::vector<int> stance = stance_assignment(heights, config_.stance_tol);

  // Anchored stance feet: their mean rearward sweep is the body's advance.
  double dx = 0.0;
  for (int leg : stance) dx -= next.foot_xz(leg, 0) - foot_prev(leg, 0);
  dx /= static_cast<double>(stance.size());

  next.joint_torques = quasi_static_torques(next.joint_angles, stance, config_);
  const double de =
      energy_increment(next.joint_torques, next.joint_velocities, config_.dt);
  const double r = reward(dx, de, config_.w_vel, config_.w_energy);

  next.base_x = state_.base_x + dx;

  double stance_extent = 0.0;
  for (int leg : stance) stance_extent += next.foot_xz(leg, 1);
  next.base_z = stance_extent / static_cast<double>(stance.size());

  // Pitch from the front/rear stance extent difference; a leg group with
  // no stance member falls back to its swing extents.
  auto group_extent = [&](int a, int b) {
    double sum = 0.0;
    int cnt = 0;
    for (int leg : stance)
      if (leg == a || leg == b) {
        sum += next.foot_xz(leg, 1);
        ++cnt;
      }
    if (cnt == 0) return 0.5 * (next.foot_xz(a, 1) + next.foot_xz(b, 1));
    return sum / cnt;
  };
  const double front = group_extent(kFL, kFR);
  const double rear = group_extent(kBL, kBR);
  next.pitch = std::atan2(front - rear, config_.hip_span);
  next.orientation << std::cos(0.5 * next.pitch), 0.0,
      std::sin(0.5 * next.pitch), 0.0;

  filtered_speed_ += config_.speed_filter * (dx / config_.dt - filtered_speed_);

  state_ = next;
  ++step_count_;

  StepResult out;
  out.next_state = state_;
  out.reward = r;
  out.done = step_count_ >= config_.horizon;
  out.info = {dx, de, filtered_speed_};
  return out;
}

RolloutEnv::Feedback QuadEnv::step(const Eigen::VectorXd& flat_action) {
  const StepResult r = step_action(action_from_flat(flat_action));
  Feedback f;
  f.next_state = r.next_state.observed();
  f.reward = r.reward;
  f.done = r.done;
  f.dx = r.info.dx;
  f.de = r.info.de;
  f.speed = r.info.speed;
  return f;
}

}  // namespace gaitlab
