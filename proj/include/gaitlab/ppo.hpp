#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <vector>

#include "gaitlab/env_interface.hpp"
#include "gaitlab/mlp.hpp"
#include "gaitlab/quad_env.hpp"
#include "gaitlab/trajectory.hpp"

namespace gaitlab {

// Diagonal-Gaussian actor: the tanh network output is mapped affinely
// onto the action box, the log standard deviations are free
// state-independent parameters.
struct GaussianPolicy {
  MlpParams net;
  Eigen::VectorXd log_std;
  Eigen::VectorXd box_center;
  Eigen::VectorXd box_half;

  static GaussianPolicy create(int state_dim,
                               const std::vector<Interval>& action_box,
                               const std::vector<int>& hidden,
                               double init_std_frac, Rng& rng);

  int action_dim() const { return static_cast<int>(log_std.size()); }
};

struct ValueNet {
  MlpParams net;

  static ValueNet create(int state_dim, const std::vector<int>& hidden,
                         Rng& rng);
};

// Mean action and std for one state; the mean lies inside the action box.
// Throws std::invalid_argument on a non-finite state.
std::pair<Eigen::VectorXd, Eigen::VectorXd> policy_forward(
    const GaussianPolicy& policy, const Eigen::VectorXd& state);

// Batched means, one column per state; optionally exposes the forward
// cache and the tanh layer output for backpropagation.
Eigen::MatrixXd policy_means(const GaussianPolicy& policy,
                             const Eigen::MatrixXd& states,
                             MlpCache* cache = nullptr,
                             Eigen::MatrixXd* tanh_out = nullptr);

Eigen::VectorXd value_forward(const ValueNet& value,
                              const Eigen::MatrixXd& states);

double gaussian_log_prob(const Eigen::VectorXd& action,
                         const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& std_dev);

struct PpoConfig {
  double gamma = 0.994;
  double lr_actor = 1e-4;
  double lr_critic = 1e-4;
  double kl_target = 0.01;   // delta
  int steps_per_epoch = 3000;
  int horizon = 1000;        // T, maximum episode length
  int n_envs = 30;
  double beta_kl_init = 1.0;
  int epochs = 300;
  long max_env_steps = 0;    // 0 means bounded by epochs alone
  int actor_iters = 20;      // full-batch ascent steps per epoch
  int critic_iters = 20;     // full-batch regression steps per epoch
  double init_std_frac = 0.3;  // initial std as a fraction of box half-width
  std::vector<int> hidden{200, 100};
  AdamConfig adam;

  void validate() const;  // throws std::invalid_argument
};

struct Transition {
  Eigen::VectorXd state;
  Eigen::VectorXd action;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool done = false;
  double logp_old = 0.0;  // recorded at sampling time
};

// Column-per-transition flat batch.
struct RolloutBatch {
  Eigen::MatrixXd states;
  Eigen::MatrixXd actions;
  Eigen::MatrixXd next_states;
  Eigen::VectorXd rewards;
  Eigen::VectorXd done;      // 1.0 on episode-terminal transitions
  Eigen::VectorXd logp_old;

  int size() const { return static_cast<int>(rewards.size()); }
};

// One-step TD advantage r + gamma * V(s') - V(s); terminal transitions
// bootstrap V(s') = 0.
double advantage(const Transition& t, const ValueNet& value, double gamma);
Eigen::VectorXd advantages(const RolloutBatch& batch, const ValueNet& value,
                           double gamma);

Eigen::VectorXd td_targets(const RolloutBatch& batch, const ValueNet& value,
                           double gamma);

// Mean closed-form KL(old || new) between the two diagonal Gaussians
// over the given states.
double kl_divergence(const GaussianPolicy& pi_old,
                     const GaussianPolicy& pi_new,
                     const Eigen::MatrixXd& states);

// beta halves below delta/1.5, doubles above delta*1.5, else unchanged.
double adapt_beta(double beta_kl, double d_kl, double delta);

struct SurrogateResult {
  double loss = 0.0;  // ascent objective: E[ratio * adv] - beta * E[KL]
  MlpGrads net_grads;
  Eigen::VectorXd log_std_grads;
  double mean_kl = 0.0;
};

// Loss and analytic gradients of the KL-penalized surrogate w.r.t. the
// current policy parameters. The old policy's means may be supplied
// precomputed (they are constant during an update phase).
SurrogateResult surrogate_loss(const RolloutBatch& batch,
                               const Eigen::VectorXd& advantage_values,
                               const GaussianPolicy& policy,
                               const Eigen::MatrixXd& old_means,
                               const Eigen::VectorXd& old_log_std,
                               double beta_kl);
SurrogateResult surrogate_loss(const RolloutBatch& batch,
                               const Eigen::VectorXd& advantage_values,
                               const GaussianPolicy& policy,
                               const GaussianPolicy& policy_old,
                               double beta_kl);

struct CriticResult {
  double loss = 0.0;  // mean squared error against the TD targets
  MlpGrads grads;
};

CriticResult critic_loss(const ValueNet& value, const Eigen::MatrixXd& states,
                         const Eigen::VectorXd& targets);

struct CollectStats {
  std::vector<double> completed_returns;
  double mean_speed = 0.0;
  double mean_dx = 0.0;
};

// Set of persistent rollout workers; episodes straddle collection calls.
class RolloutWorkers {
 public:
  using EnvFactory = std::function<std::unique_ptr<RolloutEnv>()>;

  RolloutWorkers(const EnvFactory& factory, int n_envs, std::uint64_t seed);

  // Gathers at least `min_steps` transitions (split evenly over the
  // workers), sampling from the policy and recording log-probs.
  RolloutBatch collect(const GaussianPolicy& policy, int min_steps,
                       int max_episode_len, CollectStats* stats = nullptr);

  long total_env_steps() const { return total_env_steps_; }

 private:
  struct Worker {
    std::unique_ptr<RolloutEnv> env;
    Eigen::VectorXd state;
    Rng rng;
    double episode_return = 0.0;
    int episode_len = 0;
  };

  std::vector<Worker> workers_;
  std::uint64_t reseed_counter_ = 0;
  long total_env_steps_ = 0;
};

struct CurveRow {
  int epoch = 0;
  double mean_return = 0.0;
  double mean_speed = 0.0;
  double d_kl = 0.0;
  double beta_kl = 0.0;
};

struct TrainResult {
  GaussianPolicy policy;
  ValueNet value;
  AdamState actor_adam;
  AdamState critic_adam;
  Eigen::VectorXd log_std_m, log_std_v;
  std::vector<CurveRow> curve;
  long env_steps = 0;
  double beta_kl = 0.0;
};

// KL-penalized PPO: alternate rollout collection with full-batch Adam
// ascent on the penalized surrogate and TD regression of the critic.
// Throws std::runtime_error naming the epoch if a loss turns NaN.
TrainResult train(const RolloutWorkers::EnvFactory& env_factory,
                  const PpoConfig& cfg, std::uint64_t seed,
                  std::ostream* progress = nullptr);

// Deterministic (mean-action) rollout recorded as a trajectory log.
TrajectoryLog evaluate_to_log(QuadEnv& env, const GaussianPolicy& policy,
                              int steps, std::uint64_t seed);

}  // namespace gaitlab
