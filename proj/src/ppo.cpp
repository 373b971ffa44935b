#include "gaitlab/ppo.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gaitlab {

namespace {
constexpr double kLogTwoPi = 1.8378770664093453;

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}
}  // namespace

void PpoConfig::validate() const {
  if (gamma < 0.0 || gamma > 1.0)
    throw std::invalid_argument("PpoConfig: gamma must be in [0, 1]");
  if (!(kl_target > 0.0))
    throw std::invalid_argument("PpoConfig: kl_target must be > 0");
  if (!(beta_kl_init > 0.0))
    throw std::invalid_argument("PpoConfig: beta_kl_init must be > 0");
  if (!(lr_actor > 0.0) || !(lr_critic > 0.0))
    throw std::invalid_argument("PpoConfig: learning rates must be > 0");
  if (steps_per_epoch <= 0 || horizon <= 0 || n_envs <= 0 || epochs <= 0)
    throw std::invalid_argument("PpoConfig: sizes must be positive");
  if (actor_iters <= 0 || critic_iters <= 0)
    throw std::invalid_argument("PpoConfig: update iterations must be >= 1");
  if (!(init_std_frac > 0.0))
    throw std::invalid_argument("PpoConfig: init_std_frac must be > 0");
  if (hidden.empty())
    throw std::invalid_argument("PpoConfig: need at least one hidden layer");
  for (int h : hidden)
    if (h <= 0)
      throw std::invalid_argument("PpoConfig: hidden sizes must be positive");
}

GaussianPolicy GaussianPolicy::create(int state_dim,
                                      const std::vector<Interval>& action_box,
                                      const std::vector<int>& hidden,
                                      double init_std_frac, Rng& rng) {
  const int d = static_cast<int>(action_box.size());
  if (d == 0) throw std::invalid_argument("GaussianPolicy: empty action box");
  GaussianPolicy p;
  std::vector<int> sizes;
  sizes.push_back(state_dim);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(d);
  p.net = MlpParams::create(sizes, rng);
  p.box_center.resize(d);
  p.box_half.resize(d);
  p.log_std.resize(d);
  for (int i = 0; i < d; ++i) {
    p.box_center(i) = action_box[i].mid();
    p.box_half(i) = action_box[i].half_width();
    if (!(p.box_half(i) > 0.0))
      throw std::invalid_argument("GaussianPolicy: degenerate action box");
    p.log_std(i) = std::log(init_std_frac * p.box_half(i));
  }
  return p;
}

ValueNet ValueNet::create(int state_dim, const std::vector<int>& hidden,
                          Rng& rng) {
  std::vector<int> sizes;
  sizes.push_back(state_dim);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  return ValueNet{MlpParams::create(sizes, rng)};
}

Eigen::MatrixXd policy_means(const GaussianPolicy& policy,
                             const Eigen::MatrixXd& states, MlpCache* cache,
                             Eigen::MatrixXd* tanh_out) {
  Eigen::MatrixXd raw = mlp_forward(policy.net, states, cache);
  Eigen::MatrixXd t = raw.array().tanh().matrix();
  if (tanh_out) *tanh_out = t;
  Eigen::MatrixXd means = policy.box_half.asDiagonal() * t;
  means.colwise() += policy.box_center;
  return means;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> policy_forward(
    const GaussianPolicy& policy, const Eigen::VectorXd& state) {
  if (!state.allFinite())
    throw std::invalid_argument("policy_forward: non-finite state");
  const Eigen::MatrixXd m = policy_means(policy, state);
  return {m.col(0), policy.log_std.array().exp().matrix()};
}

Eigen::VectorXd value_forward(const ValueNet& value,
                              const Eigen::MatrixXd& states) {
  return mlp_forward(value.net, states).row(0).transpose();
}

double gaussian_log_prob(const Eigen::VectorXd& action,
                         const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& std_dev) {
  const Eigen::ArrayXd z = (action - mean).array() / std_dev.array();
  return -0.5 * z.square().sum() - std_dev.array().log().sum() -
         0.5 * kLogTwoPi * static_cast<double>(action.size());
}

double advantage(const Transition& t, const ValueNet& value, double gamma) {
  const double v_s = value_forward(value, t.state)(0);
  const double v_next =
      t.done ? 0.0 : value_forward(value, t.next_state)(0);
  return t.reward + gamma * v_next - v_s;
}

Eigen::VectorXd advantages(const RolloutBatch& batch, const ValueNet& value,
                           double gamma) {
  const Eigen::VectorXd v_s = value_forward(value, batch.states);
  const Eigen::VectorXd v_next = value_forward(value, batch.next_states);
  return batch.rewards.array() +
         gamma * (1.0 - batch.done.array()) * v_next.array() - v_s.array();
}

Eigen::VectorXd td_targets(const RolloutBatch& batch, const ValueNet& value,
                           double gamma) {
  const Eigen::VectorXd v_next = value_forward(value, batch.next_states);
  return batch.rewards.array() +
         gamma * (1.0 - batch.done.array()) * v_next.array();
}

double kl_divergence(const GaussianPolicy& pi_old,
                     const GaussianPolicy& pi_new,
                     const Eigen::MatrixXd& states) {
  if (pi_old.action_dim() != pi_new.action_dim())
    throw std::invalid_argument("kl_divergence: dimension mismatch");
  const Eigen::MatrixXd mo = policy_means(pi_old, states);
  const Eigen::MatrixXd mn = policy_means(pi_new, states);
  const Eigen::ArrayXd var_old = (2.0 * pi_old.log_std.array()).exp();
  const Eigen::ArrayXd var_new = (2.0 * pi_new.log_std.array()).exp();
  const Eigen::ArrayXd log_ratio =
      pi_new.log_std.array() - pi_old.log_std.array();
  const int n = static_cast<int>(states.cols());
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::ArrayXd dm = (mo.col(i) - mn.col(i)).array();
    acc += (log_ratio + (var_old + dm.square()) / (2.0 * var_new) - 0.5).sum();
  }
  return acc / static_cast<double>(n);
}

double adapt_beta(double beta_kl, double d_kl, double delta) {
  if (!(beta_kl > 0.0) || !(delta > 0.0) || d_kl < 0.0)
    throw std::invalid_argument("adapt_beta: arguments must be positive");
  if (d_kl < delta / 1.5) return beta_kl / 2.0;
  if (d_kl > delta * 1.5) return beta_kl * 2.0;
  return beta_kl;
}

SurrogateResult surrogate_loss(const RolloutBatch& batch,
                               const Eigen::VectorXd& advantage_values,
                               const GaussianPolicy& policy,
                               const Eigen::MatrixXd& old_means,
                               const Eigen::VectorXd& old_log_std,
                               double beta_kl) {
  const int n = batch.size();
  if (n == 0) throw std::invalid_argument("surrogate_loss: empty batch");
  if (advantage_values.size() != n)
    throw std::invalid_argument("surrogate_loss: advantage size mismatch");
  const int d = policy.action_dim();

  MlpCache cache;
  Eigen::MatrixXd tanh_out;
  const Eigen::MatrixXd means =
      policy_means(policy, batch.states, &cache, &tanh_out);

  const Eigen::ArrayXd sigma = policy.log_std.array().exp();
  const Eigen::ArrayXd var = sigma.square();
  const Eigen::ArrayXd var_old = (2.0 * old_log_std.array()).exp();
  const Eigen::ArrayXd log_ratio_std =
      policy.log_std.array() - old_log_std.array();

  const double inv_n = 1.0 / static_cast<double>(n);
  double sum_ratio_adv = 0.0;
  double sum_kl = 0.0;
  Eigen::MatrixXd d_means = Eigen::MatrixXd::Zero(d, n);
  Eigen::VectorXd d_log_std = Eigen::VectorXd::Zero(d);

  for (int i = 0; i < n; ++i) {
    const Eigen::ArrayXd diff = (batch.actions.col(i) - means.col(i)).array();
    const Eigen::ArrayXd z2 = diff.square() / var;
    const double logp = -0.5 * z2.sum() - policy.log_std.sum() -
                        0.5 * kLogTwoPi * static_cast<double>(d);
    const double ratio = std::exp(logp - batch.logp_old(i));
    const double w = advantage_values(i) * ratio;
    sum_ratio_adv += w;

    const Eigen::ArrayXd dm_old = (old_means.col(i) - means.col(i)).array();
    sum_kl +=
        (log_ratio_std + (var_old + dm_old.square()) / (2.0 * var) - 0.5)
            .sum();

    // d/d mean of ratio*adv and of the KL penalty.
    d_means.col(i) =
        (inv_n * (w * diff / var + beta_kl * dm_old / var)).matrix();
    d_log_std.array() +=
        inv_n * (w * (z2 - 1.0) -
                 beta_kl * (1.0 - (var_old + dm_old.square()) / var));
  }

  SurrogateResult out;
  out.mean_kl = sum_kl * inv_n;
  out.loss = sum_ratio_adv * inv_n - beta_kl * out.mean_kl;
  out.log_std_grads = d_log_std;

  // Through the affine tanh head: mean = center + half .* tanh(raw).
  Eigen::MatrixXd d_raw =
      (policy.box_half.asDiagonal() * d_means).array() *
      (1.0 - tanh_out.array().square());
  out.net_grads = MlpGrads::zeros_like(policy.net);
  mlp_backward(policy.net, cache, d_raw, out.net_grads);
  return out;
}

SurrogateResult surrogate_loss(const RolloutBatch& batch,
                               const Eigen::VectorXd& advantage_values,
                               const GaussianPolicy& policy,
                               const GaussianPolicy& policy_old,
                               double beta_kl) {
  const Eigen::MatrixXd old_means = policy_means(policy_old, batch.states);
  return surrogate_loss(batch, advantage_values, policy, old_means,
                        policy_old.log_std, beta_kl);
}

CriticResult critic_loss(const ValueNet& value, const Eigen::MatrixXd& states,
                         const Eigen::VectorXd& targets) {
  const int n = static_cast<int>(states.cols());
  if (n == 0 || targets.size() != n)
    throw std::invalid_argument("critic_loss: batch/target size mismatch");
  MlpCache cache;
  const Eigen::MatrixXd v = mlp_forward(value.net, states, &cache);
  const Eigen::RowVectorXd err = v.row(0) - targets.transpose();
  CriticResult out;
  out.loss = err.squaredNorm() / static_cast<double>(n);
  const Eigen::MatrixXd dout = 2.0 * err / static_cast<double>(n);
  out.grads = MlpGrads::zeros_like(value.net);
  mlp_backward(value.net, cache, dout, out.grads);
  return out;
}

RolloutWorkers::RolloutWorkers(const EnvFactory& factory, int n_envs,
                               std::uint64_t seed) {
  if (n_envs <= 0)
    throw std::invalid_argument("RolloutWorkers: n_envs must be positive");
  for (int i = 0; i < n_envs; ++i) {
    Worker w{factory(), Eigen::VectorXd(), Rng(mix_seed(seed, 2 * i)), 0.0, 0};
    w.state = w.env->reset(mix_seed(seed, 2 * i + 1));
    workers_.push_back(std::move(w));
  }
  reseed_counter_ = 2 * static_cast<std::uint64_t>(n_envs);
}

RolloutBatch RolloutWorkers::collect(const GaussianPolicy& policy,
                                     int min_steps, int max_episode_len,
                                     CollectStats* stats) {
  const int n_workers = static_cast<int>(workers_.size());
  const int per_worker = (min_steps + n_workers - 1) / n_workers;
  const int total = per_worker * n_workers;
  const int d = policy.action_dim();
  const int sd = static_cast<int>(workers_[0].state.size());

  RolloutBatch batch;
  batch.states.resize(sd, total);
  batch.actions.resize(d, total);
  batch.next_states.resize(sd, total);
  batch.rewards.resize(total);
  batch.done.resize(total);
  batch.logp_old.resize(total);

  double speed_sum = 0.0;
  double dx_sum = 0.0;
  if (stats) *stats = CollectStats{};

  int col = 0;
  for (int wi = 0; wi < n_workers; ++wi) {
    Worker& w = workers_[wi];
    for (int k = 0; k < per_worker; ++k, ++col) {
      const auto [mean, std_dev] = policy_forward(policy, w.state);
      Eigen::VectorXd action(d);
      for (int j = 0; j < d; ++j)
        action(j) = mean(j) + std_dev(j) * w.rng.gaussian();
      const double logp = gaussian_log_prob(action, mean, std_dev);

      RolloutEnv::Feedback fb;
      try {
        fb = w.env->step(action);
      } catch (const std::exception& e) {
        throw std::runtime_error("rollout worker " + std::to_string(wi) +
                                 ": " + e.what());
      }
      ++total_env_steps_;
      w.episode_return += fb.reward;
      ++w.episode_len;
      const bool done = fb.done || w.episode_len >= max_episode_len;

      batch.states.col(col) = w.state;
      batch.actions.col(col) = action;
      batch.next_states.col(col) = fb.next_state;
      batch.rewards(col) = fb.reward;
      batch.done(col) = done ? 1.0 : 0.0;
      batch.logp_old(col) = logp;
      speed_sum += fb.speed;
      dx_sum += fb.dx;

      if (done) {
        if (stats) stats->completed_returns.push_back(w.episode_return);
        w.state = w.env->reset(mix_seed(0x5eedULL, reseed_counter_++));
        w.episode_return = 0.0;
        w.episode_len = 0;
      } else {
        w.state = fb.next_state;
      }
    }
  }

  if (stats) {
    stats->mean_speed = speed_sum / static_cast<double>(total);
    stats->mean_dx = dx_sum / static_cast<double>(total);
  }
  return batch;
}

TrainResult train(const RolloutWorkers::EnvFactory& env_factory,
                  const PpoConfig& cfg, std::uint64_t seed,
                  std::ostream* progress) {
  cfg.validate();
  Rng init_rng(mix_seed(seed, 0));

  const auto probe = env_factory();
  const int state_dim = probe->state_dim();
  const auto box = probe->action_box();

  TrainResult res;
  res.policy = GaussianPolicy::create(state_dim, box, cfg.hidden,
                                      cfg.init_std_frac, init_rng);
  res.value = ValueNet::create(state_dim, cfg.hidden, init_rng);
  res.actor_adam = AdamState::zeros_like(res.policy.net);
  res.critic_adam = AdamState::zeros_like(res.value.net);
  res.log_std_m = Eigen::VectorXd::Zero(res.policy.action_dim());
  res.log_std_v = Eigen::VectorXd::Zero(res.policy.action_dim());
  res.beta_kl = cfg.beta_kl_init;

  RolloutWorkers workers(env_factory, cfg.n_envs, mix_seed(seed, 1));

  double last_mean_return = 0.0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    CollectStats stats;
    RolloutBatch batch =
        workers.collect(res.policy, cfg.steps_per_epoch, cfg.horizon, &stats);

    const Eigen::VectorXd adv = advantages(batch, res.value, cfg.gamma);
    const Eigen::VectorXd targets = td_targets(batch, res.value, cfg.gamma);

    const GaussianPolicy policy_old = res.policy;
    const Eigen::MatrixXd old_means = policy_means(policy_old, batch.states);

    double actor_loss = 0.0;
    for (int it = 0; it < cfg.actor_iters; ++it) {
      SurrogateResult sr = surrogate_loss(batch, adv, res.policy, old_means,
                                          policy_old.log_std, res.beta_kl);
      actor_loss = sr.loss;
      if (!std::isfinite(actor_loss))
        throw std::runtime_error("train: non-finite actor loss at epoch " +
                                 std::to_string(epoch));
      sr.net_grads.scale(-1.0);  // ascend the surrogate
      adam_update(res.policy.net, sr.net_grads, res.actor_adam, cfg.lr_actor,
                  cfg.adam);
      adam_update_vector(res.policy.log_std, -sr.log_std_grads, res.log_std_m,
                         res.log_std_v, res.actor_adam.t, cfg.lr_actor,
                         cfg.adam);
    }

    const double d_kl = kl_divergence(policy_old, res.policy, batch.states);
    if (!std::isfinite(d_kl))
      throw std::runtime_error("train: non-finite KL at epoch " +
                               std::to_string(epoch));
    res.beta_kl = adapt_beta(res.beta_kl, d_kl, cfg.kl_target);

    double critic_mse = 0.0;
    for (int it = 0; it < cfg.critic_iters; ++it) {
      CriticResult cr = critic_loss(res.value, batch.states, targets);
      critic_mse = cr.loss;
      if (!std::isfinite(critic_mse))
        throw std::runtime_error("train: non-finite critic loss at epoch " +
                                 std::to_string(epoch));
      adam_update(res.value.net, cr.grads, res.critic_adam, cfg.lr_critic,
                  cfg.adam);
    }

    if (!stats.completed_returns.empty()) {
      double s = 0.0;
      for (double r : stats.completed_returns) s += r;
      last_mean_return = s / static_cast<double>(stats.completed_returns.size());
    }
    res.curve.push_back(
        {epoch, last_mean_return, stats.mean_speed, d_kl, res.beta_kl});
    res.env_steps = workers.total_env_steps();

    if (progress) {
      (*progress) << "epoch " << epoch << "  return " << last_mean_return
                  << "  speed " << stats.mean_speed << "  kl " << d_kl
                  << "  beta " << res.beta_kl << "  actor_loss " << actor_loss
                  << "  critic_mse " << critic_mse << "\n";
      progress->flush();
    }

    if (cfg.max_env_steps > 0 && res.env_steps >= cfg.max_env_steps) break;
  }
  return res;
}

TrajectoryLog evaluate_to_log(QuadEnv& env, const GaussianPolicy& policy,
                              int steps, std::uint64_t seed) {
  if (steps <= 0)
    throw std::invalid_argument("evaluate_to_log: steps must be positive");
  const double dt = env.config().dt;
  const int rows = steps + 1;

  TrajectoryLog log;
  log.time.resize(rows);
  log.joints.resize(rows, kNumJoints);
  log.vels.resize(rows, kNumJoints);
  log.taus.resize(rows, kNumJoints);
  log.quat.resize(rows, 4);
  log.has_base = true;
  log.base_x.resize(rows);
  log.base_z.resize(rows);

  auto record = [&](int row, const EnvState& s) {
    log.time(row) = row * dt;
    log.joints.row(row) = s.joint_angles.transpose();
    log.vels.row(row) = s.joint_velocities.transpose();
    log.taus.row(row) = s.joint_torques.transpose();
    log.quat.row(row) = s.orientation.transpose();
    log.base_x(row) = s.base_x;
    log.base_z(row) = s.base_z;
  };

  EnvState s = env.reset_state(seed);
  record(0, s);
  for (int k = 1; k <= steps; ++k) {
    const auto [mean, std_dev] = policy_forward(policy, s.observed());
    (void)std_dev;
    const StepResult r = env.step_action(env.action_from_flat(mean));
    s = r.next_state;
    record(k, s);
  }
  return log;
}

}  // namespace gaitlab
