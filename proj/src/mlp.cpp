#include "gaitlab/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace gaitlab {

MlpParams MlpParams::create(const std::vector<int>& layer_sizes, Rng& rng) {
  if (layer_sizes.size() < 2)
    throw std::invalid_argument("MlpParams: need input and output sizes");
  MlpParams p;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int in = layer_sizes[l];
    const int out = layer_sizes[l + 1];
    if (in <= 0 || out <= 0)
      throw std::invalid_argument("MlpParams: layer sizes must be positive");
    const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    Eigen::MatrixXd w(out, in);
    for (int i = 0; i < out; ++i)
      for (int j = 0; j < in; ++j) w(i, j) = rng.uniform(-bound, bound);
    p.w.push_back(std::move(w));
    p.b.push_back(Eigen::VectorXd::Zero(out));
  }
  return p;
}

long MlpParams::param_count() const {
  long n = 0;
  for (int l = 0; l < layers(); ++l) n += w[l].size() + b[l].size();
  return n;
}

MlpGrads MlpGrads::zeros_like(const MlpParams& p) {
  MlpGrads g;
  for (int l = 0; l < p.layers(); ++l) {
    g.w.push_back(Eigen::MatrixXd::Zero(p.w[l].rows(), p.w[l].cols()));
    g.b.push_back(Eigen::VectorXd::Zero(p.b[l].size()));
  }
  return g;
}

void MlpGrads::set_zero() {
  for (auto& m : w) m.setZero();
  for (auto& v : b) v.setZero();
}

void MlpGrads::scale(double s) {
  for (auto& m : w) m *= s;
  for (auto& v : b) v *= s;
}

Eigen::MatrixXd mlp_forward(const MlpParams& params, const Eigen::MatrixXd& x,
                            MlpCache* cache) {
  if (x.rows() != params.input_dim())
    throw std::invalid_argument("mlp_forward: input dimension mismatch");
  if (cache) {
    cache->act.clear();
    cache->act.push_back(x);
  }
  Eigen::MatrixXd h = x;
  const int last = params.layers() - 1;
  for (int l = 0; l <= last; ++l) {
    Eigen::MatrixXd pre = params.w[l] * h;
    pre.colwise() += params.b[l];
    if (l == last) return pre;
    h = pre.cwiseMax(0.0);
    if (cache) cache->act.push_back(h);
  }
  return h;  // unreachable
}

void mlp_backward(const MlpParams& params, const MlpCache& cache,
                  const Eigen::MatrixXd& dout, MlpGrads& grads) {
  const int last = params.layers() - 1;
  if (static_cast<int>(cache.act.size()) != last + 1)
    throw std::invalid_argument("mlp_backward: cache does not match network");
  Eigen::MatrixXd delta = dout;  // d loss / d pre[l]
  for (int l = last; l >= 0; --l) {
    grads.w[l] += delta * cache.act[l].transpose();
    grads.b[l] += delta.rowwise().sum();
    if (l > 0) {
      delta = params.w[l].transpose() * delta;
      // ReLU gate: the cached activation is zero exactly where the
      // pre-activation was clipped.
      delta = (cache.act[l].array() > 0.0).cast<double>() * delta.array();
    }
  }
}

AdamState AdamState::zeros_like(const MlpParams& p) {
  AdamState s;
  for (int l = 0; l < p.layers(); ++l) {
    s.mw.push_back(Eigen::MatrixXd::Zero(p.w[l].rows(), p.w[l].cols()));
    s.vw.push_back(Eigen::MatrixXd::Zero(p.w[l].rows(), p.w[l].cols()));
    s.mb.push_back(Eigen::VectorXd::Zero(p.b[l].size()));
    s.vb.push_back(Eigen::VectorXd::Zero(p.b[l].size()));
  }
  return s;
}

namespace {

template <typename T>
void adam_elementwise(T& param, const T& grad, T& m, T& v, long t, double lr,
                      const AdamConfig& cfg) {
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = cfg.beta2 * v.array().matrix() +
      (1.0 - cfg.beta2) * grad.array().square().matrix();
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  param.array() -=
      lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.eps);
}

}  // namespace

void adam_update(MlpParams& params, const MlpGrads& grads, AdamState& state,
                 double lr, const AdamConfig& cfg) {
  if (params.layers() != static_cast<int>(grads.w.size()) ||
      params.layers() != static_cast<int>(state.mw.size()))
    throw std::invalid_argument("adam_update: layer count mismatch");
  for (int l = 0; l < params.layers(); ++l)
    if (params.w[l].rows() != grads.w[l].rows() ||
        params.w[l].cols() != grads.w[l].cols() ||
        params.b[l].size() != grads.b[l].size())
      throw std::invalid_argument("adam_update: shape mismatch at layer " +
                                  std::to_string(l));
  ++state.t;
  for (int l = 0; l < params.layers(); ++l) {
    adam_elementwise(params.w[l], grads.w[l], state.mw[l], state.vw[l],
                     state.t, lr, cfg);
    adam_elementwise(params.b[l], grads.b[l], state.mb[l], state.vb[l],
                     state.t, lr, cfg);
  }
}

void adam_update_vector(Eigen::VectorXd& param, const Eigen::VectorXd& grad,
                        Eigen::VectorXd& m, Eigen::VectorXd& v, long t,
                        double lr, const AdamConfig& cfg) {
  if (param.size() != grad.size() || param.size() != m.size() ||
      param.size() != v.size())
    throw std::invalid_argument("adam_update_vector: shape mismatch");
  adam_elementwise(param, grad, m, v, t, lr, cfg);
}

}  // namespace gaitlab
