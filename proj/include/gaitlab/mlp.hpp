#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gaitlab/rng.hpp"

namespace gaitlab {

// Fully connected network with ReLU hidden layers and a raw (linear)
// output row; heads apply their own output nonlinearity. Weights are
// Glorot-uniform, biases zero.
struct MlpParams {
  std::vector<Eigen::MatrixXd> w;  // layer l maps act[l] -> pre[l], out x in
  std::vector<Eigen::VectorXd> b;

  static MlpParams create(const std::vector<int>& layer_sizes, Rng& rng);

  int layers() const { return static_cast<int>(w.size()); }
  int input_dim() const { return static_cast<int>(w.front().cols()); }
  int output_dim() const { return static_cast<int>(w.back().rows()); }
  long param_count() const;
};

// Same shapes as MlpParams; accumulated by the backward pass.
struct MlpGrads {
  std::vector<Eigen::MatrixXd> w;
  std::vector<Eigen::VectorXd> b;

  static MlpGrads zeros_like(const MlpParams& p);
  void set_zero();
  void scale(double s);
};

// Activations kept for the backward pass; inputs are column-per-sample.
struct MlpCache {
  std::vector<Eigen::MatrixXd> act;  // act[0] = input, act[l+1] = relu(pre[l])
};

// Raw output (no final activation), one column per input column.
Eigen::MatrixXd mlp_forward(const MlpParams& params, const Eigen::MatrixXd& x,
                            MlpCache* cache = nullptr);

// Accumulates d(loss)/d(params) into `grads` given d(loss)/d(raw output).
void mlp_backward(const MlpParams& params, const MlpCache& cache,
                  const Eigen::MatrixXd& dout, MlpGrads& grads);

// Adam moments for one MlpParams plus optional extra vectors.
struct AdamState {
  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::VectorXd> mb, vb;
  long t = 0;

  static AdamState zeros_like(const MlpParams& p);
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One bias-corrected Adam descent step. Throws std::invalid_argument on
// shape mismatch between params, grads and moments.
void adam_update(MlpParams& params, const MlpGrads& grads, AdamState& state,
                 double lr, const AdamConfig& cfg);

// Elementwise Adam for a standalone parameter vector (shares no state
// with the network update). `t` must be advanced by the caller.
void adam_update_vector(Eigen::VectorXd& param, const Eigen::VectorXd& grad,
                        Eigen::VectorXd& m, Eigen::VectorXd& v, long t,
                        double lr, const AdamConfig& cfg);

}  // namespace gaitlab
