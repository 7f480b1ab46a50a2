#pragma once

#include <cstdint>

#include "biaslex/model.hpp"

namespace biaslex {

// Adam with decoupled weight decay, driven by a cosine-annealed rate.
struct OptimizerConfig {
  double learning_rate = 1e-3;  // peak rate, reached at epoch 0
  double eta_min = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
  std::size_t schedule_period = 20;  // epochs

  void validate() const;
  friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

struct AdamState {
  std::uint64_t step = 0;
  Parameters m;
  Parameters v;

  static AdamState for_params(const Parameters& p);
};

// One update of a single tensor at step `t` (1-based):
//   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2
//   theta <- theta - lr * (mhat / (sqrt(vhat) + eps) + wd * theta)
void adamw_update(Matrix& theta, const Matrix& grad, Matrix& m, Matrix& v, std::uint64_t t,
                  double lr, const OptimizerConfig& cfg);

// Advances state.step and updates every tensor that has a gradient; frozen
// tensors and their moments are left untouched.
void adamw_step(Parameters& params, const Gradients& grads, AdamState& state,
                const OptimizerConfig& cfg, double lr);

// eta_min + (eta_max - eta_min) (1 + cos(pi t / T)) / 2, with T the schedule
// period. Past the period the rate clamps to eta_min with a warning.
double cosine_lr(double t, const OptimizerConfig& cfg);

}  // namespace biaslex
