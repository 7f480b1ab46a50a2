#include "biaslex/optimizer.hpp"

#include <cmath>
#include <numbers>

#include "biaslex/error.hpp"
#include "biaslex/log.hpp"

namespace biaslex {

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(eta_min >= 0.0) || eta_min > learning_rate) {
    throw ConfigError("eta_min must be in [0, learning_rate]");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("betas must be in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be non-negative");
  if (schedule_period == 0) throw ConfigError("schedule_period must be positive");
}

AdamState AdamState::for_params(const Parameters& p) {
  return {0, Parameters::zeros_like(p), Parameters::zeros_like(p)};
}

void adamw_update(Matrix& theta, const Matrix& grad, Matrix& m, Matrix& v, std::uint64_t t,
                  double lr, const OptimizerConfig& cfg) {
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  const auto mhat = m.array() / c1;
  const auto vhat = v.array() / c2;
  theta.array() -= lr * (mhat / (vhat.sqrt() + cfg.epsilon) + cfg.weight_decay * theta.array());
}

void adamw_step(Parameters& params, const Gradients& grads, AdamState& state,
                const OptimizerConfig& cfg, double lr) {
  ++state.step;
  auto p = params.tensors();
  auto m = state.m.tensors();
  auto v = state.v.tensors();
  const auto g = grads.buffers().tensors();
  const auto& present = grads.present();
  if (p.size() != g.size() || p.size() != m.size()) {
    throw ConfigError("optimizer state does not match the parameters");
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!present[i]) continue;
    adamw_update(*p[i].tensor, *g[i].tensor, *m[i].tensor, *v[i].tensor, state.step, lr, cfg);
  }
}

double cosine_lr(double t, const OptimizerConfig& cfg) {
  if (t < 0.0) throw ConfigError("schedule position must be non-negative");
  const auto period = static_cast<double>(cfg.schedule_period);
  if (t > period) {
    warn("cosine_lr: position past the schedule period; clamping to eta_min");
    return cfg.eta_min;
  }
  return cfg.eta_min + 0.5 * (cfg.learning_rate - cfg.eta_min) *
                           (1.0 + std::cos(std::numbers::pi * t / period));
}

}  // namespace biaslex
