#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "biaslex/error.hpp"
#include "biaslex/optimizer.hpp"

using namespace biaslex;

namespace {
Matrix scalar(double x) { return Matrix::Constant(1, 1, x); }
}  // namespace

TEST(AdamW, SingleStepHandComputed) {
  OptimizerConfig cfg;
  cfg.weight_decay = 0.0;
  Matrix theta = scalar(0.0), m = scalar(0.0), v = scalar(0.0);
  adamw_update(theta, scalar(1.0), m, v, 1, 0.1, cfg);
  // mhat = vhat = 1, so the step is lr / (1 + eps).
  EXPECT_NEAR(theta(0, 0), -0.1 / (1.0 + 1e-8), 1e-9);
  EXPECT_NEAR(m(0, 0), 0.1, 1e-15);
  EXPECT_NEAR(v(0, 0), 0.001, 1e-15);
}

TEST(AdamW, ZeroGradientNoDecayLeavesThetaUnchanged) {
  OptimizerConfig cfg;
  cfg.weight_decay = 0.0;
  Matrix theta = scalar(0.7), m = scalar(0.0), v = scalar(0.0);
  adamw_update(theta, scalar(0.0), m, v, 1, 0.1, cfg);
  EXPECT_EQ(theta(0, 0), 0.7);
}

TEST(AdamW, DecayIsDecoupled) {
  OptimizerConfig cfg;
  cfg.weight_decay = 0.01;
  Matrix theta = scalar(1.0), m = scalar(0.0), v = scalar(0.0);
  adamw_update(theta, scalar(0.0), m, v, 1, 0.1, cfg);
  EXPECT_NEAR(theta(0, 0), 1.0 - 0.1 * 0.01, 1e-15);
  EXPECT_EQ(m(0, 0), 0.0);
}

TEST(AdamW, SecondStepMatchesRecurrence) {
  OptimizerConfig cfg;
  cfg.weight_decay = 0.0;
  Matrix theta = scalar(0.0), m = scalar(0.0), v = scalar(0.0);
  adamw_update(theta, scalar(1.0), m, v, 1, 0.1, cfg);
  adamw_update(theta, scalar(-2.0), m, v, 2, 0.1, cfg);
  const double m2 = 0.9 * 0.1 + 0.1 * -2.0;
  const double v2 = 0.999 * 0.001 + 0.001 * 4.0;
  const double mhat = m2 / (1 - 0.81), vhat = v2 / (1 - 0.999 * 0.999);
  EXPECT_NEAR(theta(0, 0), -0.1 / (1 + 1e-8) - 0.1 * mhat / (std::sqrt(vhat) + 1e-8), 1e-12);
}

TEST(Cosine, EndpointsAndMidpoint) {
  OptimizerConfig cfg;
  cfg.learning_rate = 3e-4;
  cfg.eta_min = 0.0;
  cfg.schedule_period = 20;
  EXPECT_NEAR(cosine_lr(0, cfg), 3e-4, 1e-12);
  EXPECT_NEAR(cosine_lr(20, cfg), 0.0, 1e-12);
  EXPECT_NEAR(cosine_lr(10, cfg), 1.5e-4, 1e-12);
  cfg.eta_min = 1e-5;
  EXPECT_NEAR(cosine_lr(20, cfg), 1e-5, 1e-12);
  EXPECT_NEAR(cosine_lr(5, cfg), 1e-5 + 0.5 * (3e-4 - 1e-5) * (1 + std::cos(std::numbers::pi / 4)), 1e-12);
  EXPECT_EQ(cosine_lr(25, cfg), 1e-5);
}

TEST(Cosine, MonotoneNonIncreasing) {
  OptimizerConfig cfg;
  for (int t = 1; t <= 20; ++t) EXPECT_LE(cosine_lr(t, cfg), cosine_lr(t - 1, cfg));
}

TEST(OptimizerConfig, Validation) {
  OptimizerConfig cfg;
  cfg.beta1 = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.learning_rate = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}
