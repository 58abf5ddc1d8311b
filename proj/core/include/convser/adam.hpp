#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "convser/neural_net.hpp"

namespace convser {

// Defaults are the published Adam settings.
struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;
};

// One bias-corrected Adam update over a flat parameter vector. State vectors
// are sized on first use.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& config);

// Same update applied to every tensor of a model, in tensor order.
void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state,
               const AdamConfig& config);

}  // namespace convser
