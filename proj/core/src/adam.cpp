#include "convser/adam.hpp"

#include <cmath>

#include "convser/errors.hpp"

namespace convser {

namespace {

void update(std::span<double> params, std::span<const double> grads, double* m, double* v,
            double lr_t, const AdamConfig& c, double bias2) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
    params[i] -= lr_t * m[i] / (std::sqrt(v[i] / bias2) + c.epsilon);
  }
}

}  // namespace

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const AdamConfig& config) {
  if (params.size() != grads.size()) throw SizeError("adam_step: params and grads differ in size");
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size()) throw SizeError("adam_step: state sized for another model");
  ++state.t;
  const double bias1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
  const double bias2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
  update(params, grads, state.m.data(), state.v.data(), config.learning_rate / bias1, config, bias2);
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state,
               const AdamConfig& config) {
  const std::size_t total = params.size();
  if (grads.size() != total) throw SizeError("adam_step: gradient shape mismatch");
  if (state.m.empty()) {
    state.m.assign(total, 0.0);
    state.v.assign(total, 0.0);
  }
  if (state.m.size() != total) throw SizeError("adam_step: state sized for another model");
  ++state.t;
  const double bias1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
  const double bias2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
  auto p = params.tensors();
  const auto g = grads.tensors();
  std::size_t offset = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].size() != g[i].size()) throw SizeError("adam_step: gradient shape mismatch");
    update(p[i], g[i], state.m.data() + offset, state.v.data() + offset,
           config.learning_rate / bias1, config, bias2);
    offset += p[i].size();
  }
}

}  // namespace convser
