#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace convser {

struct ModelConfig {
  int filters = 32;
  int kernel_size = 20;
  int lstm_units = 40;
  int n_mfcc = 40;
  int max_frames = 775;

  int lstm_input_width() const noexcept { return n_mfcc * filters; }
  // True when filters/kernel/units/n_mfcc are all values from the study grid.
  bool is_grid_config() const noexcept;
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

// LSTM gate blocks are stacked in this order in W, U and b.
inline constexpr std::array<const char*, 4> kGateOrder = {"input", "forget", "cell", "output"};

// Trainable weights. Shapes are fixed by ModelConfig:
//   conv_w  kernel x filters       conv_b  filters
//   lstm_w  4u x (n_mfcc*filters)  lstm_u  4u x u     lstm_b 4u
//   dense_w u                      dense_b 1
// The same struct carries gradients.
struct ModelParams {
  Eigen::MatrixXd conv_w;
  Eigen::VectorXd conv_b;
  Eigen::MatrixXd lstm_w;
  Eigen::MatrixXd lstm_u;
  Eigen::VectorXd lstm_b;
  Eigen::VectorXd dense_w;
  Eigen::VectorXd dense_b;

  static ModelParams zeros(const ModelConfig& config);
  // Glorot-uniform weights, zero biases except forget-gate bias = 1.
  static ModelParams glorot(const ModelConfig& config, std::uint64_t seed);

  static constexpr std::size_t kTensorCount = 7;
  std::array<std::span<double>, kTensorCount> tensors();
  std::array<std::span<const double>, kTensorCount> tensors() const;
  static const std::array<const char*, kTensorCount>& tensor_names();

  std::size_t size() const;
  bool all_finite() const;
  void set_zero();
  ModelParams& operator+=(const ModelParams& other);
  ModelParams& operator*=(double scale);
};

// conv = k*f + f; lstm = 4u(d + u + 1); dense = u + 1.
std::size_t parameter_count(const ModelConfig& config);

// T x n_mfcc x filters activations, stored [t][j][f] row-major.
struct Tensor3 {
  int steps = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(int t, int w, int c) : steps(t), width(w), channels(c), data(std::size_t(t) * w * c, 0.0) {}
  double& at(int t, int j, int c) { return data[(std::size_t(t) * width + j) * channels + c]; }
  double at(int t, int j, int c) const { return data[(std::size_t(t) * width + j) * channels + c]; }
};

// Per-frame 1D convolution across the coefficient axis, single input channel,
// "same" zero padding (left pad (k-1)/2), followed by ReLU.
// features is T x n_mfcc. Throws SizeError on shape mismatch.
Tensor3 conv1d_timedistributed_forward(const Eigen::MatrixXd& features,
                                       const Eigen::MatrixXd& conv_w,
                                       const Eigen::VectorXd& conv_b);

// T x (n_mfcc*filters), row t is the row-major concatenation of frame t.
Eigen::MatrixXd flatten_per_timestep(const Tensor3& tensor);
Tensor3 unflatten_per_timestep(const Eigen::MatrixXd& flat, int width, int channels);

struct LstmTrace {
  Eigen::MatrixXd inputs;  // d x T, column t is x_t
  Eigen::MatrixXd gates;   // 4u x T, post-activation [i; f; g; o]
  Eigen::MatrixXd cells;   // u x (T+1), column 0 is c_0 = 0
  Eigen::MatrixXd hidden;  // u x (T+1), column 0 is h_0 = 0
};

// Standard LSTM from zero state over inputs (T x d). Returns h_T.
Eigen::VectorXd lstm_forward(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& w,
                             const Eigen::MatrixXd& u, const Eigen::VectorXd& b,
                             LstmTrace* trace = nullptr);

// Logistic function that never returns exactly 0 or 1.
double stable_sigmoid(double z);

// p = sigmoid(w.h + b); *logit receives w.h + b when non-null.
double dense_sigmoid_forward(const Eigen::VectorXd& h, const Eigen::VectorXd& w, double b,
                             double* logit = nullptr);

struct ForwardTrace {
  Eigen::MatrixXd features;  // T x n_mfcc
  Tensor3 conv_out;          // post-ReLU
  LstmTrace lstm;
  double logit = 0.0;
  double probability = 0.5;
};

struct ForwardResult {
  double probability = 0.5;
  ForwardTrace trace;
};

// conv -> ReLU -> flatten -> LSTM -> dense sigmoid. features must be
// max_frames x n_mfcc.
ForwardResult model_forward(const ModelConfig& config, const Eigen::MatrixXd& features,
                            const ModelParams& params);
// Probability only; skips keeping the trace.
double model_predict(const ModelConfig& config, const Eigen::MatrixXd& features,
                     const ModelParams& params);

// Binary cross-entropy. The logit form is the one used in training; the
// probability form clamps p away from {0,1}.
double bce_loss(double p, int y);
double bce_loss_from_logit(double logit, int y);

// Reverse-mode gradient of bce_loss_from_logit(trace.logit, y) with respect
// to every parameter, backpropagating through time over all T steps.
ModelParams model_backward(const ModelConfig& config, const ForwardTrace& trace, int y,
                           const ModelParams& params);

}  // namespace convser
