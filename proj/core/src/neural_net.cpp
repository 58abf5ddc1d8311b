#include "convser/neural_net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "convser/errors.hpp"

namespace convser {

bool ModelConfig::is_grid_config() const noexcept {
  return (filters == 16 || filters == 32) && (kernel_size == 5 || kernel_size == 20) &&
         (lstm_units == 20 || lstm_units == 40) && (n_mfcc == 13 || n_mfcc == 40);
}

void ModelConfig::validate() const {
  if (filters < 1 || kernel_size < 1 || lstm_units < 1 || n_mfcc < 1 || max_frames < 1)
    throw ConfigError("model config: every dimension must be >= 1");
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"filters", c.filters},
                     {"kernel_size", c.kernel_size},
                     {"lstm_units", c.lstm_units},
                     {"n_mfcc", c.n_mfcc},
                     {"max_frames", c.max_frames}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  ModelConfig d;
  c.filters = j.value("filters", d.filters);
  c.kernel_size = j.value("kernel_size", d.kernel_size);
  c.lstm_units = j.value("lstm_units", d.lstm_units);
  c.n_mfcc = j.value("n_mfcc", d.n_mfcc);
  c.max_frames = j.value("max_frames", d.max_frames);
}

ModelParams ModelParams::zeros(const ModelConfig& config) {
  config.validate();
  const int u = config.lstm_units;
  ModelParams p;
  p.conv_w = Eigen::MatrixXd::Zero(config.kernel_size, config.filters);
  p.conv_b = Eigen::VectorXd::Zero(config.filters);
  p.lstm_w = Eigen::MatrixXd::Zero(4 * u, config.lstm_input_width());
  p.lstm_u = Eigen::MatrixXd::Zero(4 * u, u);
  p.lstm_b = Eigen::VectorXd::Zero(4 * u);
  p.dense_w = Eigen::VectorXd::Zero(u);
  p.dense_b = Eigen::VectorXd::Zero(1);
  return p;
}

ModelParams ModelParams::glorot(const ModelConfig& config, std::uint64_t seed) {
  ModelParams p = zeros(config);
  std::mt19937_64 rng(seed);
  auto fill = [&rng](auto& tensor, double fan_in, double fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index i = 0; i < tensor.size(); ++i) tensor.data()[i] = dist(rng);
  };
  const double k = config.kernel_size;
  const double u = config.lstm_units;
  fill(p.conv_w, k, k * config.filters);
  fill(p.lstm_w, config.lstm_input_width(), 4 * u);
  fill(p.lstm_u, u, 4 * u);
  fill(p.dense_w, u, 1);
  p.lstm_b.segment(config.lstm_units, config.lstm_units).setOnes();
  return p;
}

std::array<std::span<double>, ModelParams::kTensorCount> ModelParams::tensors() {
  auto s = [](auto& t) { return std::span<double>(t.data(), static_cast<std::size_t>(t.size())); };
  return {s(conv_w), s(conv_b), s(lstm_w), s(lstm_u), s(lstm_b), s(dense_w), s(dense_b)};
}

std::array<std::span<const double>, ModelParams::kTensorCount> ModelParams::tensors() const {
  auto s = [](const auto& t) {
    return std::span<const double>(t.data(), static_cast<std::size_t>(t.size()));
  };
  return {s(conv_w), s(conv_b), s(lstm_w), s(lstm_u), s(lstm_b), s(dense_w), s(dense_b)};
}

const std::array<const char*, ModelParams::kTensorCount>& ModelParams::tensor_names() {
  static const std::array<const char*, kTensorCount> names = {
      "conv_kernel", "conv_bias", "lstm_input_weights", "lstm_recurrent_weights",
      "lstm_bias",   "dense_weights", "dense_bias"};
  return names;
}

std::size_t ModelParams::size() const {
  std::size_t n = 0;
  for (auto t : tensors()) n += t.size();
  return n;
}

bool ModelParams::all_finite() const {
  for (auto t : tensors())
    for (double v : t)
      if (!std::isfinite(v)) return false;
  return true;
}

void ModelParams::set_zero() {
  for (auto t : tensors()) std::fill(t.begin(), t.end(), 0.0);
}

ModelParams& ModelParams::operator+=(const ModelParams& other) {
  conv_w += other.conv_w;
  conv_b += other.conv_b;
  lstm_w += other.lstm_w;
  lstm_u += other.lstm_u;
  lstm_b += other.lstm_b;
  dense_w += other.dense_w;
  dense_b += other.dense_b;
  return *this;
}

ModelParams& ModelParams::operator*=(double scale) {
  for (auto t : tensors())
    for (double& v : t) v *= scale;
  return *this;
}

std::size_t parameter_count(const ModelConfig& c) {
  const std::size_t k = c.kernel_size, f = c.filters, u = c.lstm_units;
  const std::size_t d = static_cast<std::size_t>(c.lstm_input_width());
  return (k * f + f) + 4 * u * (d + u + 1) + (u + 1);
}

Tensor3 conv1d_timedistributed_forward(const Eigen::MatrixXd& features,
                                       const Eigen::MatrixXd& conv_w,
                                       const Eigen::VectorXd& conv_b) {
  const int steps = static_cast<int>(features.rows());
  const int width = static_cast<int>(features.cols());
  const int kernel = static_cast<int>(conv_w.rows());
  const int filters = static_cast<int>(conv_w.cols());
  if (conv_b.size() != filters)
    throw SizeError("conv bias has " + std::to_string(conv_b.size()) + " entries for " +
                    std::to_string(filters) + " filters");
  const int pad_left = (kernel - 1) / 2;
  // filters x kernel so the inner loop over filters is contiguous.
  const Eigen::MatrixXd wt = conv_w.transpose();

  Tensor3 out(steps, width, filters);
  for (int t = 0; t < steps; ++t) {
    for (int j = 0; j < width; ++j) {
      double* acc = &out.at(t, j, 0);
      for (int f = 0; f < filters; ++f) acc[f] = conv_b[f];
      const int k_lo = std::max(0, pad_left - j);
      const int k_hi = std::min(kernel, width - j + pad_left);
      for (int k = k_lo; k < k_hi; ++k) {
        const double x = features(t, j + k - pad_left);
        if (x == 0.0) continue;
        const double* w = wt.col(k).data();
        for (int f = 0; f < filters; ++f) acc[f] += w[f] * x;
      }
      for (int f = 0; f < filters; ++f) acc[f] = std::max(acc[f], 0.0);
    }
  }
  return out;
}

Eigen::MatrixXd flatten_per_timestep(const Tensor3& tensor) {
  const Eigen::Index d = static_cast<Eigen::Index>(tensor.width) * tensor.channels;
  // Tensor data laid out [t][j][c] is exactly a column-major d x T matrix.
  return Eigen::Map<const Eigen::MatrixXd>(tensor.data.data(), d, tensor.steps).transpose();
}

Tensor3 unflatten_per_timestep(const Eigen::MatrixXd& flat, int width, int channels) {
  if (flat.cols() != static_cast<Eigen::Index>(width) * channels)
    throw SizeError("unflatten: row length " + std::to_string(flat.cols()) + " != " +
                    std::to_string(width) + " x " + std::to_string(channels));
  Tensor3 out(static_cast<int>(flat.rows()), width, channels);
  Eigen::Map<Eigen::MatrixXd>(out.data.data(), flat.cols(), flat.rows()) = flat.transpose();
  return out;
}

double stable_sigmoid(double z) {
  double p;
  if (z >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    p = e / (1.0 + e);
  }
  return std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

namespace {

// inputs is d x T (column t = x_t).
Eigen::VectorXd lstm_forward_columns(const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                                     const Eigen::MatrixXd& w, const Eigen::MatrixXd& u,
                                     const Eigen::VectorXd& b, LstmTrace* trace) {
  const Eigen::Index units = u.cols();
  const Eigen::Index steps = inputs.cols();
  if (w.rows() != 4 * units || u.rows() != 4 * units || b.size() != 4 * units)
    throw SizeError("LSTM gate blocks must have 4 x units rows");
  if (w.cols() != inputs.rows())
    throw SizeError("LSTM input width " + std::to_string(inputs.rows()) + " != W columns " +
                    std::to_string(w.cols()));

  Eigen::MatrixXd z = w * inputs;
  z.colwise() += b;
  Eigen::MatrixXd gates(4 * units, steps);
  Eigen::MatrixXd cells = Eigen::MatrixXd::Zero(units, steps + 1);
  Eigen::MatrixXd hidden = Eigen::MatrixXd::Zero(units, steps + 1);
  auto sigmoid = [](const auto& x) { return (1.0 + (-x).array().exp()).inverse().matrix(); };
  for (Eigen::Index t = 0; t < steps; ++t) {
    z.col(t).noalias() += u * hidden.col(t);
    auto g = gates.col(t);
    g.segment(0, units) = sigmoid(z.col(t).segment(0, units));
    g.segment(units, units) = sigmoid(z.col(t).segment(units, units));
    g.segment(2 * units, units) = z.col(t).segment(2 * units, units).array().tanh().matrix();
    g.segment(3 * units, units) = sigmoid(z.col(t).segment(3 * units, units));
    cells.col(t + 1) = g.segment(units, units).cwiseProduct(cells.col(t)) +
                       g.segment(0, units).cwiseProduct(g.segment(2 * units, units));
    hidden.col(t + 1) =
        g.segment(3 * units, units).cwiseProduct(cells.col(t + 1).array().tanh().matrix());
  }
  Eigen::VectorXd last = hidden.col(steps);
  if (trace != nullptr) {
    trace->inputs = inputs;
    trace->gates = std::move(gates);
    trace->cells = std::move(cells);
    trace->hidden = std::move(hidden);
  }
  return last;
}

}  // namespace

Eigen::VectorXd lstm_forward(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& w,
                             const Eigen::MatrixXd& u, const Eigen::VectorXd& b,
                             LstmTrace* trace) {
  return lstm_forward_columns(inputs.transpose(), w, u, b, trace);
}

double dense_sigmoid_forward(const Eigen::VectorXd& h, const Eigen::VectorXd& w, double b,
                             double* logit) {
  if (h.size() != w.size())
    throw SizeError("dense layer expects " + std::to_string(w.size()) + " inputs, got " +
                    std::to_string(h.size()));
  const double z = w.dot(h) + b;
  if (logit != nullptr) *logit = z;
  return stable_sigmoid(z);
}

namespace {
void check_input(const ModelConfig& config, const Eigen::MatrixXd& features,
                 const ModelParams& params) {
  if (features.cols() != config.n_mfcc || features.rows() != config.max_frames)
    throw SizeError("model expects " + std::to_string(config.max_frames) + " x " +
                    std::to_string(config.n_mfcc) + " features, got " +
                    std::to_string(features.rows()) + " x " + std::to_string(features.cols()));
  if (params.conv_w.rows() != config.kernel_size || params.conv_w.cols() != config.filters ||
      params.lstm_w.cols() != config.lstm_input_width() ||
      params.lstm_u.cols() != config.lstm_units || params.dense_w.size() != config.lstm_units)
    throw SizeError("parameter shapes do not match the model config");
}
}  // namespace

ForwardResult model_forward(const ModelConfig& config, const Eigen::MatrixXd& features,
                            const ModelParams& params) {
  check_input(config, features, params);
  ForwardResult result;
  ForwardTrace& tr = result.trace;
  tr.features = features;
  tr.conv_out = conv1d_timedistributed_forward(features, params.conv_w, params.conv_b);
  const Eigen::Map<const Eigen::MatrixXd> x(tr.conv_out.data.data(), config.lstm_input_width(),
                                            config.max_frames);
  const Eigen::VectorXd h = lstm_forward_columns(x, params.lstm_w, params.lstm_u, params.lstm_b, &tr.lstm);
  tr.probability = dense_sigmoid_forward(h, params.dense_w, params.dense_b[0], &tr.logit);
  result.probability = tr.probability;
  return result;
}

double model_predict(const ModelConfig& config, const Eigen::MatrixXd& features,
                     const ModelParams& params) {
  check_input(config, features, params);
  const Tensor3 conv = conv1d_timedistributed_forward(features, params.conv_w, params.conv_b);
  const Eigen::Map<const Eigen::MatrixXd> x(conv.data.data(), config.lstm_input_width(),
                                            config.max_frames);
  const Eigen::VectorXd h = lstm_forward_columns(x, params.lstm_w, params.lstm_u, params.lstm_b, nullptr);
  return dense_sigmoid_forward(h, params.dense_w, params.dense_b[0]);
}

double bce_loss_from_logit(double logit, int y) {
  return std::max(logit, 0.0) - y * logit + std::log1p(std::exp(-std::abs(logit)));
}

double bce_loss(double p, int y) {
  const double q = std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
  return -(y * std::log(q) + (1 - y) * std::log1p(-q));
}

ModelParams model_backward(const ModelConfig& config, const ForwardTrace& trace, int y,
                           const ModelParams& params) {
  const Eigen::Index units = config.lstm_units;
  const Eigen::Index steps = trace.lstm.gates.cols();
  ModelParams grad;

  // Output layer: d loss / d logit = p - y.
  const double dlogit = stable_sigmoid(trace.logit) - y;
  const auto h_last = trace.lstm.hidden.col(steps);
  grad.dense_w = dlogit * h_last;
  grad.dense_b = Eigen::VectorXd::Constant(1, dlogit);

  // Backprop through time.
  Eigen::MatrixXd dz(4 * units, steps);
  Eigen::VectorXd dh = dlogit * params.dense_w;
  Eigen::VectorXd dc = Eigen::VectorXd::Zero(units);
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const auto g = trace.lstm.gates.col(t);
    const auto i = g.segment(0, units).array();
    const auto f = g.segment(units, units).array();
    const auto c_hat = g.segment(2 * units, units).array();
    const auto o = g.segment(3 * units, units).array();
    const Eigen::ArrayXd tanh_c = trace.lstm.cells.col(t + 1).array().tanh();
    const auto c_prev = trace.lstm.cells.col(t).array();

    dc.array() += dh.array() * o * (1.0 - tanh_c.square());
    auto col = dz.col(t);
    col.segment(0, units) = (dc.array() * c_hat * i * (1.0 - i)).matrix();
    col.segment(units, units) = (dc.array() * c_prev * f * (1.0 - f)).matrix();
    col.segment(2 * units, units) = (dc.array() * i * (1.0 - c_hat.square())).matrix();
    col.segment(3 * units, units) = (dh.array() * tanh_c * o * (1.0 - o)).matrix();
    dc.array() *= f;
    dh.noalias() = params.lstm_u.transpose() * col;
  }

  const auto& x = trace.lstm.inputs;
  grad.lstm_w.noalias() = dz * x.transpose();
  grad.lstm_u.noalias() = dz * trace.lstm.hidden.leftCols(steps).transpose();
  grad.lstm_b = dz.rowwise().sum();
  const Eigen::MatrixXd dx = params.lstm_w.transpose() * dz;  // d x T

  // ReLU mask, then convolution parameter gradients.
  const int width = config.n_mfcc;
  const int filters = config.filters;
  const int kernel = config.kernel_size;
  const int pad_left = (kernel - 1) / 2;
  Eigen::MatrixXd dwt = Eigen::MatrixXd::Zero(filters, kernel);
  Eigen::VectorXd db = Eigen::VectorXd::Zero(filters);
  Eigen::VectorXd dpre(filters);
  for (Eigen::Index t = 0; t < steps; ++t) {
    const double* dcol = dx.col(t).data();
    for (int j = 0; j < width; ++j) {
      bool any = false;
      for (int ch = 0; ch < filters; ++ch) {
        const double a = trace.conv_out.at(static_cast<int>(t), j, ch);
        dpre[ch] = a > 0.0 ? dcol[j * filters + ch] : 0.0;
        any = any || dpre[ch] != 0.0;
      }
      if (!any) continue;
      db += dpre;
      const int k_lo = std::max(0, pad_left - j);
      const int k_hi = std::min(kernel, width - j + pad_left);
      for (int k = k_lo; k < k_hi; ++k) {
        const double xin = trace.features(t, j + k - pad_left);
        if (xin != 0.0) dwt.col(k) += xin * dpre;
      }
    }
  }
  grad.conv_w = dwt.transpose();
  grad.conv_b = db;
  return grad;
}

}  // namespace convser
