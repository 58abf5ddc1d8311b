#include "convser/dsp_features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "convser/errors.hpp"
#include "convser/fft.hpp"
#include "convser/hashing.hpp"

namespace convser {

std::string_view to_string(FeatureMode m) {
  switch (m) {
    case FeatureMode::Classic13: return "classic13";
    case FeatureMode::Static40: return "static40";
    case FeatureMode::Delta39e: return "delta39e";
  }
  return "static40";
}

FeatureMode parse_feature_mode(std::string_view s) {
  for (auto m : {FeatureMode::Classic13, FeatureMode::Static40, FeatureMode::Delta39e})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown feature mode '" + std::string(s) + "'");
}

int feature_width(FeatureMode m) { return m == FeatureMode::Classic13 ? 13 : 40; }

namespace {
// Number of DCT outputs the mode needs before assembly.
int cepstra_needed(const FeatureConfig& c) {
  return c.feature_mode == FeatureMode::Static40 ? c.n_mfcc : 13;
}
}  // namespace

FeatureConfig FeatureConfig::mfcc13() {
  FeatureConfig c;
  c.n_mfcc = 13;
  c.feature_mode = FeatureMode::Classic13;
  return c;
}

FeatureConfig FeatureConfig::mfcc40() { return FeatureConfig{}; }

void FeatureConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("feature config: " + what); };
  if (sample_rate <= 0) fail("sample_rate must be positive");
  if (frame_len < 2 || !is_power_of_two(static_cast<std::size_t>(frame_len)))
    fail("frame_len " + std::to_string(frame_len) + " is not a power of two >= 2");
  if (hop < 1) fail("hop must be >= 1");
  if (n_mels < 1) fail("n_mels must be >= 1");
  if (n_mfcc != feature_width(feature_mode))
    fail("feature mode " + std::string(to_string(feature_mode)) + " needs n_mfcc = " +
         std::to_string(feature_width(feature_mode)));
  if (n_mels < cepstra_needed(*this))
    fail("n_mels " + std::to_string(n_mels) + " is smaller than the " +
         std::to_string(cepstra_needed(*this)) + " cepstra required");
  if (fmin < 0.0 || !(fmin < effective_fmax()) || effective_fmax() > sample_rate / 2.0)
    fail("need 0 <= fmin < fmax <= sample_rate/2");
  if (!(log_floor > 0.0)) fail("log_floor must be positive");
  if (max_frames < 1) fail("max_frames must be >= 1");
}

void to_json(nlohmann::json& j, const FeatureConfig& c) {
  j = nlohmann::json{{"sample_rate", c.sample_rate}, {"frame_len", c.frame_len},
                     {"hop", c.hop},                 {"n_mels", c.n_mels},
                     {"n_mfcc", c.n_mfcc},           {"feature_mode", to_string(c.feature_mode)},
                     {"fmin", c.fmin},               {"fmax", c.fmax},
                     {"log_floor", c.log_floor},     {"max_frames", c.max_frames}};
}

void from_json(const nlohmann::json& j, FeatureConfig& c) {
  FeatureConfig d;
  c.sample_rate = j.value("sample_rate", d.sample_rate);
  c.frame_len = j.value("frame_len", d.frame_len);
  c.hop = j.value("hop", d.hop);
  c.n_mels = j.value("n_mels", d.n_mels);
  c.feature_mode = parse_feature_mode(j.value("feature_mode", std::string(to_string(d.feature_mode))));
  c.n_mfcc = j.value("n_mfcc", feature_width(c.feature_mode));
  c.fmin = j.value("fmin", d.fmin);
  c.fmax = j.value("fmax", d.fmax);
  c.log_floor = j.value("log_floor", d.log_floor);
  c.max_frames = j.value("max_frames", d.max_frames);
}

std::uint64_t config_hash(const FeatureConfig& c) { return fnv1a64(nlohmann::json(c).dump()); }

std::vector<std::vector<double>> frame_signal(const AudioBuffer& buffer, int frame_len, int hop) {
  if (frame_len < 1) throw SizeError("frame_len must be >= 1");
  if (hop < 1) throw SizeError("hop must be >= 1");
  const auto len = buffer.size();
  const auto flen = static_cast<std::size_t>(frame_len);
  if (len < flen)
    throw TooShortError("signal of " + std::to_string(len) + " samples is shorter than one " +
                        std::to_string(frame_len) + "-sample frame");
  const std::size_t count = (len - flen) / static_cast<std::size_t>(hop) + 1;
  std::vector<std::vector<double>> frames;
  frames.reserve(count);
  for (std::size_t f = 0; f < count; ++f) {
    const auto begin = buffer.samples.begin() + static_cast<std::ptrdiff_t>(f * hop);
    frames.emplace_back(begin, begin + static_cast<std::ptrdiff_t>(flen));
  }
  return frames;
}

std::vector<double> hamming_window(int n) {
  if (n < 2) throw SizeError("hamming window needs n >= 2");
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    w[k] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * k / (n - 1));
  return w;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

namespace {

// n_mels + 2 strictly increasing bin indices: lower edge, centers, upper edge.
std::vector<int> filter_bins(const FeatureConfig& config) {
  config.validate();
  const int n_bins = config.n_fft() / 2 + 1;
  const double mel_lo = hz_to_mel(config.fmin);
  const double mel_hi = hz_to_mel(config.effective_fmax());
  const int points = config.n_mels + 2;
  std::vector<int> bins(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double mel = mel_lo + (mel_hi - mel_lo) * i / (points - 1);
    const double hz = mel_to_hz(mel);
    const auto bin = static_cast<int>(std::lround(hz * config.n_fft() / config.sample_rate));
    bins[i] = std::clamp(bin, 0, n_bins - 1);
  }
  for (int i = 1; i < points; ++i) {
    if (bins[i] <= bins[i - 1])
      throw ResolutionError("mel filterbank: " + std::to_string(config.n_mels) +
                            " filters collapse onto FFT bin " + std::to_string(bins[i]) +
                            " at n_fft=" + std::to_string(config.n_fft()));
  }
  return bins;
}

}  // namespace

Eigen::MatrixXd mel_filterbank(const FeatureConfig& config) {
  const auto bins = filter_bins(config);
  const int n_bins = config.n_fft() / 2 + 1;
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(config.n_mels, n_bins);
  for (int m = 0; m < config.n_mels; ++m) {
    const int lo = bins[m];
    const int mid = bins[m + 1];
    const int hi = bins[m + 2];
    for (int k = lo; k <= mid; ++k) fb(m, k) = static_cast<double>(k - lo) / (mid - lo);
    for (int k = mid; k <= hi; ++k) fb(m, k) = static_cast<double>(hi - k) / (hi - mid);
  }
  return fb;
}

std::vector<double> mel_center_frequencies(const FeatureConfig& config) {
  const auto bins = filter_bins(config);
  std::vector<double> centers(static_cast<std::size_t>(config.n_mels));
  for (int m = 0; m < config.n_mels; ++m)
    centers[m] = static_cast<double>(bins[m + 1]) * config.sample_rate / config.n_fft();
  return centers;
}

std::vector<double> log_mel_energies(std::span<const double> power,
                                     const Eigen::MatrixXd& filterbank, double log_floor) {
  if (static_cast<std::size_t>(filterbank.cols()) != power.size())
    throw SizeError("filterbank has " + std::to_string(filterbank.cols()) + " bins, spectrum has " +
                    std::to_string(power.size()));
  const Eigen::Map<const Eigen::VectorXd> p(power.data(), static_cast<Eigen::Index>(power.size()));
  const Eigen::VectorXd collected = filterbank * p;
  std::vector<double> e(static_cast<std::size_t>(collected.size()));
  for (Eigen::Index m = 0; m < collected.size(); ++m) e[m] = std::log(collected[m] + log_floor);
  return e;
}

Eigen::MatrixXd dct_matrix(int n_in, int n_out) {
  if (n_in < 1) throw SizeError("DCT input length must be >= 1");
  if (n_out > n_in || n_out < 0)
    throw SizeError("DCT: " + std::to_string(n_out) + " outputs requested from " +
                    std::to_string(n_in) + " inputs");
  Eigen::MatrixXd d(n_out, n_in);
  const double s0 = std::sqrt(1.0 / n_in);
  const double s = std::sqrt(2.0 / n_in);
  for (int j = 0; j < n_out; ++j)
    for (int m = 0; m < n_in; ++m)
      d(j, m) = (j == 0 ? s0 : s) * std::cos(std::numbers::pi * j * (m + 0.5) / n_in);
  return d;
}

std::vector<double> dct_ii(std::span<const double> input, int n_out) {
  const auto d = dct_matrix(static_cast<int>(input.size()), n_out);
  const Eigen::Map<const Eigen::VectorXd> x(input.data(), static_cast<Eigen::Index>(input.size()));
  const Eigen::VectorXd c = d * x;
  return {c.data(), c.data() + c.size()};
}

double frame_log_energy(std::span<const double> frame, double log_floor) {
  double sum = 0.0;
  for (double s : frame) sum += s * s;
  return std::log(sum + log_floor);
}

Eigen::MatrixXd delta(const Eigen::MatrixXd& features, int window) {
  const Eigen::Index frames = features.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(frames, features.cols());
  if (frames == 0 || window < 1) return out;
  double denom = 0.0;
  for (int n = 1; n <= window; ++n) denom += n * n;
  denom *= 2.0;
  auto row = [&](Eigen::Index t) { return features.row(std::clamp<Eigen::Index>(t, 0, frames - 1)); };
  for (Eigen::Index t = 0; t < frames; ++t) {
    for (int n = 1; n <= window; ++n) out.row(t) += n * (row(t + n) - row(t - n));
    out.row(t) /= denom;
  }
  return out;
}

Eigen::MatrixXd normalize_centered(const Eigen::MatrixXd& matrix, int n_valid) {
  Eigen::MatrixXd out = matrix;
  const Eigen::Index rows = std::clamp<Eigen::Index>(n_valid, 0, matrix.rows());
  if (rows == 0 || matrix.cols() == 0) return out;
  auto block = out.topRows(rows);
  const double mean = block.mean();
  block.array() -= mean;
  const double max_abs = block.cwiseAbs().maxCoeff();
  if (max_abs == 0.0) {
    block.setZero();
  } else {
    block /= max_abs;
  }
  return out;
}

Eigen::MatrixXd raw_features(const AudioBuffer& buffer, const FeatureConfig& config) {
  config.validate();
  const auto frames = frame_signal(buffer, config.frame_len, config.hop);
  const auto window = hamming_window(config.frame_len);
  const auto fb = mel_filterbank(config);
  const int n_cep = cepstra_needed(config);
  const auto dct = dct_matrix(config.n_mels, n_cep);
  const auto n_frames = static_cast<Eigen::Index>(frames.size());

  Eigen::MatrixXd cepstra(n_frames, n_cep);
  Eigen::VectorXd energy(n_frames);
  std::vector<double> windowed(static_cast<std::size_t>(config.frame_len));
  for (Eigen::Index t = 0; t < n_frames; ++t) {
    const auto& frame = frames[t];
    energy[t] = frame_log_energy(frame, config.log_floor);
    for (std::size_t k = 0; k < windowed.size(); ++k) windowed[k] = frame[k] * window[k];
    const auto power = fft_power_spectrum(windowed);
    const auto logmel = log_mel_energies(power, fb, config.log_floor);
    const Eigen::Map<const Eigen::VectorXd> e(logmel.data(), static_cast<Eigen::Index>(logmel.size()));
    cepstra.row(t) = (dct * e).transpose();
  }

  if (config.feature_mode == FeatureMode::Static40) return cepstra;

  Eigen::MatrixXd base(n_frames, 13);
  base.leftCols(12) = cepstra.middleCols(1, 12);
  base.col(12) = energy;
  if (config.feature_mode == FeatureMode::Classic13) return base;

  const Eigen::MatrixXd d1 = delta(base, 2);
  const Eigen::MatrixXd d2 = delta(d1, 2);
  Eigen::MatrixXd out(n_frames, 40);
  out << base, d1, d2, energy;
  return out;
}

FeatureMatrix extract_features(const AudioBuffer& buffer, const FeatureConfig& config) {
  config.validate();
  if (buffer.sample_rate != config.sample_rate)
    throw ConfigError("extract_features: buffer is at " + std::to_string(buffer.sample_rate) +
                      " Hz but the config expects " + std::to_string(config.sample_rate) +
                      " Hz; resample first");

  FeatureMatrix out;
  out.values = Eigen::MatrixXd::Zero(config.max_frames, config.n_mfcc);
  const bool silent =
      std::all_of(buffer.samples.begin(), buffer.samples.end(), [](double s) { return s == 0.0; });
  if (silent) {
    // Digital silence carries no information; only the floor constants would
    // survive normalization, so it maps straight to zeros.
    const auto n_frames = frame_signal(buffer, config.frame_len, config.hop).size();
    out.n_valid_frames = static_cast<int>(std::min<std::size_t>(n_frames, config.max_frames));
    return out;
  }

  const Eigen::MatrixXd raw = raw_features(buffer, config);
  const Eigen::MatrixXd normalized = normalize_centered(raw, static_cast<int>(raw.rows()));
  const auto keep = std::min<Eigen::Index>(normalized.rows(), config.max_frames);
  out.values.topRows(keep) = normalized.topRows(keep);
  out.n_valid_frames = static_cast<int>(keep);
  return out;
}

}  // namespace convser
