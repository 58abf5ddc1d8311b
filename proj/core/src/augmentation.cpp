#include "convser/augmentation.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "convser/errors.hpp"
#include "convser/hashing.hpp"
#include "convser/parallel.hpp"

namespace convser {

namespace {

constexpr int kOlaWindow = 1024;
constexpr int kOlaSynthesisHop = kOlaWindow / 2;
// Search radius for frame alignment; must exceed half the longest period of
// interest (256 samples covers fundamentals down to ~86 Hz at 44.1 kHz).
constexpr int kOlaTolerance = 256;

double mean_power(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double sum = 0.0;
  for (double v : x) sum += v * v;
  return sum / static_cast<double>(x.size());
}

}  // namespace

// Waveform-similarity overlap-add: each analysis frame starts within
// kOlaTolerance of its nominal position, at the offset whose samples best
// match the natural continuation of the previous frame. This keeps periodic
// content phase-aligned across frames, so pitch survives the stretch.
AudioBuffer time_stretch(const AudioBuffer& buffer, double rate) {
  if (!(rate >= 0.5 && rate <= 2.0))
    throw ParameterError("time_stretch: rate " + std::to_string(rate) + " outside [0.5, 2]");
  if (rate == 1.0) return buffer;

  const auto len = static_cast<std::ptrdiff_t>(buffer.size());
  const auto out_len = static_cast<std::ptrdiff_t>(std::llround(static_cast<double>(len) / rate));
  const double analysis_hop = kOlaSynthesisHop * rate;
  const auto& x = buffer.samples;
  auto sample = [&](std::ptrdiff_t i) { return i >= 0 && i < len ? x[static_cast<std::size_t>(i)] : 0.0; };

  std::vector<double> window(kOlaWindow);
  for (int n = 0; n < kOlaWindow; ++n)
    window[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / kOlaWindow);

  std::vector<double> acc(static_cast<std::size_t>(out_len + kOlaWindow), 0.0);
  std::vector<double> norm(acc.size(), 0.0);
  std::ptrdiff_t prev_src = 0;
  for (std::ptrdiff_t k = 0; k * kOlaSynthesisHop < out_len; ++k) {
    std::ptrdiff_t src = 0;
    if (k > 0) {
      const std::ptrdiff_t target = prev_src + kOlaSynthesisHop;
      const auto nominal = static_cast<std::ptrdiff_t>(std::llround(static_cast<double>(k) * analysis_hop));
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, nominal - kOlaTolerance);
      const std::ptrdiff_t hi = std::max(lo, std::min(nominal + kOlaTolerance, len - kOlaWindow));
      double best = -std::numeric_limits<double>::infinity();
      src = lo;
      for (std::ptrdiff_t cand = lo; cand <= hi; ++cand) {
        double c = 0.0;
        // Every other sample is enough to rank candidate offsets.
        if (target + kOlaWindow <= len && cand + kOlaWindow <= len) {
          const double* a = x.data() + target;
          const double* b = x.data() + cand;
          for (int n = 0; n < kOlaWindow; n += 2) c += a[n] * b[n];
        } else {
          for (int n = 0; n < kOlaWindow; n += 2) c += sample(target + n) * sample(cand + n);
        }
        if (c > best) {
          best = c;
          src = cand;
        }
      }
    }
    prev_src = src;
    const std::ptrdiff_t dst = k * kOlaSynthesisHop;
    for (int n = 0; n < kOlaWindow; ++n) {
      acc[static_cast<std::size_t>(dst + n)] += window[n] * sample(src + n);
      norm[static_cast<std::size_t>(dst + n)] += window[n];
    }
  }

  AudioBuffer out;
  out.sample_rate = buffer.sample_rate;
  out.samples.resize(static_cast<std::size_t>(out_len));
  for (std::size_t i = 0; i < out.samples.size(); ++i)
    out.samples[i] = norm[i] > 1e-12 ? acc[i] / norm[i] : 0.0;
  return out;
}

AudioBuffer pitch_shift(const AudioBuffer& buffer, double semitones) {
  if (!(std::abs(semitones) <= 12.0))
    throw ParameterError("pitch_shift: " + std::to_string(semitones) + " semitones outside [-12, 12]");
  if (semitones == 0.0) return buffer;
  const double factor = std::pow(2.0, semitones / 12.0);
  const AudioBuffer stretched = time_stretch(buffer, 1.0 / factor);
  AudioBuffer out;
  out.sample_rate = buffer.sample_rate;
  out.samples = resample_to_length(stretched.samples, buffer.size());
  return out;
}

AudioBuffer add_noise(const AudioBuffer& buffer, double snr_db, std::uint64_t seed) {
  if (std::isnan(snr_db)) throw ParameterError("add_noise: SNR is NaN");
  if (snr_db == kNoNoise) return buffer;
  const double signal_power = mean_power(buffer.samples);
  if (!(signal_power > 0.0)) throw ParameterError("add_noise: cannot set an SNR on a zero-power signal");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> noise(buffer.size());
  for (double& n : noise) n = gauss(rng);
  const double noise_power = mean_power(noise);
  const double target_power = signal_power / std::pow(10.0, snr_db / 10.0);
  const double scale = std::sqrt(target_power / noise_power);

  AudioBuffer out = buffer;
  for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += scale * noise[i];
  return out;
}

AugmentationPlan AugmentationPlan::standard(std::uint64_t seed) {
  using K = AugmentationKind;
  AugmentationPlan plan;
  plan.seed = seed;
  plan.variants = {
      {"ts090", K::TimeStretch, 0.9, 0.0, kNoNoise},
      {"ts110", K::TimeStretch, 1.1, 0.0, kNoNoise},
      {"psm2", K::PitchShift, 1.0, -2.0, kNoNoise},
      {"psp2", K::PitchShift, 1.0, 2.0, kNoNoise},
      {"snr20", K::Noise, 1.0, 0.0, 20.0},
      {"snr10", K::Noise, 1.0, 0.0, 10.0},
      {"ts105snr15", K::Combined, 1.05, 0.0, 15.0},
  };
  return plan;
}

void to_json(nlohmann::json& j, const AugmentationVariant& v) {
  j = nlohmann::json{{"tag", v.tag},
                     {"kind", to_string(v.kind)},
                     {"stretch_rate", v.stretch_rate},
                     {"semitones", v.semitones},
                     // JSON has no infinity; null means "no noise".
                     {"snr_db", std::isinf(v.snr_db) ? nlohmann::json(nullptr) : nlohmann::json(v.snr_db)}};
}

void from_json(const nlohmann::json& j, AugmentationVariant& v) {
  v.tag = j.at("tag").get<std::string>();
  v.kind = parse_augmentation(j.at("kind").get<std::string>());
  v.stretch_rate = j.value("stretch_rate", 1.0);
  v.semitones = j.value("semitones", 0.0);
  const auto& snr = j.contains("snr_db") ? j.at("snr_db") : nlohmann::json(nullptr);
  v.snr_db = snr.is_null() ? kNoNoise : snr.get<double>();
}

void to_json(nlohmann::json& j, const AugmentationPlan& p) {
  j = nlohmann::json{{"seed", p.seed}, {"variants", p.variants}};
}

void from_json(const nlohmann::json& j, AugmentationPlan& p) {
  p.seed = j.value("seed", std::uint64_t{42});
  p.variants = j.contains("variants") ? j.at("variants").get<std::vector<AugmentationVariant>>()
                                      : AugmentationPlan::standard(p.seed).variants;
}

AudioBuffer apply_variant(const AudioBuffer& buffer, const AugmentationVariant& variant,
                          std::uint64_t seed) {
  if (variant.kind == AugmentationKind::Original) return buffer;
  AudioBuffer out = time_stretch(buffer, variant.stretch_rate);
  out = pitch_shift(out, variant.semitones);
  return add_noise(out, variant.snr_db, seed);
}

DatasetManifest augment_dataset(const DatasetManifest& manifest, const AugmentationPlan& plan,
                                const std::filesystem::path& out_dir, int jobs) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const bool same_dir = fs::equivalent(out_dir, manifest.root.empty() ? fs::path(".") : manifest.root);

  const std::size_t n = manifest.records.size();
  std::vector<std::vector<SampleRecord>> produced(n);
  std::vector<std::vector<fs::path>> written(n);

  try {
    parallel_for(n, jobs, [&](std::size_t i) {
      const SampleRecord& original = manifest.records[i];
      const fs::path source = manifest.resolve(original);
      SampleRecord copy = original;
      if (!same_dir) {
        const fs::path target = out_dir / original.path;
        fs::create_directories(target.parent_path());
        fs::copy_file(source, target, fs::copy_options::overwrite_existing);
        written[i].push_back(target);
      }
      produced[i].push_back(copy);
      if (plan.variants.empty()) return;

      const AudioBuffer audio = load_wav(source);
      for (const auto& variant : plan.variants) {
        SampleRecord rec = original;
        rec.id = original.id + "__" + variant.tag;
        rec.path = rec.id + ".wav";
        rec.augmentation = variant.kind;
        const AudioBuffer augmented = apply_variant(audio, variant, derive_seed(plan.seed, rec.id));
        const fs::path target = out_dir / rec.path;
        write_wav(augmented, target);
        written[i].push_back(target);
        produced[i].push_back(std::move(rec));
      }
    });
  } catch (...) {
    std::error_code ec;
    for (const auto& files : written)
      for (const auto& f : files) fs::remove(f, ec);
    throw;
  }

  DatasetManifest out;
  out.root = out_dir;
  out.records.reserve(n * plan.multiplier());
  for (auto& recs : produced)
    for (auto& r : recs) out.records.push_back(std::move(r));
  return out;
}

}  // namespace convser
