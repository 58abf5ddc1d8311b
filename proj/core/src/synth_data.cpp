#include "convser/synth_data.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "convser/errors.hpp"
#include "convser/hashing.hpp"
#include "convser/parallel.hpp"

namespace convser {

namespace {

constexpr double kHarmonicCeilingHz = 5000.0;

std::string record_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "s%03d", index);
  return buf;
}

}  // namespace

void to_json(nlohmann::json& j, const ClassSignature& s) {
  j = nlohmann::json{{"fundamental_hz", s.fundamental_hz},
                     {"am_rate_hz", s.am_rate_hz},
                     {"tilt_db_per_octave", s.tilt_db_per_octave}};
}

void from_json(const nlohmann::json& j, ClassSignature& s) {
  s.fundamental_hz = j.at("fundamental_hz").get<double>();
  s.am_rate_hz = j.at("am_rate_hz").get<double>();
  s.tilt_db_per_octave = j.at("tilt_db_per_octave").get<double>();
}

SynthSpec SynthSpec::null_corpus(std::uint64_t seed) {
  SynthSpec spec;
  spec.class1 = spec.class0;
  spec.seed = seed;
  return spec;
}

void SynthSpec::validate() const {
  if (n_originals < 1) throw ParameterError("synth: n_originals must be >= 1");
  if (!(duration_s > 0.0)) throw ParameterError("synth: duration must be positive");
  if (sample_rate <= 0) throw ParameterError("synth: sample rate must be positive");
  if (!(am_depth >= 0.0 && am_depth < 1.0)) throw ParameterError("synth: am_depth must lie in [0, 1)");
  if (!(noise_level >= 0.0)) throw ParameterError("synth: noise_level must be >= 0");
  for (const auto* c : {&class0, &class1})
    if (!(c->fundamental_hz > 0.0) || c->fundamental_hz >= sample_rate / 2.0)
      throw ParameterError("synth: fundamental must lie in (0, sample_rate/2)");
}

void to_json(nlohmann::json& j, const SynthSpec& s) {
  j = nlohmann::json{{"n_originals", s.n_originals},
                     {"duration_s", s.duration_s},
                     {"sample_rate", s.sample_rate},
                     {"class0_signature", s.class0},
                     {"class1_signature", s.class1},
                     {"jitter",
                      {{"fundamental_rel", s.jitter.fundamental_rel},
                       {"am_rate_rel", s.jitter.am_rate_rel},
                       {"tilt_db", s.jitter.tilt_db},
                       {"level_db", s.jitter.level_db},
                       {"random_phase", s.jitter.random_phase}}},
                     {"am_depth", s.am_depth},
                     {"noise_level", s.noise_level},
                     {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, SynthSpec& s) {
  SynthSpec d;
  s.n_originals = j.value("n_originals", d.n_originals);
  s.duration_s = j.value("duration_s", d.duration_s);
  s.sample_rate = j.value("sample_rate", d.sample_rate);
  s.class0 = j.contains("class0_signature") ? j.at("class0_signature").get<ClassSignature>() : d.class0;
  s.class1 = j.contains("class1_signature") ? j.at("class1_signature").get<ClassSignature>() : d.class1;
  if (j.contains("jitter")) {
    const auto& jt = j.at("jitter");
    s.jitter.fundamental_rel = jt.value("fundamental_rel", d.jitter.fundamental_rel);
    s.jitter.am_rate_rel = jt.value("am_rate_rel", d.jitter.am_rate_rel);
    s.jitter.tilt_db = jt.value("tilt_db", d.jitter.tilt_db);
    s.jitter.level_db = jt.value("level_db", d.jitter.level_db);
    s.jitter.random_phase = jt.value("random_phase", d.jitter.random_phase);
  }
  s.am_depth = j.value("am_depth", d.am_depth);
  s.noise_level = j.value("noise_level", d.noise_level);
  s.seed = j.value("seed", d.seed);
}

int synth_label(int index) { return index % 2 == 0 ? 1 : 0; }

AudioBuffer synthesize_recording(const SynthSpec& spec, int index) {
  spec.validate();
  const ClassSignature& sig = synth_label(index) == 1 ? spec.class1 : spec.class0;
  std::mt19937_64 rng(derive_seed(spec.seed, record_id(index)));
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  // Draw order is fixed so a zero jitter simply zeroes the perturbation.
  const double f0 = sig.fundamental_hz * (1.0 + spec.jitter.fundamental_rel * unit(rng));
  const double am = sig.am_rate_hz * (1.0 + spec.jitter.am_rate_rel * unit(rng));
  const double tilt = sig.tilt_db_per_octave + spec.jitter.tilt_db * unit(rng);
  const double level_db = spec.jitter.level_db * unit(rng);
  auto draw_phase = [&] { return spec.jitter.random_phase ? phase(rng) : 0.0; };
  const double am_phase = draw_phase();

  const double ceiling = std::min(kHarmonicCeilingHz, 0.45 * spec.sample_rate);
  const int harmonics = std::max(1, static_cast<int>(ceiling / f0));
  std::vector<std::complex<double>> osc(static_cast<std::size_t>(harmonics));
  std::vector<std::complex<double>> rot(osc.size());
  std::vector<double> gain(osc.size());
  for (int h = 1; h <= harmonics; ++h) {
    gain[h - 1] = std::pow(10.0, tilt * std::log2(static_cast<double>(h)) / 20.0);
    osc[h - 1] = std::polar(1.0, draw_phase());
    rot[h - 1] = std::polar(1.0, 2.0 * std::numbers::pi * h * f0 / spec.sample_rate);
  }
  const double gain_sum = std::accumulate(gain.begin(), gain.end(), 0.0);
  const double amplitude = 0.5 * std::pow(10.0, level_db / 20.0) / ((1.0 + spec.am_depth) * gain_sum);

  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.sample_rate));
  AudioBuffer out;
  out.sample_rate = spec.sample_rate;
  out.samples.resize(n);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double am_step = 2.0 * std::numbers::pi * am / spec.sample_rate;
  for (std::size_t i = 0; i < n; ++i) {
    double tone = 0.0;
    for (std::size_t h = 0; h < osc.size(); ++h) {
      tone += gain[h] * osc[h].imag();
      osc[h] *= rot[h];
    }
    if ((i & 1023) == 1023)
      for (auto& z : osc) z /= std::abs(z);
    const double envelope = 1.0 + spec.am_depth * std::sin(am_step * static_cast<double>(i) + am_phase);
    double x = amplitude * envelope * tone;
    if (spec.noise_level > 0.0) x += spec.noise_level * gauss(rng);
    out.samples[i] = x;
  }
  return out;
}

DatasetManifest generate_corpus(const SynthSpec& spec, const std::filesystem::path& out_dir,
                                int jobs) {
  spec.validate();
  std::filesystem::create_directories(out_dir);
  DatasetManifest manifest;
  manifest.root = out_dir;
  manifest.records.resize(static_cast<std::size_t>(spec.n_originals));
  parallel_for(manifest.records.size(), jobs, [&](std::size_t i) {
    const int index = static_cast<int>(i);
    SampleRecord& r = manifest.records[i];
    r.id = record_id(index);
    r.path = r.id + ".wav";
    char speaker[16];
    std::snprintf(speaker, sizeof speaker, "spk%03d", index);
    r.speaker_id = speaker;
    r.topic_id = index % 4 + 1;
    r.position = (index / 2) % 2 == 0 ? Position::Pro : Position::Contra;
    r.label = synth_label(index);
    r.group_id = r.id;
    r.augmentation = AugmentationKind::Original;
    write_wav(synthesize_recording(spec, index), out_dir / r.path);
  });
  write_manifest(manifest, out_dir / "manifest.jsonl");
  std::ofstream spec_out(out_dir / "synth_spec.json", std::ios::trunc);
  if (!spec_out) throw IoError("cannot write " + (out_dir / "synth_spec.json").string());
  spec_out << nlohmann::json(spec).dump(2) << '\n';
  return manifest;
}

Eigen::RowVectorXd utterance_means(const FeatureMatrix& features) {
  if (features.n_valid_frames <= 0) return Eigen::RowVectorXd::Zero(features.width());
  return features.values.topRows(features.n_valid_frames).colwise().mean();
}

double threshold_loo_accuracy(const Eigen::MatrixXd& means, std::span<const int> labels) {
  const Eigen::Index n = means.rows();
  if (static_cast<std::size_t>(n) != labels.size())
    throw SizeError("threshold_loo_accuracy: rows and labels differ");
  if (n < 2) throw SizeError("threshold_loo_accuracy: need at least two utterances");

  struct Rule {
    double score = -1.0;
    double threshold = 0.0;
    int polarity = 1;
  };
  std::vector<std::pair<double, int>> sorted;
  sorted.reserve(static_cast<std::size_t>(n));
  double credit_total = 0.0;

  for (Eigen::Index held = 0; held < n; ++held) {
    Rule best;
    Eigen::Index best_coef = 0;
    for (Eigen::Index c = 0; c < means.cols(); ++c) {
      sorted.clear();
      for (Eigen::Index i = 0; i < n; ++i)
        if (i != held) sorted.emplace_back(means(i, c), labels[static_cast<std::size_t>(i)]);
      std::sort(sorted.begin(), sorted.end());
      const auto m = static_cast<double>(sorted.size());
      const long ones = std::count_if(sorted.begin(), sorted.end(), [](const auto& p) { return p.second == 1; });

      if (sorted.front().first == sorted.back().first) {
        // Every training value sits on the only threshold: half credit each.
        if (m / 2.0 > best.score) {
          best = {m / 2.0, sorted.front().first, 1};
          best_coef = c;
        }
        continue;
      }
      // Threshold between sorted[k-1] and sorted[k]: with polarity +1 the
      // lower part is predicted 0 and the upper part 1.
      long zeros_below = 0, ones_below = 0;
      for (std::size_t k = 1; k < sorted.size(); ++k) {
        (sorted[k - 1].second == 1 ? ones_below : zeros_below) += 1;
        if (sorted[k - 1].first == sorted[k].first) continue;
        const double plus = static_cast<double>(zeros_below + (ones - ones_below));
        const double minus = m - plus;
        const double theta = 0.5 * (sorted[k - 1].first + sorted[k].first);
        if (plus > best.score) {
          best = {plus, theta, 1};
          best_coef = c;
        }
        if (minus > best.score) {
          best = {minus, theta, -1};
          best_coef = c;
        }
      }
    }
    const double x = means(held, best_coef);
    const int y = labels[static_cast<std::size_t>(held)];
    if (x == best.threshold) {
      credit_total += 0.5;
    } else {
      const int predicted = (best.polarity * (x - best.threshold) > 0.0) ? 1 : 0;
      credit_total += predicted == y ? 1.0 : 0.0;
    }
  }
  return credit_total / static_cast<double>(n);
}

double measure_separability(const DatasetManifest& manifest, const FeatureConfig& config,
                            int jobs) {
  Eigen::MatrixXd means(static_cast<Eigen::Index>(manifest.size()), feature_width(config.feature_mode));
  std::vector<int> labels(manifest.size());
  parallel_for(manifest.size(), jobs, [&](std::size_t i) {
    const auto& r = manifest.records[i];
    AudioBuffer audio = load_wav(manifest.resolve(r));
    if (audio.sample_rate != config.sample_rate) audio = resample_linear(audio, config.sample_rate);
    means.row(static_cast<Eigen::Index>(i)) = utterance_means(extract_features(audio, config));
    labels[i] = r.label;
  });
  return threshold_loo_accuracy(means, labels);
}

}  // namespace convser
