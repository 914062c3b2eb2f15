#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "hivesound/eval.hpp"
#include "hivesound/rng.hpp"

namespace hivesound {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;
constexpr int kRate = 22050;
constexpr std::size_t kBlockLen = 2 * kRate;

// scale so the peak stays inside [-limit, limit]
void limit_peak(std::vector<double>& x, double limit) {
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak > limit)
    for (double& v : x) v *= limit / peak;
}

// harmonic stack with 1/h amplitude decay and slow amplitude modulation
void add_buzz(std::vector<double>& x, Rng& rng, double gain) {
  const double f0 = rng.uniform(190.0, 260.0);
  const long harmonics = rng.integer(4, 8);
  std::vector<double> phase(static_cast<std::size_t>(harmonics));
  for (auto& p : phase) p = rng.uniform(0.0, kTau);
  const double am_rate = rng.uniform(0.3, 1.5);
  const double am_depth = rng.uniform(0.15, 0.35);
  const double am_phase = rng.uniform(0.0, kTau);

  double norm = 0.0;
  for (long h = 1; h <= harmonics; ++h) norm += 1.0 / static_cast<double>(h);

  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i) / kRate;
    double s = 0.0;
    for (long h = 1; h <= harmonics; ++h)
      s += std::sin(kTau * f0 * static_cast<double>(h) * t + phase[static_cast<std::size_t>(h - 1)]) /
           static_cast<double>(h);
    const double am = (1.0 + am_depth * std::sin(kTau * am_rate * t + am_phase)) / (1.0 + am_depth);
    x[i] += gain * am * s / norm;
  }
}

AudioClip make_bee_clip(Rng& rng) {
  AudioClip clip;
  clip.sample_rate = kRate;
  clip.samples.assign(kBlockLen, 0.0);
  add_buzz(clip.samples, rng, 0.75);
  // -30 dB low-passed noise floor (hive rumble sits under the buzz band);
  // two cascaded one-pole stages keep the floor out of the high bins
  const double noise_rms = 0.75 * std::pow(10.0, -30.0 / 20.0);
  const double alpha = std::exp(-kTau * 800.0 / kRate);
  double s1 = 0.0, s2 = 0.0;
  double energy = 0.0;
  std::vector<double> floor_noise(clip.samples.size());
  for (auto& v : floor_noise) {
    s1 = alpha * s1 + (1.0 - alpha) * rng.normal();
    s2 = alpha * s2 + (1.0 - alpha) * s1;
    v = s2;
    energy += s2 * s2;
  }
  const double gain = noise_rms / std::sqrt(energy / static_cast<double>(floor_noise.size()));
  for (std::size_t i = 0; i < clip.samples.size(); ++i) clip.samples[i] += gain * floor_noise[i];
  limit_peak(clip.samples, 0.95);
  return clip;
}

AudioClip make_nobee_clip(Rng& rng) {
  AudioClip clip;
  clip.sample_rate = kRate;
  clip.samples.assign(kBlockLen, 0.0);
  auto& x = clip.samples;

  switch (rng.index(3)) {
    case 0: {  // white noise
      const double amp = rng.uniform(0.15, 0.35);
      for (double& v : x) v = amp * rng.normal();
      break;
    }
    case 1: {  // linear chirp sweeping 1-6 kHz
      const double f_start = rng.uniform(1000.0, 3000.0);
      const double f_end = rng.uniform(4000.0, 6000.0);
      const double amp = rng.uniform(0.3, 0.5);
      const double duration = 2.0;
      const double floor_amp = amp * std::pow(10.0, -40.0 / 20.0);
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = static_cast<double>(i) / kRate;
        const double phase = kTau * (f_start * t + (f_end - f_start) * t * t / (2.0 * duration));
        x[i] = amp * std::sin(phase) + floor_amp * rng.normal();
      }
      break;
    }
    default: {  // impulsive clicks over a quiet noise bed
      for (double& v : x) v = 0.005 * rng.normal();
      const long n_clicks = rng.integer(8, 25);
      const auto decay_len = static_cast<std::size_t>(0.003 * kRate);
      for (long c = 0; c < n_clicks; ++c) {
        const std::size_t center = rng.index(kBlockLen - decay_len);
        const double amp = rng.uniform(0.3, 0.6);
        for (std::size_t i = 0; i < decay_len; ++i) {
          const double env = std::exp(-static_cast<double>(i) / (0.001 * kRate));
          x[center + i] += amp * env * rng.normal();
        }
      }
      break;
    }
  }

  if (rng.uniform() < 0.5)  // faint buzz underneath
    add_buzz(x, rng, 0.75 * std::pow(10.0, -15.0 / 20.0));

  limit_peak(x, 0.95);
  return clip;
}

}  // namespace

std::vector<Segment> gen_synthetic_corpus(int n_bee, int n_nobee, std::uint64_t seed) {
  if (n_bee < 1 || n_nobee < 1)
    throw std::invalid_argument("gen_synthetic_corpus: counts must be >= 1");

  std::vector<Segment> corpus;
  corpus.reserve(static_cast<std::size_t>(n_bee + n_nobee));
  char name[48];
  for (int i = 0; i < n_bee; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    Segment seg;
    seg.clip = make_bee_clip(rng);
    seg.label = Label::Bee;
    std::snprintf(name, sizeof name, "synth_bee_%04d", i);
    seg.source_id = name;
    corpus.push_back(std::move(seg));
  }
  for (int i = 0; i < n_nobee; ++i) {
    Rng rng(derive_seed(seed, 1000000 + static_cast<std::uint64_t>(i)));
    Segment seg;
    seg.clip = make_nobee_clip(rng);
    seg.label = Label::NoBee;
    std::snprintf(name, sizeof name, "synth_nobee_%04d", i);
    seg.source_id = name;
    corpus.push_back(std::move(seg));
  }
  return corpus;
}

}  // namespace hivesound
