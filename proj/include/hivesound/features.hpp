#pragma once

#include <string>
#include <vector>

#include "hivesound/audio.hpp"
#include "hivesound/dsp.hpp"

namespace hivesound {

inline constexpr int kNumMfcc = 128;
inline constexpr int kNumFeatures = 6 + kNumMfcc;  // 134

// Canonical feature ordering: chroma_stft, rmse, spectral_centroid,
// spectral_bandwidth, rolloff, zero_crossing_rate, mfcc1..mfcc128.
const std::vector<std::string>& feature_names();
int feature_index(const std::string& name);  // -1 when unknown

struct FeatureRow {
  std::string source_id;
  Label label = Label::Bee;
  std::vector<double> values;
};

struct FeatureTable {
  std::vector<std::string> feature_names;
  std::vector<FeatureRow> rows;
};

// Per-frame series; the clip-level feature is the arithmetic mean of the
// series. Frames with zero total magnitude contribute 0 to centroid and
// bandwidth.
std::vector<double> spectral_centroid_series(const Spectrogram& spec);
std::vector<double> spectral_bandwidth_series(const Spectrogram& spec,
                                              const std::vector<double>& centroid);
std::vector<double> rolloff_series(const Spectrogram& spec, double pct = 0.85);
std::vector<double> zero_crossing_rate_series(const std::vector<std::vector<double>>& frames);
std::vector<double> rmse_series(const std::vector<std::vector<double>>& frames);

double spectral_centroid(const Spectrogram& spec);
double spectral_bandwidth(const Spectrogram& spec);
double rolloff(const Spectrogram& spec, double pct = 0.85);

// Bin energy folded onto the 12 pitch classes, class(f) =
// round(12*log2(f/261.626)) mod 12, bins below 20 Hz discarded; each frame
// vector is normalized by its maximum.
Matrix chroma_frames(const Spectrogram& spec);  // frames x 12
double chroma_stft(const Spectrogram& spec);    // mean over classes and frames

// STFT power -> mel filterbank -> dB -> orthonormal DCT-II -> truncate ->
// mean over frames. Index 0 of the result is mfcc1.
std::vector<double> mfcc_means(const AudioClip& clip, const StftConfig& cfg,
                               const MelFilterbank& fb, int n_coeffs = kNumMfcc);

// All 134 features of a block-length clip, canonical order.
std::vector<double> extract_vector(const AudioClip& clip, const StftConfig& cfg,
                                   const MelFilterbank& fb);
std::vector<double> extract_features(const Segment& seg, const StftConfig& cfg,
                                     const MelFilterbank& fb);

// One row per segment, input order preserved. threads <= 1 runs serially;
// results are identical for any thread count.
FeatureTable build_table(const std::vector<Segment>& segments, const StftConfig& cfg,
                         const MelFilterbank& fb, int threads = 1);

// Throws when a vector violates the feature ranges (count, finiteness,
// centroid/bandwidth/rolloff in [0, sr/2], zcr in [0,1], rmse >= 0).
void validate_features(const std::vector<double>& values, int sample_rate);

// Reduced view: provenance columns plus the named features, canonical order.
FeatureTable project_features(const FeatureTable& table, const std::vector<std::string>& names);

// CSV: header `source_id,label,<features...>`, labels bee|nobee, floats
// with 9 significant digits.
void write_feature_csv(const FeatureTable& table, const std::string& path);
FeatureTable read_feature_csv(const std::string& path);

}  // namespace hivesound
