#include "hivesound/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace hivesound {

namespace {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

constexpr double kChromaRefHz = 261.626;  // C4
constexpr double kChromaMinHz = 20.0;

std::vector<std::string> make_feature_names() {
  std::vector<std::string> names = {"chroma_stft",        "rmse",
                                    "spectral_centroid",  "spectral_bandwidth",
                                    "rolloff",            "zero_crossing_rate"};
  for (int i = 1; i <= kNumMfcc; ++i) names.push_back("mfcc" + std::to_string(i));
  return names;
}

}  // namespace

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = make_feature_names();
  return names;
}

int feature_index(const std::string& name) {
  static const std::unordered_map<std::string, int> index = [] {
    std::unordered_map<std::string, int> m;
    const auto& names = feature_names();
    for (std::size_t i = 0; i < names.size(); ++i) m[names[i]] = static_cast<int>(i);
    return m;
  }();
  auto it = index.find(name);
  return it == index.end() ? -1 : it->second;
}

std::vector<double> spectral_centroid_series(const Spectrogram& spec) {
  std::vector<double> out(spec.magnitudes.rows, 0.0);
  for (std::size_t t = 0; t < spec.magnitudes.rows; ++t) {
    const double* m = spec.magnitudes.row(t);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < spec.magnitudes.cols; ++k) {
      num += spec.bin_freqs[k] * m[k];
      den += m[k];
    }
    out[t] = den > 0.0 ? num / den : 0.0;
  }
  return out;
}

std::vector<double> spectral_bandwidth_series(const Spectrogram& spec,
                                              const std::vector<double>& centroid) {
  if (centroid.size() != spec.magnitudes.rows)
    throw std::invalid_argument("spectral_bandwidth: centroid series size mismatch");
  std::vector<double> out(spec.magnitudes.rows, 0.0);
  for (std::size_t t = 0; t < spec.magnitudes.rows; ++t) {
    const double* m = spec.magnitudes.row(t);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < spec.magnitudes.cols; ++k) {
      const double d = spec.bin_freqs[k] - centroid[t];
      num += m[k] * d * d;
      den += m[k];
    }
    out[t] = den > 0.0 ? std::sqrt(num / den) : 0.0;
  }
  return out;
}

std::vector<double> rolloff_series(const Spectrogram& spec, double pct) {
  if (!(pct > 0.0 && pct < 1.0)) throw std::invalid_argument("rolloff: pct must be in (0,1)");
  std::vector<double> out(spec.magnitudes.rows, 0.0);
  for (std::size_t t = 0; t < spec.magnitudes.rows; ++t) {
    const double* m = spec.magnitudes.row(t);
    double total = 0.0;
    for (std::size_t k = 0; k < spec.magnitudes.cols; ++k) total += m[k];
    const double target = pct * total;
    double cum = 0.0;
    std::size_t r = 0;
    for (std::size_t k = 0; k < spec.magnitudes.cols; ++k) {
      cum += m[k];
      if (cum >= target) {
        r = k;
        break;
      }
    }
    out[t] = spec.bin_freqs[r];
  }
  return out;
}

std::vector<double> zero_crossing_rate_series(const std::vector<std::vector<double>>& frames) {
  std::vector<double> out(frames.size(), 0.0);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const auto& f = frames[t];
    if (f.size() < 2) continue;
    long crossings = 0;
    // sign(0) treated as +1
    bool prev_neg = f[0] < 0.0;
    for (std::size_t i = 1; i < f.size(); ++i) {
      const bool neg = f[i] < 0.0;
      if (neg != prev_neg) ++crossings;
      prev_neg = neg;
    }
    out[t] = static_cast<double>(crossings) / static_cast<double>(f.size());
  }
  return out;
}

std::vector<double> rmse_series(const std::vector<std::vector<double>>& frames) {
  std::vector<double> out(frames.size(), 0.0);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const auto& f = frames[t];
    if (f.empty()) continue;
    double s = 0.0;
    for (double x : f) s += x * x;
    out[t] = std::sqrt(s / static_cast<double>(f.size()));
  }
  return out;
}

double spectral_centroid(const Spectrogram& spec) { return mean_of(spectral_centroid_series(spec)); }

double spectral_bandwidth(const Spectrogram& spec) {
  return mean_of(spectral_bandwidth_series(spec, spectral_centroid_series(spec)));
}

double rolloff(const Spectrogram& spec, double pct) { return mean_of(rolloff_series(spec, pct)); }

Matrix chroma_frames(const Spectrogram& spec) {
  // precompute pitch class per bin; -1 marks discarded low bins
  std::vector<int> pitch_class(spec.magnitudes.cols, -1);
  for (std::size_t k = 0; k < spec.magnitudes.cols; ++k) {
    const double f = spec.bin_freqs[k];
    if (f < kChromaMinHz) continue;
    const long c = std::lround(12.0 * std::log2(f / kChromaRefHz));
    pitch_class[k] = static_cast<int>(((c % 12) + 12) % 12);
  }

  Matrix out(spec.magnitudes.rows, 12);
  for (std::size_t t = 0; t < spec.magnitudes.rows; ++t) {
    const double* m = spec.magnitudes.row(t);
    double* row = out.row(t);
    for (std::size_t k = 0; k < spec.magnitudes.cols; ++k)
      if (pitch_class[k] >= 0) row[pitch_class[k]] += m[k] * m[k];
    double peak = 0.0;
    for (int c = 0; c < 12; ++c) peak = std::max(peak, row[c]);
    if (peak > 0.0)
      for (int c = 0; c < 12; ++c) row[c] /= peak;
  }
  return out;
}

double chroma_stft(const Spectrogram& spec) {
  const Matrix m = chroma_frames(spec);
  if (m.rows == 0) return 0.0;
  double s = 0.0;
  for (double v : m.data) s += v;
  return s / static_cast<double>(m.rows * m.cols);
}

namespace {

// orthonormal DCT-II basis, cached per (n_coeffs, n) since the pipeline
// applies the same transform to every clip
const Matrix& dct_basis(int n_coeffs, std::size_t n) {
  thread_local std::map<std::pair<int, std::size_t>, Matrix> cache;
  auto [it, fresh] = cache.try_emplace({n_coeffs, n});
  if (fresh) {
    Matrix eye(n, n);
    for (std::size_t i = 0; i < n; ++i) eye(i, i) = 1.0;
    it->second = dct_ii(eye, n_coeffs);
  }
  return it->second;
}

std::vector<double> mfcc_from_spec(const Spectrogram& spec, const MelFilterbank& fb,
                                   int n_coeffs) {
  if (n_coeffs < 1 || n_coeffs > fb.n_mels)
    throw std::invalid_argument("mfcc: n_coeffs must be in [1, n_mels]");
  const std::size_t frames = spec.magnitudes.rows;
  const std::size_t n_mels = static_cast<std::size_t>(fb.n_mels);

  // log mel energies, frames x mels
  Matrix logmel(frames, n_mels);
  std::vector<double> power(spec.magnitudes.cols);
  for (std::size_t t = 0; t < frames; ++t) {
    const double* m = spec.magnitudes.row(t);
    for (std::size_t k = 0; k < power.size(); ++k) power[k] = m[k] * m[k];
    double* out = logmel.row(t);
    for (std::size_t mel = 0; mel < n_mels; ++mel) {
      const double* w = fb.weights.row(mel);
      double e = 0.0;
      for (std::size_t k = fb.lo[mel]; k < fb.hi[mel]; ++k) e += w[k] * power[k];
      out[mel] = power_to_db(e);
    }
  }

  // mean over frames commutes with the linear transform, so average the
  // log-mel rows first and apply the basis once
  std::vector<double> mean_logmel(n_mels, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    const double* row = logmel.row(t);
    for (std::size_t mel = 0; mel < n_mels; ++mel) mean_logmel[mel] += row[mel];
  }
  for (double& v : mean_logmel) v /= static_cast<double>(frames);

  const Matrix& basis = dct_basis(n_coeffs, n_mels);
  std::vector<double> out(static_cast<std::size_t>(n_coeffs), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double* b = basis.row(k);
    double s = 0.0;
    for (std::size_t mel = 0; mel < n_mels; ++mel) s += b[mel] * mean_logmel[mel];
    out[k] = s;
  }
  return out;
}

}  // namespace

std::vector<double> mfcc_means(const AudioClip& clip, const StftConfig& cfg,
                               const MelFilterbank& fb, int n_coeffs) {
  return mfcc_from_spec(stft(clip, cfg), fb, n_coeffs);
}

std::vector<double> extract_vector(const AudioClip& clip, const StftConfig& cfg,
                                   const MelFilterbank& fb) {
  if (clip.samples.empty()) throw std::runtime_error("extract: empty clip");

  const Spectrogram spec = stft(clip, cfg);
  const auto frames = frame_signal(clip, cfg.n_fft, cfg.hop);
  const auto centroid = spectral_centroid_series(spec);

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(kNumFeatures));
  out.push_back(chroma_stft(spec));
  out.push_back(mean_of(rmse_series(frames)));
  out.push_back(mean_of(centroid));
  out.push_back(mean_of(spectral_bandwidth_series(spec, centroid)));
  out.push_back(mean_of(rolloff_series(spec)));
  out.push_back(mean_of(zero_crossing_rate_series(frames)));
  const auto mfcc = mfcc_from_spec(spec, fb, kNumMfcc);  // reuse the spectrogram
  out.insert(out.end(), mfcc.begin(), mfcc.end());
  return out;
}

std::vector<double> extract_features(const Segment& seg, const StftConfig& cfg,
                                     const MelFilterbank& fb) {
  return extract_vector(seg.clip, cfg, fb);
}

FeatureTable build_table(const std::vector<Segment>& segments, const StftConfig& cfg,
                         const MelFilterbank& fb, int threads) {
  if (segments.empty()) throw std::runtime_error("build_table: no segments");

  FeatureTable table;
  table.feature_names = feature_names();
  table.rows.resize(segments.size());

  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < segments.size(); i += stride) {
      table.rows[i].source_id = segments[i].source_id;
      table.rows[i].label = segments[i].label;
      table.rows[i].values = extract_features(segments[i], cfg, fb);
    }
  };

  int n_threads = threads;
  if (n_threads <= 0) n_threads = static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(segments.size())));
  if (n_threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int w = 0; w < n_threads; ++w)
      pool.emplace_back(work, static_cast<std::size_t>(w), static_cast<std::size_t>(n_threads));
    for (auto& th : pool) th.join();
  }
  return table;
}

void validate_features(const std::vector<double>& values, int sample_rate) {
  if (values.size() != static_cast<std::size_t>(kNumFeatures))
    throw std::runtime_error("feature vector must have exactly 134 entries");
  for (double v : values)
    if (!std::isfinite(v)) throw std::runtime_error("non-finite feature value");

  const double nyquist = sample_rate / 2.0;
  const auto in_band = [&](double v) { return v >= 0.0 && v <= nyquist; };
  if (!in_band(values[2])) throw std::runtime_error("spectral_centroid out of [0, nyquist]");
  if (!in_band(values[3])) throw std::runtime_error("spectral_bandwidth out of [0, nyquist]");
  if (!in_band(values[4])) throw std::runtime_error("rolloff out of [0, nyquist]");
  if (values[5] < 0.0 || values[5] > 1.0) throw std::runtime_error("zero_crossing_rate out of [0,1]");
  if (values[1] < 0.0) throw std::runtime_error("rmse negative");
}

FeatureTable project_features(const FeatureTable& table, const std::vector<std::string>& names) {
  // canonical order for known names; table column order for anything else
  std::vector<std::pair<long, std::size_t>> ordered;  // (sort key, table column)
  ordered.reserve(names.size());
  for (const auto& n : names) {
    auto it = std::find(table.feature_names.begin(), table.feature_names.end(), n);
    if (it == table.feature_names.end())
      throw std::runtime_error("project_features: table has no feature '" + n + "'");
    const auto col = static_cast<std::size_t>(it - table.feature_names.begin());
    const int canon = feature_index(n);
    ordered.emplace_back(canon >= 0 ? canon : 1000000 + static_cast<long>(col), col);
  }
  std::stable_sort(ordered.begin(), ordered.end());

  std::vector<std::size_t> cols;
  FeatureTable out;
  for (const auto& [key, col] : ordered) {
    cols.push_back(col);
    out.feature_names.push_back(table.feature_names[col]);
  }

  out.rows.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    FeatureRow r;
    r.source_id = row.source_id;
    r.label = row.label;
    r.values.reserve(cols.size());
    for (std::size_t c : cols) r.values.push_back(row.values[c]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

void write_feature_csv(const FeatureTable& table, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "source_id,label";
  for (const auto& n : table.feature_names) f << ',' << n;
  f << '\n';
  char buf[64];
  for (const auto& row : table.rows) {
    if (row.values.size() != table.feature_names.size())
      throw std::runtime_error("feature table row width mismatch");
    f << row.source_id << ',' << to_string(row.label);
    for (double v : row.values) {
      std::snprintf(buf, sizeof buf, "%.9g", v);
      f << ',' << buf;
    }
    f << '\n';
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

FeatureTable read_feature_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open feature csv: " + path);

  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) {
        out.push_back(line.substr(pos));
        break;
      }
      out.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    return out;
  };

  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split(line);
  if (header.size() < 3 || header[0] != "source_id" || header[1] != "label")
    throw std::runtime_error(path + ": bad header, expected source_id,label,<features>");

  FeatureTable table;
  table.feature_names.assign(header.begin() + 2, header.end());

  int line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != header.size())
      throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": field count " +
                               std::to_string(fields.size()) + " != " +
                               std::to_string(header.size()));
    FeatureRow row;
    row.source_id = fields[0];
    row.label = parse_label(fields[1]);
    row.values.reserve(fields.size() - 2);
    for (std::size_t i = 2; i < fields.size(); ++i) {
      try {
        std::size_t used = 0;
        row.values.push_back(std::stod(fields[i], &used));
        if (used != fields[i].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                 ": bad number '" + fields[i] + "'");
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace hivesound
