#include "hivesound/dsp.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace hivesound {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

// In-place iterative radix-2 FFT (decimation in time).
void fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

double mel_of_hz(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double hz_of_mel(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

// Mirror an out-of-range index back into [0, n) without repeating the edge
// sample (x[-i] == x[i]).
std::size_t reflect_index(long i, long n) {
  if (n == 1) return 0;
  const long period = 2 * (n - 1);
  long j = ((i % period) + period) % period;
  if (j >= n) j = period - j;
  return static_cast<std::size_t>(j);
}

}  // namespace

std::vector<std::vector<double>> frame_signal(const AudioClip& clip, int frame_len, int hop) {
  if (frame_len < 1 || hop < 1) throw std::invalid_argument("frame_signal: bad frame/hop");
  const std::size_t n = clip.samples.size();
  if (n < static_cast<std::size_t>(frame_len))
    throw std::runtime_error("frame_signal: clip shorter than one frame");

  const std::size_t count = 1 + (n - frame_len) / hop;
  std::vector<std::vector<double>> frames(count);
  for (std::size_t t = 0; t < count; ++t) {
    const auto begin = clip.samples.begin() + static_cast<long>(t * hop);
    frames[t].assign(begin, begin + frame_len);
  }
  return frames;
}

Spectrogram stft(const AudioClip& clip, const StftConfig& cfg) {
  if (!is_power_of_two(cfg.n_fft)) throw std::invalid_argument("stft: n_fft must be a power of two");
  if (cfg.hop < 1 || cfg.hop > cfg.n_fft) throw std::invalid_argument("stft: bad hop");
  if (clip.samples.empty()) throw std::runtime_error("stft: empty clip");
  if (clip.sample_rate <= 0) throw std::invalid_argument("stft: invalid sample rate");

  const std::size_t n_fft = static_cast<std::size_t>(cfg.n_fft);
  const std::size_t pad = cfg.center_pad ? n_fft / 2 : 0;

  // reflection padding: x[-i] = x[i], x[n-1+i] = x[n-1-i]
  std::vector<double> x;
  x.reserve(clip.samples.size() + 2 * pad);
  const std::vector<double>& s = clip.samples;
  const long n = static_cast<long>(s.size());
  for (long i = static_cast<long>(pad); i > 0; --i) x.push_back(s[reflect_index(i, n)]);
  x.insert(x.end(), s.begin(), s.end());
  for (long i = 1; i <= static_cast<long>(pad); ++i) x.push_back(s[reflect_index(n - 1 + i, n)]);

  if (x.size() < n_fft)
    throw std::runtime_error("stft: clip shorter than one frame");

  std::vector<double> window(n_fft, 1.0);
  if (cfg.window == Window::Hann) {
    for (std::size_t i = 0; i < n_fft; ++i)
      window[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n_fft));
  }

  const std::size_t bins = n_fft / 2 + 1;
  const std::size_t count = 1 + (x.size() - n_fft) / static_cast<std::size_t>(cfg.hop);

  Spectrogram spec;
  spec.magnitudes = Matrix(count, bins);
  spec.bin_freqs.resize(bins);
  for (std::size_t k = 0; k < bins; ++k)
    spec.bin_freqs[k] = static_cast<double>(k) * clip.sample_rate / static_cast<double>(n_fft);
  spec.frame_times.resize(count);

  std::vector<std::complex<double>> buf(n_fft);
  for (std::size_t t = 0; t < count; ++t) {
    const std::size_t begin = t * static_cast<std::size_t>(cfg.hop);
    for (std::size_t i = 0; i < n_fft; ++i) buf[i] = x[begin + i] * window[i];
    fft(buf);
    double* out = spec.magnitudes.row(t);
    for (std::size_t k = 0; k < bins; ++k) out[k] = std::abs(buf[k]);
    // time of the frame center relative to the original signal
    spec.frame_times[t] =
        (static_cast<double>(begin) + static_cast<double>(n_fft) / 2.0 - static_cast<double>(pad)) /
        clip.sample_rate;
    buf.assign(n_fft, {0.0, 0.0});
  }
  return spec;
}

MelFilterbank mel_filterbank(int n_mels, int n_fft, int sample_rate, double f_min, double f_max) {
  if (n_mels < 1) throw std::invalid_argument("mel_filterbank: n_mels must be >= 1");
  if (!is_power_of_two(n_fft)) throw std::invalid_argument("mel_filterbank: n_fft must be a power of two");
  if (f_max < 0.0) f_max = sample_rate / 2.0;
  if (!(f_min < f_max) || f_max > sample_rate / 2.0)
    throw std::invalid_argument("mel_filterbank: need f_min < f_max <= sample_rate/2");

  const std::size_t bins = static_cast<std::size_t>(n_fft) / 2 + 1;
  const double mel_lo = mel_of_hz(f_min);
  const double mel_hi = mel_of_hz(f_max);

  std::vector<double> edges(static_cast<std::size_t>(n_mels) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = hz_of_mel(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      static_cast<double>(n_mels + 1));

  MelFilterbank fb;
  fb.n_mels = n_mels;
  fb.weights = Matrix(static_cast<std::size_t>(n_mels), bins);
  fb.lo.assign(static_cast<std::size_t>(n_mels), bins);
  fb.hi.assign(static_cast<std::size_t>(n_mels), 0);

  for (int m = 0; m < n_mels; ++m) {
    const double lower = edges[static_cast<std::size_t>(m)];
    const double center = edges[static_cast<std::size_t>(m) + 1];
    const double upper = edges[static_cast<std::size_t>(m) + 2];
    const double norm = 2.0 / (upper - lower);
    double* row = fb.weights.row(static_cast<std::size_t>(m));
    bool any = false;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n_fft);
      double w = 0.0;
      if (f > lower && f < upper)
        w = f <= center ? (f - lower) / (center - lower) : (upper - f) / (upper - center);
      if (w > 0.0) {
        row[k] = w * norm;
        any = true;
        fb.lo[static_cast<std::size_t>(m)] = std::min(fb.lo[static_cast<std::size_t>(m)], k);
        fb.hi[static_cast<std::size_t>(m)] = std::max(fb.hi[static_cast<std::size_t>(m)], k + 1);
      }
    }
    if (!any)
      throw std::runtime_error("mel_filterbank: filter " + std::to_string(m) +
                               " covers no FFT bin; reduce n_mels or raise n_fft");
  }
  return fb;
}

Matrix dct_ii(const Matrix& m, int n_coeffs) {
  const std::size_t n = m.rows;
  if (n_coeffs < 1 || static_cast<std::size_t>(n_coeffs) > n)
    throw std::invalid_argument("dct_ii: n_coeffs out of range");

  // orthonormal basis: b[k][i] = a_k * cos(pi * k * (2i + 1) / (2n))
  Matrix basis(static_cast<std::size_t>(n_coeffs), n);
  const double a0 = std::sqrt(1.0 / static_cast<double>(n));
  const double ak = std::sqrt(2.0 / static_cast<double>(n));
  for (std::size_t k = 0; k < static_cast<std::size_t>(n_coeffs); ++k)
    for (std::size_t i = 0; i < n; ++i)
      basis(k, i) = (k == 0 ? a0 : ak) *
                    std::cos(kPi * static_cast<double>(k) * (2.0 * static_cast<double>(i) + 1.0) /
                             (2.0 * static_cast<double>(n)));

  Matrix out(static_cast<std::size_t>(n_coeffs), m.cols);
  for (std::size_t k = 0; k < out.rows; ++k) {
    const double* b = basis.row(k);
    double* dst = out.row(k);
    for (std::size_t i = 0; i < n; ++i) {
      const double* src = m.row(i);
      const double bk = b[i];
      for (std::size_t c = 0; c < m.cols; ++c) dst[c] += bk * src[c];
    }
  }
  return out;
}

double power_to_db(double power) {
  if (power < 0.0) throw std::invalid_argument("power_to_db: negative power");
  return 10.0 * std::log10(std::max(power, kPowerFloor));
}

}  // namespace hivesound
