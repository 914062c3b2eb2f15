#pragma once

#include <cstddef>
#include <vector>

#include "hivesound/audio.hpp"

namespace hivesound {

// Row-major dense matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double value = 0.0)
      : rows(r), cols(c), data(r * c, value) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
};

enum class Window { Hann, Rectangular };

struct StftConfig {
  int n_fft = 2048;  // power of two
  int hop = 512;     // 0 < hop <= n_fft
  Window window = Window::Hann;
  bool center_pad = true;  // reflection-pad by n_fft/2 on both ends
};

// Magnitude spectrogram: one row per frame, n_fft/2 + 1 bins.
struct Spectrogram {
  Matrix magnitudes;               // frames x bins
  std::vector<double> bin_freqs;   // Hz per bin, k * sample_rate / n_fft
  std::vector<double> frame_times; // seconds per frame
};

// Triangular mel filterbank, n_mels x bins.
struct MelFilterbank {
  Matrix weights;
  int n_mels = 0;
  // first/last nonzero column per row, for sparse application
  std::vector<std::size_t> lo, hi;
};

// Consecutive windows of the raw signal, no centering:
// frame count = 1 + floor((N - frame_len) / hop). Throws if the clip is
// shorter than one frame.
std::vector<std::vector<double>> frame_signal(const AudioClip& clip, int frame_len, int hop);

Spectrogram stft(const AudioClip& clip, const StftConfig& cfg);

// mel(f) = 2595 * log10(1 + f / 700); triangles area-normalized by
// 2 / (f_upper - f_lower). Throws when some filter would cover no FFT bin.
MelFilterbank mel_filterbank(int n_mels, int n_fft, int sample_rate,
                             double f_min = 0.0, double f_max = -1.0);

// Orthonormal DCT-II along the rows axis (input is mels x frames),
// truncated to the first n_coeffs coefficients.
Matrix dct_ii(const Matrix& m, int n_coeffs);

// 10 * log10(max(power, 1e-10))
double power_to_db(double power);

inline constexpr double kPowerFloor = 1e-10;

}  // namespace hivesound
