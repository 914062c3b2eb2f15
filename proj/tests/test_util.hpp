#pragma once

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "hivesound/audio.hpp"
#include "hivesound/rng.hpp"

namespace testutil {

inline constexpr double kPi = 3.14159265358979323846;

inline hivesound::AudioClip sine(double freq, double seconds, int rate, double amplitude = 1.0) {
  hivesound::AudioClip clip;
  clip.sample_rate = rate;
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate));
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    clip.samples[i] = amplitude * std::sin(2.0 * kPi * freq * static_cast<double>(i) / rate);
  return clip;
}

inline hivesound::AudioClip noise(double seconds, int rate, hivesound::Rng& rng,
                                  double amplitude = 0.5) {
  hivesound::AudioClip clip;
  clip.sample_rate = rate;
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate));
  clip.samples.resize(n);
  for (auto& v : clip.samples) v = amplitude * (2.0 * rng.uniform() - 1.0);
  return clip;
}

// unique scratch directory, removed on destruction
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("hivesound_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
