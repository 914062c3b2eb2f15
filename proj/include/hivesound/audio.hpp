#pragma once

#include <string>
#include <vector>

namespace hivesound {

enum class Label { Bee, NoBee };

std::string to_string(Label label);
Label parse_label(const std::string& text);  // case-insensitive "bee" / "nobee"

// Mono sample buffer; the unit of all signal processing. Amplitudes are
// kept in [-1, 1]; anything outside that range is rejected at ingest.
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

struct LabeledInterval {
  double start = 0.0;  // seconds
  double end = 0.0;    // seconds, > start
  Label label = Label::Bee;
};

// A fixed-length labeled block cut out of an annotated recording.
struct Segment {
  AudioClip clip;
  Label label = Label::Bee;
  std::string source_id;
  double offset = 0.0;  // seconds into the source recording
};

// RIFF/WAVE reader. Accepts PCM-16 and IEEE-float-32, 1 or 2 channels;
// stereo is downmixed to the channel mean. Throws std::runtime_error on
// malformed containers, unsupported encodings, out-of-range float samples
// and empty data chunks.
AudioClip read_wav(const std::string& path);

// Writes PCM-16 mono. Roundtrip through read_wav is exact to within one
// quantization step (2^-15 per sample).
void write_wav(const AudioClip& clip, const std::string& path);

// Linear-interpolation resampler. Output duration matches the input within
// one sample period; equal rates return the input unchanged.
AudioClip resample(const AudioClip& clip, int target_rate);

// Parses annotation text: one interval per line,
// `start_seconds<TAB>end_seconds<TAB>label`, labels bee|nobee
// case-insensitive, `#` comments and blank lines ignored. Output is sorted
// by start; overlapping intervals are an ingest error.
std::vector<LabeledInterval> parse_annotations(const std::string& text);
std::vector<LabeledInterval> parse_annotations_file(const std::string& path);

// Cuts consecutive non-overlapping blocks of block_seconds. A block that
// overlaps any NoBee interval for more than zero duration is labeled NoBee,
// otherwise Bee. A short trailing block is completed by cyclically
// repeating its own samples until full length.
std::vector<Segment> segment_clip(const AudioClip& clip,
                                  const std::vector<LabeledInterval>& annotations,
                                  double block_seconds,
                                  const std::string& source_id);

// First split_at seconds of a followed by the first (block - split_at)
// seconds of b; split_at == block duration gives a unchanged. split_at must
// lie in (0, block_seconds].
AudioClip mix_segments(const Segment& a, const Segment& b, double split_at,
                       double block_seconds = 2.0);

}  // namespace hivesound
