#include "hivesound/audio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hivesound {

std::string to_string(Label label) { return label == Label::Bee ? "bee" : "nobee"; }

Label parse_label(const std::string& text) {
  std::string t;
  for (char c : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "bee") return Label::Bee;
  if (t == "nobee") return Label::NoBee;
  throw std::runtime_error("unknown label token: '" + text + "'");
}

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

AudioClip read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open wav file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();

  if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0)
    throw std::runtime_error(path + ": not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::uint32_t data_size = 0;

  std::size_t off = 12;
  while (off + 8 <= n) {
    const std::uint32_t chunk_size = read_u32(p + off + 4);
    if (off + 8 + chunk_size > n)
      throw std::runtime_error(path + ": truncated chunk");
    if (std::memcmp(p + off, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw std::runtime_error(path + ": malformed fmt chunk");
      format = read_u16(p + off + 8);
      channels = read_u16(p + off + 10);
      rate = read_u32(p + off + 12);
      bits = read_u16(p + off + 22);
      have_fmt = true;
    } else if (std::memcmp(p + off, "data", 4) == 0) {
      data = p + off + 8;
      data_size = chunk_size;
    }
    off += 8 + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!have_fmt) throw std::runtime_error(path + ": missing fmt chunk");
  if (data == nullptr) throw std::runtime_error(path + ": missing data chunk");
  if (data_size == 0) throw std::runtime_error(path + ": empty data chunk");
  if (channels < 1 || channels > 2)
    throw std::runtime_error(path + ": unsupported channel count " + std::to_string(channels));
  if (rate == 0) throw std::runtime_error(path + ": zero sample rate");

  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool float32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !float32)
    throw std::runtime_error(path + ": unsupported encoding (format " + std::to_string(format) +
                             ", " + std::to_string(bits) + " bit)");

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_size = bytes_per_sample * channels;
  const std::size_t frames = data_size / frame_size;
  if (frames == 0) throw std::runtime_error(path + ": empty data chunk");

  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  clip.samples.resize(frames);

  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::uint16_t c = 0; c < channels; ++c) {
      const unsigned char* s = data + i * frame_size + c * bytes_per_sample;
      double v;
      if (pcm16) {
        std::int16_t raw;
        std::memcpy(&raw, s, 2);
        v = static_cast<double>(raw) / 32768.0;
      } else {
        float raw;
        std::memcpy(&raw, s, 4);
        v = static_cast<double>(raw);
        if (!std::isfinite(v) || v < -1.0 || v > 1.0)
          throw std::runtime_error(path + ": sample " + std::to_string(i) +
                                   " outside [-1, 1]");
      }
      acc += v;
    }
    clip.samples[i] = acc / channels;
  }
  return clip;
}

void write_wav(const AudioClip& clip, const std::string& path) {
  if (clip.samples.empty()) throw std::runtime_error("write_wav: empty clip");
  if (clip.sample_rate <= 0) throw std::runtime_error("write_wav: invalid sample rate");

  const std::uint32_t n = static_cast<std::uint32_t>(clip.samples.size());
  const std::uint32_t data_size = n * 2;

  std::string out;
  out.reserve(44 + data_size);
  out.append("RIFF");
  put_u32(out, 36 + data_size);
  out.append("WAVE");
  out.append("fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.append("data");
  put_u32(out, data_size);

  for (double x : clip.samples) {
    if (!std::isfinite(x)) throw std::runtime_error("write_wav: non-finite sample");
    long q = std::lround(x * 32768.0);
    q = std::clamp(q, -32768L, 32767L);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

AudioClip resample(const AudioClip& clip, int target_rate) {
  if (target_rate <= 0) throw std::invalid_argument("resample: target rate must be positive");
  if (clip.sample_rate <= 0) throw std::invalid_argument("resample: clip has no sample rate");
  if (target_rate == clip.sample_rate) return clip;
  if (clip.samples.empty()) return AudioClip{{}, target_rate};

  const std::size_t n = clip.samples.size();
  const double ratio = static_cast<double>(clip.sample_rate) / target_rate;
  const std::size_t m = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * target_rate / clip.sample_rate));

  AudioClip out;
  out.sample_rate = target_rate;
  out.samples.resize(std::max<std::size_t>(m, 1));
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    const double pos = i * ratio;
    const auto i0 = static_cast<std::size_t>(pos);
    if (i0 + 1 >= n) {
      out.samples[i] = clip.samples[n - 1];
    } else {
      const double frac = pos - static_cast<double>(i0);
      out.samples[i] = clip.samples[i0] * (1.0 - frac) + clip.samples[i0 + 1] * frac;
    }
  }
  return out;
}

std::vector<LabeledInterval> parse_annotations(const std::string& text) {
  std::vector<LabeledInterval> intervals;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;  // blank
    if (line[first] == '#') continue;          // comment

    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      std::size_t tab = line.find('\t', pos);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, tab - pos));
      pos = tab + 1;
    }
    if (fields.size() != 3)
      throw std::runtime_error("annotation line " + std::to_string(line_no) +
                               ": expected start<TAB>end<TAB>label");

    LabeledInterval iv;
    try {
      std::size_t used = 0;
      iv.start = std::stod(fields[0], &used);
      if (used != fields[0].size()) throw std::invalid_argument("trailing");
      iv.end = std::stod(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw std::runtime_error("annotation line " + std::to_string(line_no) +
                               ": unparseable time field");
    }
    if (iv.start < 0.0)
      throw std::runtime_error("annotation line " + std::to_string(line_no) +
                               ": negative start time");
    if (iv.end <= iv.start)
      throw std::runtime_error("annotation line " + std::to_string(line_no) +
                               ": end must be greater than start");
    try {
      iv.label = parse_label(fields[2]);
    } catch (const std::exception&) {
      throw std::runtime_error("annotation line " + std::to_string(line_no) +
                               ": unknown label '" + fields[2] + "'");
    }
    intervals.push_back(iv);
  }

  std::stable_sort(intervals.begin(), intervals.end(),
                   [](const LabeledInterval& a, const LabeledInterval& b) {
                     return a.start < b.start;
                   });
  for (std::size_t i = 1; i < intervals.size(); ++i) {
    if (intervals[i].start < intervals[i - 1].end)
      throw std::runtime_error("annotation intervals overlap near t=" +
                               std::to_string(intervals[i].start));
  }
  return intervals;
}

std::vector<LabeledInterval> parse_annotations_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open annotation file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_annotations(text);
}

std::vector<Segment> segment_clip(const AudioClip& clip,
                                  const std::vector<LabeledInterval>& annotations,
                                  double block_seconds, const std::string& source_id) {
  if (clip.samples.empty()) throw std::runtime_error("segment: empty clip");
  if (clip.sample_rate <= 0) throw std::invalid_argument("segment: invalid sample rate");
  if (block_seconds <= 0.0) throw std::invalid_argument("segment: block length must be positive");
  if (annotations.empty()) throw std::runtime_error("segment: no annotations, no labels derivable");

  const auto block_len =
      static_cast<std::size_t>(std::llround(block_seconds * clip.sample_rate));
  if (block_len == 0) throw std::invalid_argument("segment: block shorter than one sample");

  const std::size_t n = clip.samples.size();
  const std::size_t n_blocks = (n + block_len - 1) / block_len;

  std::vector<Segment> out;
  out.reserve(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    const std::size_t begin = b * block_len;
    const std::size_t avail = std::min(block_len, n - begin);

    Segment seg;
    seg.source_id = source_id;
    seg.offset = static_cast<double>(begin) / clip.sample_rate;
    seg.clip.sample_rate = clip.sample_rate;
    seg.clip.samples.resize(block_len);
    for (std::size_t i = 0; i < block_len; ++i)
      seg.clip.samples[i] = clip.samples[begin + (i % avail)];

    const double t0 = seg.offset;
    const double t1 = t0 + block_seconds;
    seg.label = Label::Bee;
    for (const auto& iv : annotations) {
      if (iv.label != Label::NoBee) continue;
      if (std::min(t1, iv.end) - std::max(t0, iv.start) > 0.0) {
        seg.label = Label::NoBee;
        break;
      }
    }
    out.push_back(std::move(seg));
  }
  return out;
}

AudioClip mix_segments(const Segment& a, const Segment& b, double split_at,
                       double block_seconds) {
  if (a.clip.sample_rate != b.clip.sample_rate)
    throw std::invalid_argument("mix_segments: sample rates differ");
  if (!(split_at > 0.0) || split_at > block_seconds)
    throw std::invalid_argument("mix_segments: split must lie in (0, block]");

  const int rate = a.clip.sample_rate;
  const auto block_len = static_cast<std::size_t>(std::llround(block_seconds * rate));
  const auto n_a = std::min(static_cast<std::size_t>(std::llround(split_at * rate)), block_len);
  const std::size_t n_b = block_len - n_a;
  if (a.clip.samples.size() < n_a || b.clip.samples.size() < n_b)
    throw std::invalid_argument("mix_segments: source segments shorter than the block");

  AudioClip out;
  out.sample_rate = rate;
  out.samples.reserve(block_len);
  out.samples.assign(a.clip.samples.begin(), a.clip.samples.begin() + static_cast<long>(n_a));
  out.samples.insert(out.samples.end(), b.clip.samples.begin(),
                     b.clip.samples.begin() + static_cast<long>(n_b));
  return out;
}

}  // namespace hivesound
