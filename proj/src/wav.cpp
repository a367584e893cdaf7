#include "waveroll/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>

#include "waveroll/error.hpp"

namespace waveroll {

namespace {

constexpr uint16_t kFormatPcm = 0x0001;
constexpr uint16_t kFormatFloat = 0x0003;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint16_t le16(const uint8_t* p) { return static_cast<uint16_t>(p[0] | (p[1] << 8)); }
uint32_t le32(const uint8_t* p) {
  return uint32_t{p[0]} | (uint32_t{p[1]} << 8) | (uint32_t{p[2]} << 16) | (uint32_t{p[3]} << 24);
}

bool tag_is(const uint8_t* p, const char* tag) { return std::memcmp(p, tag, 4) == 0; }

struct Format {
  uint16_t codec = 0;
  int channels = 0;
  int sampleRate = 0;
  int bitsPerSample = 0;
};

Format read_fmt(std::span<const uint8_t> body) {
  if (body.size() < 16) throw WavError(WavErrc::kMalformed, "fmt chunk shorter than 16 bytes");
  Format f;
  f.codec = le16(&body[0]);
  f.channels = le16(&body[2]);
  f.sampleRate = static_cast<int>(le32(&body[4]));
  f.bitsPerSample = le16(&body[14]);
  if (f.codec == kFormatExtensible) {
    if (body.size() < 26) throw WavError(WavErrc::kMalformed, "extensible fmt chunk too short");
    f.codec = le16(&body[24]);  // first two bytes of the subformat GUID
  }
  bool pcm16 = f.codec == kFormatPcm && f.bitsPerSample == 16;
  bool float32 = f.codec == kFormatFloat && f.bitsPerSample == 32;
  if (!pcm16 && !float32) {
    throw WavError(WavErrc::kUnsupportedCodec, "unsupported WAV encoding (codec " + std::to_string(f.codec) +
                                                   ", " + std::to_string(f.bitsPerSample) +
                                                   " bits); expected PCM16 or float32");
  }
  if (f.channels != 1 && f.channels != 2) {
    throw WavError(WavErrc::kUnsupportedCodec, "unsupported channel count " + std::to_string(f.channels));
  }
  if (f.sampleRate <= 0) throw WavError(WavErrc::kMalformed, "sample rate must be positive");
  return f;
}

}  // namespace

std::vector<float> PcmAudio::mono_mixdown() const {
  if (channels.size() == 1) return channels.front();
  std::vector<float> mono(frame_count());
  for (std::size_t i = 0; i < mono.size(); ++i) {
    double sum = 0.0;
    for (const auto& ch : channels) sum += ch[i];
    mono[i] = static_cast<float>(sum / static_cast<double>(channels.size()));
  }
  return mono;
}

PcmAudio parse_wav(std::span<const uint8_t> bytes) {
  if (bytes.size() < 12 || !tag_is(bytes.data(), "RIFF") || !tag_is(bytes.data() + 8, "WAVE")) {
    throw WavError(WavErrc::kBadMagic, "not a RIFF/WAVE file");
  }
  std::optional<Format> fmt;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* header = bytes.data() + pos;
    uint32_t size = le32(header + 4);
    pos += 8;
    std::size_t available = bytes.size() - pos;

    if (tag_is(header, "fmt ")) {
      if (size > available) throw WavError(WavErrc::kTruncated, "truncated fmt chunk");
      fmt = read_fmt(bytes.subspan(pos, size));
    } else if (tag_is(header, "data")) {
      if (!fmt) throw WavError(WavErrc::kMalformed, "data chunk precedes fmt chunk");
      if (size > available) {
        throw WavError(WavErrc::kTruncated, "data chunk declares " + std::to_string(size) + " bytes, " +
                                                std::to_string(available) + " present");
      }
      auto body = bytes.subspan(pos, size);
      std::size_t bytesPerSample = static_cast<std::size_t>(fmt->bitsPerSample / 8);
      std::size_t frameBytes = bytesPerSample * static_cast<std::size_t>(fmt->channels);
      std::size_t frames = body.size() / frameBytes;

      PcmAudio pcm;
      pcm.sampleRate = fmt->sampleRate;
      pcm.channels.assign(static_cast<std::size_t>(fmt->channels), std::vector<float>(frames));
      for (std::size_t i = 0; i < frames; ++i) {
        for (int c = 0; c < fmt->channels; ++c) {
          const uint8_t* p = body.data() + i * frameBytes + static_cast<std::size_t>(c) * bytesPerSample;
          float v;
          if (fmt->codec == kFormatPcm) {
            v = static_cast<float>(static_cast<int16_t>(le16(p))) / 32768.0f;
          } else {
            v = std::bit_cast<float>(le32(p));
            v = std::isnan(v) ? 0.0f : std::clamp(v, -1.0f, 1.0f);
          }
          pcm.channels[static_cast<std::size_t>(c)][i] = v;
        }
      }
      return pcm;
    }
    pos += size + (size & 1u);  // chunks are word aligned
  }
  throw WavError(WavErrc::kMalformed, fmt ? "WAV file has no data chunk" : "WAV file has no fmt chunk");
}

MinMax combine(MinMax a, MinMax b) { return {std::min(a.min, b.min), std::max(a.max, b.max)}; }

PeakPyramid build_peaks(std::span<const float> mono, int sampleRate) {
  if (mono.empty()) throw WavError(WavErrc::kEmpty, "cannot build peaks for empty audio");
  PeakPyramid pyr;
  pyr.sampleRate = sampleRate;
  pyr.sampleCount = mono.size();

  PeakLevel base{kBaseBucketSamples, {}};
  base.buckets.reserve((mono.size() + kBaseBucketSamples - 1) / kBaseBucketSamples);
  for (std::size_t start = 0; start < mono.size(); start += kBaseBucketSamples) {
    std::size_t end = std::min(mono.size(), start + kBaseBucketSamples);
    auto [lo, hi] = std::minmax_element(mono.begin() + static_cast<std::ptrdiff_t>(start),
                                        mono.begin() + static_cast<std::ptrdiff_t>(end));
    base.buckets.push_back({*lo, *hi});
  }
  pyr.levels.push_back(std::move(base));

  while (pyr.levels.back().buckets.size() > kTopLevelMaxBuckets) {
    const PeakLevel& fine = pyr.levels.back();
    PeakLevel coarse{fine.bucketSize * 2, {}};
    coarse.buckets.reserve((fine.buckets.size() + 1) / 2);
    for (std::size_t i = 0; i < fine.buckets.size(); i += 2) {
      MinMax m = fine.buckets[i];
      if (i + 1 < fine.buckets.size()) m = combine(m, fine.buckets[i + 1]);
      coarse.buckets.push_back(m);
    }
    pyr.levels.push_back(std::move(coarse));
  }
  return pyr;
}

PeakPyramid build_peaks(const PcmAudio& pcm) {
  auto mono = pcm.mono_mixdown();
  return build_peaks(mono, pcm.sampleRate);
}

std::vector<MinMax> peaks_for_window(const PeakPyramid& pyr, int sampleRate, double t0Sec, double t1Sec,
                                     int columns) {
  if (columns < 1) throw std::invalid_argument("columns must be positive");
  if (!(t1Sec > t0Sec)) throw std::invalid_argument("window end must exceed start");
  std::vector<MinMax> out(static_cast<std::size_t>(columns));
  if (pyr.levels.empty() || pyr.sampleCount == 0 || sampleRate <= 0) return out;

  double columnSec = (t1Sec - t0Sec) / columns;
  double columnSamples = columnSec * sampleRate;
  const PeakLevel* level = &pyr.levels.front();
  for (const auto& l : pyr.levels) {
    if (static_cast<double>(l.bucketSize) <= columnSamples) level = &l;
  }

  const double total = static_cast<double>(pyr.sampleCount);
  const double bucket = static_cast<double>(level->bucketSize);
  for (int c = 0; c < columns; ++c) {
    double start = (t0Sec + (t1Sec - t0Sec) * c / columns) * sampleRate;
    double end = (t0Sec + (t1Sec - t0Sec) * (c + 1) / columns) * sampleRate;
    double s0 = std::max(0.0, std::floor(start));
    double s1 = std::min(total, std::ceil(end));
    if (!(s1 > s0)) continue;
    auto first = static_cast<std::size_t>(std::floor(s0 / bucket));
    auto last = static_cast<std::size_t>(std::ceil(s1 / bucket));
    last = std::min(last, level->buckets.size());
    MinMax m = level->buckets[first];
    for (std::size_t b = first + 1; b < last; ++b) m = combine(m, level->buckets[b]);
    out[static_cast<std::size_t>(c)] = m;
  }
  return out;
}

}  // namespace waveroll
