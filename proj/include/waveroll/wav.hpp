#pragma once

// RIFF/WAVE decoding and min/max peak pyramids for waveform display.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace waveroll {

struct PcmAudio {
  int sampleRate = 44100;
  // One vector per channel (1 or 2), normalized to [-1, 1].
  std::vector<std::vector<float>> channels;

  int channel_count() const { return static_cast<int>(channels.size()); }
  std::size_t frame_count() const { return channels.empty() ? 0 : channels.front().size(); }
  double duration_sec() const { return sampleRate > 0 ? static_cast<double>(frame_count()) / sampleRate : 0.0; }

  // Channel mean; the single lane peaks are computed over.
  std::vector<float> mono_mixdown() const;
};

/// Accepts PCM 16-bit integer and IEEE float32, mono or stereo. Chunks other
/// than "fmt " and "data" are skipped. Throws WavError.
PcmAudio parse_wav(std::span<const uint8_t> bytes);

struct MinMax {
  float min = 0.0f;
  float max = 0.0f;
  bool operator==(const MinMax&) const = default;
};

struct PeakLevel {
  std::size_t bucketSize = 0;  // samples per bucket
  std::vector<MinMax> buckets;
  bool operator==(const PeakLevel&) const = default;
};

inline constexpr std::size_t kBaseBucketSamples = 256;
inline constexpr std::size_t kTopLevelMaxBuckets = 1024;

struct PeakPyramid {
  int sampleRate = 0;
  std::size_t sampleCount = 0;
  std::vector<PeakLevel> levels;  // finest first
  bool operator==(const PeakPyramid&) const = default;
};

MinMax combine(MinMax a, MinMax b);

/// Base level of 256-sample buckets over the mono mixdown, then pairwise
/// merges until a level has at most 1024 buckets. Throws WavError(kEmpty)
/// for audio without samples.
PeakPyramid build_peaks(const PcmAudio& pcm);
PeakPyramid build_peaks(std::span<const float> mono, int sampleRate);

/// Column c covers [t0 + c*w, t0 + (c+1)*w) with w = (t1 - t0) / columns.
/// Each column aggregates every bucket its sample span touches on the
/// coarsest level whose bucket lasts no longer than w. Columns with no audio
/// are (0, 0).
std::vector<MinMax> peaks_for_window(const PeakPyramid& pyr, int sampleRate, double t0Sec, double t1Sec,
                                     int columns);

}  // namespace waveroll
