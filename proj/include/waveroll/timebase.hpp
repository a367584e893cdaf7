#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "waveroll/smf.hpp"

namespace waveroll {

inline constexpr uint32_t kDefaultMicrosPerQuarter = 500000;

struct TempoSegment {
  uint64_t startTick = 0;
  uint32_t microsPerQuarter = kDefaultMicrosPerQuarter;
  double startSec = 0.0;  // cumulative seconds at startTick
  bool operator==(const TempoSegment&) const = default;
};

// Piecewise-constant tempo curve. Immutable once built.
class TempoMap {
 public:
  // Builds from (startTick, microsPerQuarter) changes in any order. Equal
  // ticks keep the last entry; a default tempo is inserted at tick 0 when
  // none is given there. Throws std::invalid_argument on ppq <= 0 or a zero
  // tempo.
  TempoMap(int ppq, std::vector<std::pair<uint64_t, uint32_t>> changes);

  int ppq() const { return ppq_; }
  const std::vector<TempoSegment>& segments() const { return segments_; }

  double ticks_to_seconds(uint64_t tick) const;

  bool operator==(const TempoMap&) const = default;

 private:
  int ppq_;
  std::vector<TempoSegment> segments_;
};

// Tempo events from every track apply globally.
TempoMap build_tempo_map(const MidiFile& file);

inline double ticks_to_seconds(const TempoMap& map, uint64_t tick) { return map.ticks_to_seconds(tick); }

}  // namespace waveroll
