#include "waveroll/timebase.hpp"

#include <algorithm>
#include <stdexcept>

namespace waveroll {

TempoMap::TempoMap(int ppq, std::vector<std::pair<uint64_t, uint32_t>> changes) : ppq_(ppq) {
  if (ppq <= 0) throw std::invalid_argument("ppq must be positive");
  std::stable_sort(changes.begin(), changes.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [tick, us] : changes) {
    if (us == 0) throw std::invalid_argument("tempo must be positive");
    if (!segments_.empty() && segments_.back().startTick == tick) {
      segments_.back().microsPerQuarter = us;
    } else {
      segments_.push_back({tick, us, 0.0});
    }
  }
  if (segments_.empty() || segments_.front().startTick != 0) {
    segments_.insert(segments_.begin(), TempoSegment{0, kDefaultMicrosPerQuarter, 0.0});
  }
  for (std::size_t i = 1; i < segments_.size(); ++i) {
    const auto& prev = segments_[i - 1];
    double span = static_cast<double>(segments_[i].startTick - prev.startTick);
    segments_[i].startSec = prev.startSec + span / ppq_ * prev.microsPerQuarter * 1e-6;
  }
}

double TempoMap::ticks_to_seconds(uint64_t tick) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), tick,
                             [](uint64_t t, const TempoSegment& s) { return t < s.startTick; });
  const TempoSegment& seg = *std::prev(it);
  double delta = static_cast<double>(tick - seg.startTick);
  return seg.startSec + delta / ppq_ * seg.microsPerQuarter * 1e-6;
}

TempoMap build_tempo_map(const MidiFile& file) {
  std::vector<std::pair<uint64_t, uint32_t>> changes;
  for (const auto& track : file.tracks) {
    for (const auto& ev : track.events) {
      if (const auto* t = std::get_if<Tempo>(&ev.kind)) changes.emplace_back(ev.tick, t->microsPerQuarter);
    }
  }
  return TempoMap(file.division, std::move(changes));
}

}  // namespace waveroll
