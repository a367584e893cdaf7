#include "waveroll/notes.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <tuple>

namespace waveroll {

namespace {

struct OpenNote {
  uint64_t tick;
  int velocity;
};

}  // namespace

std::vector<NoteEvent> extract_notes(const MidiFile& file, const TempoMap& tempo, ParseReport& report) {
  report = {};
  std::vector<NoteEvent> notes;

  for (std::size_t t = 0; t < file.tracks.size(); ++t) {
    const MidiTrack& track = file.tracks[t];
    // (channel, pitch) -> open notes, oldest first
    std::map<std::pair<int, int>, std::deque<OpenNote>> open;

    auto close = [&](int channel, int pitch, uint64_t onTick, int velocity, uint64_t offTick) {
      double on = tempo.ticks_to_seconds(onTick);
      double off = tempo.ticks_to_seconds(offTick);
      if (!(off > on)) {
        ++report.zeroLengthNotes;
        return;
      }
      notes.push_back({pitch, on, off, velocity, static_cast<int>(t), channel});
    };

    for (const auto& ev : track.events) {
      int channel = -1, pitch = -1;
      bool isOn = false;
      int velocity = 0;
      if (const auto* on = std::get_if<NoteOn>(&ev.kind)) {
        channel = on->channel;
        pitch = on->pitch;
        velocity = on->velocity;
        isOn = velocity > 0;
      } else if (const auto* off = std::get_if<NoteOff>(&ev.kind)) {
        channel = off->channel;
        pitch = off->pitch;
      } else {
        continue;
      }

      auto& queue = open[{channel, pitch}];
      if (isOn) {
        ++report.noteOnCount;
        queue.push_back({ev.tick, velocity});
      } else if (queue.empty()) {
        ++report.orphanNoteOffs;
      } else {
        OpenNote n = queue.front();
        queue.pop_front();
        close(channel, pitch, n.tick, n.velocity, ev.tick);
      }
    }

    uint64_t end = track.final_tick();
    for (auto& [key, queue] : open) {
      for (const auto& n : queue) {
        ++report.unterminatedNotes;
        close(key.first, key.second, n.tick, n.velocity, end);
      }
    }
  }

  std::sort(notes.begin(), notes.end(), [](const NoteEvent& a, const NoteEvent& b) {
    return std::tie(a.onsetSec, a.pitch, a.trackIndex, a.channel, a.offsetSec, a.velocity) <
           std::tie(b.onsetSec, b.pitch, b.trackIndex, b.channel, b.offsetSec, b.velocity);
  });
  return notes;
}

std::vector<NoteEvent> extract_notes(const MidiFile& file, const TempoMap& tempo) {
  ParseReport report;
  return extract_notes(file, tempo, report);
}

std::vector<PedalSpan> extract_pedal(const MidiFile& file, const TempoMap& tempo) {
  constexpr int kSustain = 64;
  std::vector<PedalSpan> spans;

  for (std::size_t t = 0; t < file.tracks.size(); ++t) {
    const MidiTrack& track = file.tracks[t];
    std::map<int, uint64_t> down;  // channel -> tick pressed

    auto close = [&](int channel, uint64_t from, uint64_t to) {
      double start = tempo.ticks_to_seconds(from);
      double end = tempo.ticks_to_seconds(to);
      if (end > start) spans.push_back({start, end, static_cast<int>(t), channel});
    };

    for (const auto& ev : track.events) {
      const auto* cc = std::get_if<ControlChange>(&ev.kind);
      if (cc == nullptr || cc->controller != kSustain) continue;
      auto it = down.find(cc->channel);
      if (cc->value >= 64) {
        if (it == down.end()) down.emplace(cc->channel, ev.tick);
      } else if (it != down.end()) {
        close(cc->channel, it->second, ev.tick);
        down.erase(it);
      }
    }
    for (const auto& [channel, from] : down) close(channel, from, track.final_tick());
  }

  std::sort(spans.begin(), spans.end(), [](const PedalSpan& a, const PedalSpan& b) {
    return std::tie(a.startSec, a.trackIndex, a.channel, a.endSec) <
           std::tie(b.startSec, b.trackIndex, b.channel, b.endSec);
  });
  return spans;
}

}  // namespace waveroll
