#pragma once

#include <cstdint>
#include <vector>

#include "waveroll/smf.hpp"
#include "waveroll/timebase.hpp"

namespace waveroll {

struct NoteEvent {
  int pitch = 60;
  double onsetSec = 0.0;
  double offsetSec = 0.0;
  int velocity = 64;
  int trackIndex = 0;
  int channel = 0;
  bool operator==(const NoteEvent&) const = default;
};

struct PedalSpan {
  double startSec = 0.0;
  double endSec = 0.0;
  int trackIndex = 0;
  int channel = 0;
  bool operator==(const PedalSpan&) const = default;
};

// Leniency counters collected while pairing note events.
struct ParseReport {
  int noteOnCount = 0;
  int orphanNoteOffs = 0;     // NoteOff with no open note of that key
  int unterminatedNotes = 0;  // closed at the track's final tick
  int zeroLengthNotes = 0;    // dropped: offset would not exceed onset
};

// NoteOn/NoteOff pairing per (track, channel, pitch), first-in first-out.
// A NoteOn with velocity 0 closes a note. Output sorted by onset, then pitch.
std::vector<NoteEvent> extract_notes(const MidiFile& file, const TempoMap& tempo);
std::vector<NoteEvent> extract_notes(const MidiFile& file, const TempoMap& tempo, ParseReport& report);

// Sustain (CC64) spans: value >= 64 is down.
std::vector<PedalSpan> extract_pedal(const MidiFile& file, const TempoMap& tempo);

}  // namespace waveroll
