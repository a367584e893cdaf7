#pragma once

// Standard MIDI File decoding (format 0 and 1, PPQ division).

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace waveroll {

struct NoteOn {
  uint8_t channel = 0;
  uint8_t pitch = 0;
  uint8_t velocity = 0;
  bool operator==(const NoteOn&) const = default;
};

struct NoteOff {
  uint8_t channel = 0;
  uint8_t pitch = 0;
  uint8_t velocity = 0;
  bool operator==(const NoteOff&) const = default;
};

struct Tempo {
  uint32_t microsPerQuarter = 500000;
  bool operator==(const Tempo&) const = default;
};

struct ControlChange {
  uint8_t channel = 0;
  uint8_t controller = 0;
  uint8_t value = 0;
  bool operator==(const ControlChange&) const = default;
};

struct EndOfTrack {
  bool operator==(const EndOfTrack&) const = default;
};

// Anything not modelled above. For meta events status is 0xFF and the first
// payload byte is the meta type; for sysex the payload is the raw body.
struct OtherEvent {
  uint8_t status = 0;
  std::vector<uint8_t> payload;
  bool operator==(const OtherEvent&) const = default;
};

using EventKind = std::variant<NoteOn, NoteOff, Tempo, ControlChange, EndOfTrack, OtherEvent>;

struct TimedEvent {
  uint64_t tick = 0;
  EventKind kind;
  bool operator==(const TimedEvent&) const = default;
};

struct MidiTrack {
  std::vector<TimedEvent> events;
  bool operator==(const MidiTrack&) const = default;

  // Tick of the last event, 0 for an empty track.
  uint64_t final_tick() const { return events.empty() ? 0 : events.back().tick; }
};

struct MidiFile {
  int format = 0;
  int division = 480;
  std::vector<MidiTrack> tracks;
  bool operator==(const MidiFile&) const = default;
};

struct VlqResult {
  uint32_t value = 0;
  std::size_t consumed = 0;
};

inline constexpr uint32_t kVlqLimit = 1u << 28;

/// Decodes one variable-length quantity from the front of `bytes`.
/// Throws SmfError(kTruncated) when the input ends mid-quantity and
/// SmfError(kMalformedVlq) when more than four bytes would be needed.
VlqResult decode_vlq(std::span<const uint8_t> bytes);

/// Canonical (shortest) encoding. `value` must be below 2^28.
std::vector<uint8_t> encode_vlq(uint32_t value);

MidiFile parse_smf(std::span<const uint8_t> bytes);

}  // namespace waveroll
