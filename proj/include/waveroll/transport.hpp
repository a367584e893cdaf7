#pragma once

// Playback clock state machine. Owns no audio and no timers: callers pass in
// wall-clock readings and poll events_in() ahead of the audio device.

#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "waveroll/roll.hpp"

namespace waveroll {

struct Stopped {
  bool operator==(const Stopped&) const = default;
};

struct Paused {
  double mediaSec = 0.0;
  bool operator==(const Paused&) const = default;
};

struct Playing {
  double anchorWallSec = 0.0;
  double anchorMediaSec = 0.0;
  bool operator==(const Playing&) const = default;
};

using TransportMode = std::variant<Stopped, Paused, Playing>;

// Half-open [a, b).
struct LoopRegion {
  double a = 0.0;
  double b = 0.0;
  bool operator==(const LoopRegion&) const = default;
};

struct TransportState {
  TransportMode mode = Stopped{};
  std::optional<LoopRegion> loop;
  double durationSec = 0.0;
  bool operator==(const TransportState&) const = default;

  bool playing() const { return std::holds_alternative<Playing>(mode); }
};

TransportState make_transport(double durationSec);

TransportState play(const TransportState& s, double wallNowSec);
TransportState pause(const TransportState& s, double wallNowSec);
TransportState stop(const TransportState& s);

// Clamps to [0, duration]. While playing the clock is re-anchored at
// wallNowSec so current_time(result, wallNowSec) == target.
TransportState seek(const TransportState& s, double targetSec, double wallNowSec);

// Throws TransportError(kInvalidLoop) unless a < b after clamping. A playing
// transport outside the new region jumps to a.
TransportState set_loop(const TransportState& s, double aSec, double bSec, double wallNowSec);
TransportState clear_loop(const TransportState& s, double wallNowSec);

/// Media position at wallNowSec. Throws TransportError(kClockSkew) when the
/// wall clock reads earlier than the playing anchor.
double current_time(const TransportState& s, double wallNowSec);

// Applies the end-of-media rule: playback without a loop that has reached
// the end becomes Stopped.
TransportState settle(const TransportState& s, double wallNowSec);

class TrackMix {
 public:
  explicit TrackMix(std::string layerId = {}) : layerId_(std::move(layerId)) {}

  const std::string& layer_id() const { return layerId_; }
  bool mute() const { return mute_; }
  double pan() const { return pan_; }
  double gain() const { return gain_; }

  TrackMix& set_mute(bool m) {
    mute_ = m;
    return *this;
  }
  // Clamped to [-1, 1].
  TrackMix& set_pan(double p);
  // Clamped to [0, 2].
  TrackMix& set_gain(double g);

  bool operator==(const TrackMix&) const = default;

 private:
  std::string layerId_;
  bool mute_ = false;
  double pan_ = 0.0;
  double gain_ = 1.0;
};

using MixTable = std::unordered_map<std::string, TrackMix>;

struct NoteOnEvt {
  std::string layerId;
  int pitch = 0;
  int velocity = 0;
  bool operator==(const NoteOnEvt&) const = default;
};

struct NoteOffEvt {
  std::string layerId;
  int pitch = 0;
  bool operator==(const NoteOffEvt&) const = default;
};

struct ScheduledEvent {
  double atSec = 0.0;
  std::variant<NoteOnEvt, NoteOffEvt> kind;
  double pan = 0.0;
  double gain = 1.0;
  bool operator==(const ScheduledEvent&) const = default;
};

/// Note boundaries of visible, unmuted midi layers falling in [t0, t1),
/// ordered by time, then layer order, with note-offs before note-ons at the
/// same instant. Layers absent from `mixes` play with the default mix.
std::vector<ScheduledEvent> events_in(const RollDocument& doc, const TransportState& state, const MixTable& mixes,
                                      double t0Sec, double t1Sec);

}  // namespace waveroll
