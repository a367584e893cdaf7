#pragma once

// The layered piano-roll document and the manifest that describes it.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "waveroll/notes.hpp"
#include "waveroll/wav.hpp"

namespace waveroll {

struct Rgba {
  uint8_t r = 0, g = 0, b = 0, a = 255;
  bool operator==(const Rgba&) const = default;
};

enum class LayerKind { kMidi, kAudio };

std::string_view to_string(LayerKind kind);
std::optional<LayerKind> parse_layer_kind(std::string_view text);

struct ManifestEntry {
  std::string path;
  std::string name;
  LayerKind type = LayerKind::kMidi;
  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  bool operator==(const Manifest&) const = default;
};

/// Parses the `files` attribute payload: a JSON array of
/// {"path", "name", "type"} objects. A missing name defaults to the file
/// stem. Throws ManifestError.
Manifest load_manifest(std::string_view jsonText);

struct TrackLayer {
  std::string id;
  std::string name;
  LayerKind kind = LayerKind::kMidi;
  Rgba color;
  bool visible = true;
  bool sustainVisible = true;
  std::string sourcePath;
  bool operator==(const TrackLayer&) const = default;
};

struct Viewport {
  double timeStart = 0.0;
  double timeEnd = 1.0;
  int pitchMin = 21;
  int pitchMax = 108;
  bool operator==(const Viewport&) const = default;
};

inline constexpr double kMinViewportSec = 0.001;
inline constexpr int kPianoLowest = 21;
inline constexpr int kPianoHighest = 108;

struct AudioTrack {
  std::string layerId;
  int sampleRate = 0;
  std::size_t sampleCount = 0;
  double durationSec = 0.0;
  bool operator==(const AudioTrack&) const = default;
};

struct RollDocument {
  Manifest manifest;
  std::vector<TrackLayer> layers;
  std::unordered_map<std::string, std::vector<NoteEvent>> notesByLayer;
  std::unordered_map<std::string, std::vector<PedalSpan>> pedalByLayer;
  std::optional<AudioTrack> audio;
  std::shared_ptr<const PeakPyramid> waveform;  // absent when audio was not decoded
  Viewport viewport;
  double durationSec = 0.0;

  const TrackLayer* find_layer(std::string_view id) const;
  const std::vector<NoteEvent>& notes(std::string_view layerId) const;
  const std::vector<PedalSpan>& pedal(std::string_view layerId) const;
};

// Compares everything except the shared waveform pointer identity; two
// pyramids compare by value.
bool operator==(const RollDocument& a, const RollDocument& b);

struct MidiSource {
  std::vector<NoteEvent> notes;
  std::vector<PedalSpan> pedal;
  ParseReport report;
};

struct AudioSource {
  int sampleRate = 0;
  std::size_t sampleCount = 0;
  std::shared_ptr<const PeakPyramid> peaks;
};

using ParsedSource = std::variant<MidiSource, AudioSource>;

MidiSource decode_midi_source(std::span<const uint8_t> bytes);
AudioSource decode_audio_source(std::span<const uint8_t> bytes);

std::array<Rgba, 8> default_palette();

/// Layer i gets id "track<i>" and palette color i mod 8. Throws
/// DocumentError if the sources do not line up with the manifest.
RollDocument build_document(const Manifest& manifest, std::vector<ParsedSource> sources);

RollDocument set_layer_visibility(const RollDocument& doc, std::string_view layerId, bool visible);
RollDocument set_layer_sustain_visibility(const RollDocument& doc, std::string_view layerId, bool visible);
RollDocument set_layer_color(const RollDocument& doc, std::string_view layerId, Rgba color);

/// Clamps rather than fails, so interactive zoom/pan never throws.
Viewport clamp_viewport(Viewport requested, double durationSec);
RollDocument set_viewport(const RollDocument& doc, Viewport requested);

// Max over note offsets, pedal ends and audio length.
double document_extent(const RollDocument& doc);

}  // namespace waveroll
