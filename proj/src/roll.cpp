#include "waveroll/roll.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

#include <json.hpp>

#include "waveroll/error.hpp"

namespace waveroll {

std::string_view to_string(LayerKind kind) { return kind == LayerKind::kAudio ? "audio" : "midi"; }

std::optional<LayerKind> parse_layer_kind(std::string_view text) {
  if (text == "midi") return LayerKind::kMidi;
  if (text == "audio") return LayerKind::kAudio;
  return std::nullopt;
}

Manifest load_manifest(std::string_view jsonText) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(jsonText);
  } catch (const nlohmann::json::parse_error& e) {
    throw ManifestError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!root.is_array()) throw ManifestError("manifest must be a JSON array");

  Manifest manifest;
  int audioCount = 0;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const auto& item = root[i];
    std::string where = "manifest entry " + std::to_string(i);
    if (!item.is_object()) throw ManifestError(where + " is not an object");
    auto path = item.find("path");
    if (path == item.end() || !path->is_string() || path->get<std::string>().empty()) {
      throw ManifestError(where + " is missing \"path\"");
    }
    auto type = item.find("type");
    if (type == item.end() || !type->is_string()) throw ManifestError(where + " is missing \"type\"");
    auto kind = parse_layer_kind(type->get<std::string>());
    if (!kind) throw ManifestError(where + " has unknown type \"" + type->get<std::string>() + "\"");

    ManifestEntry entry;
    entry.path = path->get<std::string>();
    entry.type = *kind;
    auto name = item.find("name");
    if (name != item.end() && name->is_string()) {
      entry.name = name->get<std::string>();
    } else {
      entry.name = std::filesystem::path(entry.path).stem().string();
    }
    if (entry.type == LayerKind::kAudio && ++audioCount > 1) {
      throw ManifestError("manifest lists more than one audio entry");
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

const TrackLayer* RollDocument::find_layer(std::string_view id) const {
  auto it = std::find_if(layers.begin(), layers.end(), [&](const TrackLayer& l) { return l.id == id; });
  return it == layers.end() ? nullptr : &*it;
}

const std::vector<NoteEvent>& RollDocument::notes(std::string_view layerId) const {
  static const std::vector<NoteEvent> kNone;
  auto it = notesByLayer.find(std::string(layerId));
  return it == notesByLayer.end() ? kNone : it->second;
}

const std::vector<PedalSpan>& RollDocument::pedal(std::string_view layerId) const {
  static const std::vector<PedalSpan> kNone;
  auto it = pedalByLayer.find(std::string(layerId));
  return it == pedalByLayer.end() ? kNone : it->second;
}

bool operator==(const RollDocument& a, const RollDocument& b) {
  bool sameWave = a.waveform == b.waveform || (a.waveform && b.waveform && *a.waveform == *b.waveform);
  return sameWave && a.manifest == b.manifest && a.layers == b.layers && a.notesByLayer == b.notesByLayer &&
         a.pedalByLayer == b.pedalByLayer && a.audio == b.audio && a.viewport == b.viewport &&
         a.durationSec == b.durationSec;
}

MidiSource decode_midi_source(std::span<const uint8_t> bytes) {
  MidiFile file = parse_smf(bytes);
  TempoMap tempo = build_tempo_map(file);
  MidiSource src;
  src.notes = extract_notes(file, tempo, src.report);
  src.pedal = extract_pedal(file, tempo);
  return src;
}

AudioSource decode_audio_source(std::span<const uint8_t> bytes) {
  PcmAudio pcm = parse_wav(bytes);
  AudioSource src;
  src.sampleRate = pcm.sampleRate;
  src.sampleCount = pcm.frame_count();
  if (src.sampleCount > 0) src.peaks = std::make_shared<const PeakPyramid>(build_peaks(pcm));
  return src;
}

std::array<Rgba, 8> default_palette() {
  return {{
      {0x4E, 0x79, 0xA7, 0xFF},
      {0xF2, 0x8E, 0x2B, 0xFF},
      {0xE1, 0x57, 0x59, 0xFF},
      {0x76, 0xB7, 0xB2, 0xFF},
      {0x59, 0xA1, 0x4F, 0xFF},
      {0xED, 0xC9, 0x48, 0xFF},
      {0xB0, 0x7A, 0xA1, 0xFF},
      {0xFF, 0x9D, 0xA7, 0xFF},
  }};
}

double document_extent(const RollDocument& doc) {
  double extent = 0.0;
  for (const auto& [id, notes] : doc.notesByLayer) {
    for (const auto& n : notes) extent = std::max(extent, n.offsetSec);
  }
  for (const auto& [id, spans] : doc.pedalByLayer) {
    for (const auto& p : spans) extent = std::max(extent, p.endSec);
  }
  if (doc.audio) extent = std::max(extent, doc.audio->durationSec);
  return extent;
}

RollDocument build_document(const Manifest& manifest, std::vector<ParsedSource> sources) {
  if (sources.size() != manifest.entries.size()) {
    throw DocumentError("expected " + std::to_string(manifest.entries.size()) + " parsed sources, got " +
                        std::to_string(sources.size()));
  }
  const auto palette = default_palette();
  RollDocument doc;
  doc.manifest = manifest;
  std::set<std::string> ids;
  int lowest = std::numeric_limits<int>::max();
  int highest = std::numeric_limits<int>::min();

  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const ManifestEntry& entry = manifest.entries[i];
    TrackLayer layer;
    layer.id = "track" + std::to_string(i);
    layer.name = entry.name;
    layer.kind = entry.type;
    layer.color = palette[i % palette.size()];
    layer.sourcePath = entry.path;
    if (!ids.insert(layer.id).second) throw DocumentError("duplicate layer id " + layer.id);

    if (entry.type == LayerKind::kMidi) {
      auto* midi = std::get_if<MidiSource>(&sources[i]);
      if (midi == nullptr) throw DocumentError("entry " + entry.path + " is midi but its source is audio");
      for (const auto& n : midi->notes) {
        lowest = std::min(lowest, n.pitch);
        highest = std::max(highest, n.pitch);
      }
      doc.notesByLayer[layer.id] = std::move(midi->notes);
      doc.pedalByLayer[layer.id] = std::move(midi->pedal);
    } else {
      auto* audio = std::get_if<AudioSource>(&sources[i]);
      if (audio == nullptr) throw DocumentError("entry " + entry.path + " is audio but its source is midi");
      if (doc.audio) throw DocumentError("a document holds at most one audio layer");
      double seconds = audio->sampleRate > 0 ? static_cast<double>(audio->sampleCount) / audio->sampleRate : 0.0;
      doc.audio = AudioTrack{layer.id, audio->sampleRate, audio->sampleCount, seconds};
      doc.waveform = audio->peaks;
    }
    doc.layers.push_back(std::move(layer));
  }

  doc.durationSec = document_extent(doc);
  Viewport vp{0.0, doc.durationSec, kPianoLowest, kPianoHighest};
  if (lowest <= highest) {
    vp.pitchMin = lowest - 2;
    vp.pitchMax = highest + 2;
  }
  doc.viewport = clamp_viewport(vp, doc.durationSec);
  return doc;
}

namespace {

TrackLayer& layer_or_throw(RollDocument& doc, std::string_view id) {
  auto it = std::find_if(doc.layers.begin(), doc.layers.end(), [&](const TrackLayer& l) { return l.id == id; });
  if (it == doc.layers.end()) throw DocumentError("unknown layer id \"" + std::string(id) + "\"");
  return *it;
}

}  // namespace

RollDocument set_layer_visibility(const RollDocument& doc, std::string_view layerId, bool visible) {
  RollDocument out = doc;
  layer_or_throw(out, layerId).visible = visible;
  return out;
}

RollDocument set_layer_sustain_visibility(const RollDocument& doc, std::string_view layerId, bool visible) {
  RollDocument out = doc;
  layer_or_throw(out, layerId).sustainVisible = visible;
  return out;
}

RollDocument set_layer_color(const RollDocument& doc, std::string_view layerId, Rgba color) {
  RollDocument out = doc;
  layer_or_throw(out, layerId).color = color;
  return out;
}

Viewport clamp_viewport(Viewport v, double durationSec) {
  if (!std::isfinite(v.timeStart)) v.timeStart = 0.0;
  if (!std::isfinite(v.timeEnd)) v.timeEnd = v.timeStart;
  v.timeStart = std::max(0.0, v.timeStart);
  v.timeEnd = std::min(v.timeEnd, std::max(durationSec, v.timeStart + kMinViewportSec));
  if (v.timeEnd - v.timeStart < kMinViewportSec) v.timeEnd = v.timeStart + kMinViewportSec;

  v.pitchMin = std::clamp(v.pitchMin, 0, 127);
  v.pitchMax = std::clamp(v.pitchMax, 0, 127);
  if (v.pitchMin > v.pitchMax) std::swap(v.pitchMin, v.pitchMax);
  if (v.pitchMin == v.pitchMax) {
    if (v.pitchMax < 127) {
      ++v.pitchMax;
    } else {
      --v.pitchMin;
    }
  }
  return v;
}

RollDocument set_viewport(const RollDocument& doc, Viewport requested) {
  RollDocument out = doc;
  out.viewport = clamp_viewport(requested, doc.durationSec);
  return out;
}

}  // namespace waveroll
