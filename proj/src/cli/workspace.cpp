#include "waveroll/workspace.hpp"

#include <fstream>
#include <iterator>
#include <system_error>

#include "waveroll/wav.hpp"

namespace waveroll {

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw InputError("cannot read " + path.string() + ": no such file");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string() + ": open failed");
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw InputError("cannot read " + path.string() + ": read failed");
  return bytes;
}

Workspace load_workspace(const Manifest& manifest, const std::filesystem::path& baseDir) {
  Workspace ws;
  ws.baseDir = baseDir;
  ws.manifest = manifest;
  std::vector<ParsedSource> sources;
  for (const auto& entry : manifest.entries) {
    std::filesystem::path full = baseDir / entry.path;
    auto bytes = read_file_bytes(full);
    try {
      if (entry.type == LayerKind::kMidi) {
        sources.emplace_back(decode_midi_source(bytes));
      } else {
        PcmAudio pcm = parse_wav(bytes);
        ws.audioChannels = pcm.channel_count();
        AudioSource src;
        src.sampleRate = pcm.sampleRate;
        src.sampleCount = pcm.frame_count();
        if (src.sampleCount > 0) src.peaks = std::make_shared<const PeakPyramid>(build_peaks(pcm));
        sources.emplace_back(std::move(src));
      }
    } catch (const Error& e) {
      throw InputError(full.string() + ": " + e.what());
    }
    ws.files.emplace(entry.path, std::move(bytes));
  }
  ws.doc = build_document(manifest, std::move(sources));
  return ws;
}

Workspace load_workspace(const std::filesystem::path& manifestPath) {
  auto bytes = read_file_bytes(manifestPath);
  Manifest manifest;
  try {
    manifest = load_manifest(std::string(bytes.begin(), bytes.end()));
  } catch (const ManifestError& e) {
    throw InputError(manifestPath.string() + ": " + e.what());
  }
  return load_workspace(manifest, manifestPath.parent_path());
}

std::vector<LayerDiff> default_reports(const RollDocument& doc, const MatchTolerance& tol) {
  std::vector<LayerDiff> reports;
  const TrackLayer* ref = nullptr;
  for (const auto& layer : doc.layers) {
    if (layer.kind != LayerKind::kMidi) continue;
    if (ref == nullptr) {
      ref = &layer;
    } else {
      reports.push_back(diff_layers(doc, ref->id, layer.id, tol));
    }
  }
  return reports;
}

}  // namespace waveroll
