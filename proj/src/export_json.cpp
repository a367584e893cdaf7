#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "waveroll/error.hpp"
#include "waveroll/export.hpp"

namespace waveroll {

using ordered_json = nlohmann::ordered_json;

std::string format_fixed6(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("cannot serialize a non-finite number");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

namespace {

bool is_scalar(const ordered_json& j) { return !j.is_object() && !j.is_array(); }

bool all_scalar(const ordered_json& j) {
  for (const auto& item : j) {
    if (!is_scalar(item)) return false;
  }
  return true;
}

void write_scalar(std::string& out, const ordered_json& j) {
  if (j.is_number_float()) {
    out += format_fixed6(j.get<double>());
  } else {
    out += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
  }
}

// Containers holding only scalars go on one line; everything else is
// expanded with two-space indentation.
void write_value(std::string& out, const ordered_json& j, int depth) {
  if (is_scalar(j)) {
    write_scalar(out, j);
    return;
  }
  const bool obj = j.is_object();
  const char open = obj ? '{' : '[';
  const char close = obj ? '}' : ']';
  if (j.empty()) {
    out += open;
    out += close;
    return;
  }
  const bool inlined = all_scalar(j);
  const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
  out += open;
  bool first = true;
  auto emit = [&](const std::string* key, const ordered_json& v) {
    if (!first) out += inlined ? ", " : ",";
    first = false;
    if (!inlined) {
      out += '\n';
      out += pad;
    }
    if (key != nullptr) {
      out += ordered_json(*key).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
      out += ": ";
    }
    write_value(out, v, depth + 1);
  };
  if (obj) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      std::string key = it.key();
      emit(&key, it.value());
    }
  } else {
    for (const auto& v : j) emit(nullptr, v);
  }
  if (!inlined) {
    out += '\n';
    out += std::string(static_cast<std::size_t>(depth) * 2, ' ');
  }
  out += close;
}

std::string dump_canonical(const ordered_json& j) {
  std::string out;
  write_value(out, j, 0);
  out += '\n';
  return out;
}

std::string color_hex(Rgba c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02X%02X%02X%02X", c.r, c.g, c.b, c.a);
  return buf;
}

Rgba parse_color(const std::string& s) {
  unsigned r, g, b, a;
  if (s.size() != 9 || s[0] != '#' || std::sscanf(s.c_str() + 1, "%2x%2x%2x%2x", &r, &g, &b, &a) != 4) {
    throw DocumentError("bad color \"" + s + "\"");
  }
  return {static_cast<uint8_t>(r), static_cast<uint8_t>(g), static_cast<uint8_t>(b), static_cast<uint8_t>(a)};
}

ordered_json tolerance_json(const MatchTolerance& t) {
  ordered_json j = ordered_json::object();
  j["onsetTolSec"] = t.onsetTolSec;
  j["requireExactPitch"] = t.requireExactPitch;
  j["offsetEnabled"] = t.offsetEnabled;
  j["offsetRatio"] = t.offsetRatio;
  j["offsetMinTolSec"] = t.offsetMinTolSec;
  return j;
}

ordered_json report_json(const LayerDiff& d) {
  const DiffReport& r = d.report;
  ordered_json j = ordered_json::object();
  j["refLayer"] = d.refLayer;
  j["estLayer"] = d.estLayer;
  j["tolerance"] = tolerance_json(r.tolerance);
  j["refCount"] = r.refCount;
  j["estCount"] = r.estCount;
  ordered_json pairs = ordered_json::array();
  for (const auto& [a, b] : r.pairs) pairs.push_back(ordered_json::array({a, b}));
  j["pairs"] = std::move(pairs);
  j["missedRef"] = r.missedRef;
  j["extraEst"] = r.extraEst;
  Metrics m = compute_metrics(r);
  ordered_json mj = ordered_json::object();
  mj["precision"] = m.precision;
  mj["recall"] = m.recall;
  mj["f1"] = m.f1;
  mj["matchedCount"] = m.matchedCount;
  mj["refCount"] = m.refCount;
  mj["estCount"] = m.estCount;
  j["metrics"] = std::move(mj);
  return j;
}

ordered_json reports_json(const std::vector<LayerDiff>& reports) {
  ordered_json arr = ordered_json::array();
  for (const auto& d : reports) arr.push_back(report_json(d));
  return arr;
}

template <typename T>
T field(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw DocumentError(std::string("document JSON is missing \"") + key + "\"");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw DocumentError(std::string("document JSON field \"") + key + "\" has the wrong type");
  }
}

const nlohmann::json& member(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw DocumentError(std::string("document JSON is missing \"") + key + "\"");
  return *it;
}

}  // namespace

std::string export_document_json(const RollDocument& doc, const std::vector<LayerDiff>& reports) {
  for (const auto& d : reports) {
    for (const auto& id : {d.refLayer, d.estLayer}) {
      if (doc.find_layer(id) == nullptr) throw DocumentError("report references unknown layer \"" + id + "\"");
    }
  }

  ordered_json root = ordered_json::object();
  root["schemaVersion"] = kDocumentSchemaVersion;

  ordered_json manifest = ordered_json::array();
  for (const auto& e : doc.manifest.entries) {
    ordered_json item = ordered_json::object();
    item["path"] = e.path;
    item["name"] = e.name;
    item["type"] = std::string(to_string(e.type));
    manifest.push_back(std::move(item));
  }
  root["manifest"] = std::move(manifest);
  root["durationSec"] = doc.durationSec;

  ordered_json vp = ordered_json::object();
  vp["timeStart"] = doc.viewport.timeStart;
  vp["timeEnd"] = doc.viewport.timeEnd;
  vp["pitchMin"] = doc.viewport.pitchMin;
  vp["pitchMax"] = doc.viewport.pitchMax;
  root["viewport"] = std::move(vp);

  ordered_json layers = ordered_json::array();
  ordered_json notes = ordered_json::object();
  ordered_json pedal = ordered_json::object();
  for (const auto& layer : doc.layers) {
    ordered_json l = ordered_json::object();
    l["id"] = layer.id;
    l["name"] = layer.name;
    l["kind"] = std::string(to_string(layer.kind));
    l["color"] = color_hex(layer.color);
    l["visible"] = layer.visible;
    l["sustainVisible"] = layer.sustainVisible;
    l["sourcePath"] = layer.sourcePath;
    layers.push_back(std::move(l));
    if (layer.kind != LayerKind::kMidi) continue;

    ordered_json ln = ordered_json::array();
    for (const auto& n : doc.notes(layer.id)) {
      ordered_json nj = ordered_json::object();
      nj["pitch"] = n.pitch;
      nj["onset"] = n.onsetSec;
      nj["offset"] = n.offsetSec;
      nj["velocity"] = n.velocity;
      nj["track"] = n.trackIndex;
      nj["channel"] = n.channel;
      ln.push_back(std::move(nj));
    }
    notes[layer.id] = std::move(ln);

    ordered_json lp = ordered_json::array();
    for (const auto& p : doc.pedal(layer.id)) {
      ordered_json pj = ordered_json::object();
      pj["start"] = p.startSec;
      pj["end"] = p.endSec;
      pj["track"] = p.trackIndex;
      pj["channel"] = p.channel;
      lp.push_back(std::move(pj));
    }
    pedal[layer.id] = std::move(lp);
  }
  root["layers"] = std::move(layers);
  root["notes"] = std::move(notes);
  root["pedal"] = std::move(pedal);

  if (doc.audio) {
    ordered_json a = ordered_json::object();
    a["layer"] = doc.audio->layerId;
    a["sampleRate"] = doc.audio->sampleRate;
    a["sampleCount"] = doc.audio->sampleCount;
    a["durationSec"] = doc.audio->durationSec;
    root["audio"] = std::move(a);
  } else {
    root["audio"] = nullptr;
  }
  root["reports"] = reports_json(reports);
  return dump_canonical(root);
}

std::string export_reports_json(const std::vector<LayerDiff>& reports) {
  ordered_json root = ordered_json::object();
  root["schemaVersion"] = kDocumentSchemaVersion;
  root["reports"] = reports_json(reports);
  return dump_canonical(root);
}

DocumentBundle import_document_json(std::string_view text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DocumentError(std::string("document is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw DocumentError("document JSON must be an object");
  if (field<int>(root, "schemaVersion") != kDocumentSchemaVersion) {
    throw DocumentError("unsupported document schema version");
  }

  DocumentBundle out;
  RollDocument& doc = out.doc;
  for (const auto& e : member(root, "manifest")) {
    auto kind = parse_layer_kind(field<std::string>(e, "type"));
    if (!kind) throw DocumentError("unknown manifest type");
    doc.manifest.entries.push_back({field<std::string>(e, "path"), field<std::string>(e, "name"), *kind});
  }
  doc.durationSec = field<double>(root, "durationSec");
  const auto& vp = member(root, "viewport");
  doc.viewport = {field<double>(vp, "timeStart"), field<double>(vp, "timeEnd"), field<int>(vp, "pitchMin"),
                  field<int>(vp, "pitchMax")};

  const auto& notes = member(root, "notes");
  const auto& pedal = member(root, "pedal");
  for (const auto& l : member(root, "layers")) {
    TrackLayer layer;
    layer.id = field<std::string>(l, "id");
    layer.name = field<std::string>(l, "name");
    auto kind = parse_layer_kind(field<std::string>(l, "kind"));
    if (!kind) throw DocumentError("unknown layer kind");
    layer.kind = *kind;
    layer.color = parse_color(field<std::string>(l, "color"));
    layer.visible = field<bool>(l, "visible");
    layer.sustainVisible = field<bool>(l, "sustainVisible");
    layer.sourcePath = field<std::string>(l, "sourcePath");
    if (doc.find_layer(layer.id) != nullptr) throw DocumentError("duplicate layer id " + layer.id);

    if (layer.kind == LayerKind::kMidi) {
      auto& ln = doc.notesByLayer[layer.id];
      if (auto it = notes.find(layer.id); it != notes.end()) {
        for (const auto& n : *it) {
          ln.push_back({field<int>(n, "pitch"), field<double>(n, "onset"), field<double>(n, "offset"),
                        field<int>(n, "velocity"), field<int>(n, "track"), field<int>(n, "channel")});
        }
      }
      auto& lp = doc.pedalByLayer[layer.id];
      if (auto it = pedal.find(layer.id); it != pedal.end()) {
        for (const auto& p : *it) {
          lp.push_back({field<double>(p, "start"), field<double>(p, "end"), field<int>(p, "track"),
                        field<int>(p, "channel")});
        }
      }
    }
    doc.layers.push_back(std::move(layer));
  }

  const auto& audio = member(root, "audio");
  if (!audio.is_null()) {
    doc.audio = AudioTrack{field<std::string>(audio, "layer"), field<int>(audio, "sampleRate"),
                           field<std::size_t>(audio, "sampleCount"), field<double>(audio, "durationSec")};
  }

  for (const auto& r : member(root, "reports")) {
    LayerDiff d;
    d.refLayer = field<std::string>(r, "refLayer");
    d.estLayer = field<std::string>(r, "estLayer");
    const auto& t = member(r, "tolerance");
    d.report.tolerance = {field<double>(t, "onsetTolSec"), field<bool>(t, "requireExactPitch"),
                          field<bool>(t, "offsetEnabled"), field<double>(t, "offsetRatio"),
                          field<double>(t, "offsetMinTolSec")};
    d.report.refCount = field<std::size_t>(r, "refCount");
    d.report.estCount = field<std::size_t>(r, "estCount");
    for (const auto& p : member(r, "pairs")) {
      if (!p.is_array() || p.size() != 2) throw DocumentError("report pair must have two indices");
      d.report.pairs.emplace_back(p[0].get<std::size_t>(), p[1].get<std::size_t>());
    }
    d.report.missedRef = field<std::vector<std::size_t>>(r, "missedRef");
    d.report.extraEst = field<std::vector<std::size_t>>(r, "extraEst");
    for (const auto& id : {d.refLayer, d.estLayer}) {
      if (doc.find_layer(id) == nullptr) throw DocumentError("report references unknown layer \"" + id + "\"");
    }
    out.reports.push_back(std::move(d));
  }
  return out;
}

std::string export_peaks_json(const PeakPyramid& pyr, int channelCount) {
  ordered_json root = ordered_json::object();
  root["sampleRate"] = pyr.sampleRate;
  root["sampleCount"] = pyr.sampleCount;
  root["channelCount"] = channelCount;
  root["durationSec"] = pyr.sampleRate > 0 ? static_cast<double>(pyr.sampleCount) / pyr.sampleRate : 0.0;
  ordered_json levels = ordered_json::array();
  for (const auto& level : pyr.levels) {
    ordered_json l = ordered_json::object();
    l["bucketSize"] = level.bucketSize;
    ordered_json mins = ordered_json::array();
    ordered_json maxs = ordered_json::array();
    for (const auto& b : level.buckets) {
      mins.push_back(static_cast<double>(b.min));
      maxs.push_back(static_cast<double>(b.max));
    }
    l["min"] = std::move(mins);
    l["max"] = std::move(maxs);
    levels.push_back(std::move(l));
  }
  root["levels"] = std::move(levels);
  return dump_canonical(root);
}

}  // namespace waveroll
