#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "waveroll/export.hpp"

namespace waveroll {

namespace {

constexpr double kNoteHeightFraction = 0.9;
constexpr double kPedalOpacity = 0.15;
constexpr double kWaveOpacity = 0.6;

// Three decimals, trailing zeros trimmed: 50.000 -> "50", 12.500 -> "12.5".
std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

std::string rgb_hex(Rgba c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02X%02X%02X", c.r, c.g, c.b);
  return buf;
}

std::string opacity(Rgba c) { return num(c.a / 255.0); }

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += ch;
    }
  }
  return out;
}

std::string stroke_attrs(HighlightClass c) {
  switch (c) {
    case HighlightClass::kMatched:
      return R"( stroke="#000000" stroke-width="2")";
    case HighlightClass::kMissed:
      return R"( stroke="#000000" stroke-width="1.5" stroke-dasharray="4 2")";
    case HighlightClass::kExtra:
      return R"( stroke="#000000" stroke-width="1.5" stroke-dasharray="1 2")";
    default:
      return {};
  }
}

}  // namespace

int waveform_lane_height(const RenderOptions& opts) { return std::max(kMinRenderPx, opts.heightPx / 5); }

std::string render_svg(const RollDocument& doc, const RenderOptions& opts) {
  if (opts.widthPx < kMinRenderPx || opts.heightPx < kMinRenderPx) {
    throw std::invalid_argument("render size must be at least 16x16 pixels");
  }
  const Viewport& vp = doc.viewport;
  const double width = opts.widthPx;
  const double height = opts.heightPx;
  const double pxPerSec = width / (vp.timeEnd - vp.timeStart);
  const double rowHeight = height / (vp.pitchMax - vp.pitchMin + 1);

  const TrackLayer* audioLayer = doc.audio ? doc.find_layer(doc.audio->layerId) : nullptr;
  const bool drawWave = opts.showWaveform && doc.waveform && audioLayer != nullptr && audioLayer->visible;
  const int lane = drawWave ? waveform_lane_height(opts) : 0;
  const double total = height + lane;

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(width) + "\" height=\"" +
       num(total) + "\" viewBox=\"0 0 " + num(width) + " " + num(total) + "\">\n";
  s += "  <defs>\n    <clipPath id=\"roll-clip\"><rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" +
       num(height) + "\"/></clipPath>\n  </defs>\n";
  s += "  <rect class=\"background\" x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) +
       "\" fill=\"#FFFFFF\"/>\n";

  // Octave lines under every C row.
  s += "  <g class=\"grid\" stroke=\"#D0D0D0\" stroke-width=\"1\">\n";
  for (int p = vp.pitchMin; p <= vp.pitchMax; ++p) {
    if (p % 12 != 0) continue;
    double y = (vp.pitchMax - p + 1) * rowHeight;
    s += "    <line x1=\"0\" y1=\"" + num(y) + "\" x2=\"" + num(width) + "\" y2=\"" + num(y) + "\"/>\n";
  }
  s += "  </g>\n";

  auto to_x = [&](double t) { return std::clamp((t - vp.timeStart) * pxPerSec, 0.0, width); };

  for (const auto& layer : doc.layers) {
    if (layer.kind != LayerKind::kMidi || !layer.visible) continue;
    const std::string fill = rgb_hex(layer.color);
    s += "  <g class=\"layer\" id=\"" + escape_xml(layer.id) + "\" data-name=\"" + escape_xml(layer.name) +
         "\" clip-path=\"url(#roll-clip)\">\n";

    if (opts.showPedal && layer.sustainVisible) {
      for (const auto& p : doc.pedal(layer.id)) {
        if (!(p.startSec < vp.timeEnd && p.endSec > vp.timeStart)) continue;
        double x0 = to_x(p.startSec);
        double x1 = to_x(p.endSec);
        s += "    <rect class=\"pedal\" x=\"" + num(x0) + "\" y=\"0\" width=\"" + num(x1 - x0) + "\" height=\"" +
             num(height) + "\" fill=\"" + fill + "\" fill-opacity=\"" + num(kPedalOpacity) + "\"/>\n";
      }
    }

    const std::vector<HighlightClass>* classes = nullptr;
    if (opts.highlight) {
      auto it = opts.highlight->find(layer.id);
      if (it != opts.highlight->end()) classes = &it->second;
    }
    const auto& notes = doc.notes(layer.id);
    for (std::size_t i = 0; i < notes.size(); ++i) {
      const NoteEvent& n = notes[i];
      if (n.pitch < vp.pitchMin || n.pitch > vp.pitchMax) continue;
      if (!(n.onsetSec < vp.timeEnd && n.offsetSec > vp.timeStart)) continue;
      double x0 = to_x(n.onsetSec);
      double w = std::max(1.0, to_x(n.offsetSec) - x0);
      if (x0 + w > width) x0 = width - w;
      double y = (vp.pitchMax - n.pitch) * rowHeight;
      HighlightClass hc = classes != nullptr && i < classes->size() ? (*classes)[i] : HighlightClass::kNeutral;
      s += "    <rect class=\"note\" x=\"" + num(x0) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" +
           num(rowHeight * kNoteHeightFraction) + "\" fill=\"" + fill + "\" fill-opacity=\"" +
           opacity(layer.color) + "\"" + stroke_attrs(hc);
      if (hc != HighlightClass::kNeutral) s += " data-highlight=\"" + std::string(to_string(hc)) + "\"";
      s += "/>\n";
    }
    s += "  </g>\n";
  }

  if (drawWave) {
    const double mid = height + lane / 2.0;
    const double half = lane / 2.0;
    auto peaks = peaks_for_window(*doc.waveform, doc.waveform->sampleRate, vp.timeStart, vp.timeEnd, opts.widthPx);
    std::string points;
    for (std::size_t c = 0; c < peaks.size(); ++c) {
      if (!points.empty()) points += ' ';
      points += num(c + 0.5) + "," + num(mid - peaks[c].max * half);
    }
    for (std::size_t c = peaks.size(); c-- > 0;) {
      points += ' ' + num(c + 0.5) + "," + num(mid - peaks[c].min * half);
    }
    s += "  <g class=\"waveform\" id=\"" + escape_xml(audioLayer->id) + "\" data-name=\"" +
         escape_xml(audioLayer->name) + "\">\n";
    s += "    <rect class=\"lane\" x=\"0\" y=\"" + num(height) + "\" width=\"" + num(width) + "\" height=\"" +
         num(lane) + "\" fill=\"#F4F4F4\"/>\n";
    s += "    <polyline points=\"" + points + "\" fill=\"" + rgb_hex(audioLayer->color) + "\" fill-opacity=\"" +
         num(kWaveOpacity) + "\" stroke=\"" + rgb_hex(audioLayer->color) + "\" stroke-width=\"0.5\"/>\n";
    s += "  </g>\n";
  }

  if (opts.showPlayhead && opts.playheadSec && *opts.playheadSec >= vp.timeStart && *opts.playheadSec <= vp.timeEnd) {
    double x = to_x(*opts.playheadSec);
    s += "  <line class=\"playhead\" x1=\"" + num(x) + "\" y1=\"0\" x2=\"" + num(x) + "\" y2=\"" + num(total) +
         "\" stroke=\"#D62728\" stroke-width=\"2\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace waveroll
