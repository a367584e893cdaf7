#pragma once

// Canonical DocumentJson (schema v1), peaks JSON and static SVG rendering.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "waveroll/match.hpp"
#include "waveroll/roll.hpp"
#include "waveroll/wav.hpp"

namespace waveroll {

inline constexpr int kDocumentSchemaVersion = 1;

// "%.6f" with negative zero folded to zero.
std::string format_fixed6(double v);

/// Key order is fixed by the schema, floats carry exactly six decimals, so
/// equal inputs always produce identical bytes. Throws DocumentError when a
/// report names a layer the document lacks.
std::string export_document_json(const RollDocument& doc, const std::vector<LayerDiff>& reports);

// Only the "reports" member, as printed by `compare --json`.
std::string export_reports_json(const std::vector<LayerDiff>& reports);

struct DocumentBundle {
  RollDocument doc;
  std::vector<LayerDiff> reports;
};

// Inverse of export_document_json. The waveform pyramid is not part of the
// document and is left empty. Throws DocumentError.
DocumentBundle import_document_json(std::string_view text);

std::string export_peaks_json(const PeakPyramid& pyr, int channelCount);

struct RenderOptions {
  int widthPx = 1200;
  int heightPx = 600;
  bool showWaveform = true;
  bool showPedal = true;
  bool showPlayhead = false;
  std::optional<double> playheadSec;
  std::optional<HighlightMap> highlight;
};

inline constexpr int kMinRenderPx = 16;

// Height of the waveform band drawn under the roll when a waveform is shown.
int waveform_lane_height(const RenderOptions& opts);

/// Deterministic SVG 1.1 rendering of the visible layers within the
/// document viewport. Throws std::invalid_argument for sizes under 16 px.
std::string render_svg(const RollDocument& doc, const RenderOptions& opts);

}  // namespace waveroll
