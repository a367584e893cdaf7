#pragma once

// Note-level comparison of an estimate track against a reference track:
// tolerance-based candidate pairs, maximum bipartite matching, diff
// classification, precision/recall/F1 and highlight classes.

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "waveroll/notes.hpp"
#include "waveroll/roll.hpp"

namespace waveroll {

struct MatchTolerance {
  double onsetTolSec = 0.05;
  bool requireExactPitch = true;
  bool offsetEnabled = false;
  double offsetRatio = 0.2;
  double offsetMinTolSec = 0.05;
  bool operator==(const MatchTolerance&) const = default;
};

// Throws std::invalid_argument when a field is out of range.
void validate(const MatchTolerance& tol);

// Distances are rounded to 7 decimals before the inclusive comparison, so
// values that are equal in exact arithmetic but differ in the last bits still match.
bool within_tolerance(double distance, double tolerance);

using IndexPair = std::pair<std::size_t, std::size_t>;

struct HitMatrix {
  std::size_t refCount = 0;
  std::size_t estCount = 0;
  std::vector<IndexPair> hits;  // sorted, unique
};

HitMatrix candidate_hits(const std::vector<NoteEvent>& ref, const std::vector<NoteEvent>& est,
                         const MatchTolerance& tol);

/// Maximum-cardinality matching by augmenting paths. References are
/// processed in index order and each tries estimates in index order, so the
/// result is deterministic. Pairs are returned sorted by reference index.
std::vector<IndexPair> max_bipartite_match(const HitMatrix& hits);

struct DiffReport {
  std::vector<IndexPair> pairs;
  std::vector<std::size_t> missedRef;
  std::vector<std::size_t> extraEst;
  MatchTolerance tolerance;
  std::size_t refCount = 0;
  std::size_t estCount = 0;
  bool operator==(const DiffReport&) const = default;
};

DiffReport classify_diff(const std::vector<NoteEvent>& ref, const std::vector<NoteEvent>& est,
                         const MatchTolerance& tol = {});

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t matchedCount = 0;
  std::size_t refCount = 0;
  std::size_t estCount = 0;
  bool operator==(const Metrics&) const = default;
};

// Two empty tracks agree perfectly and score 1; otherwise an empty
// denominator scores 0.
Metrics compute_metrics(const DiffReport& report);

// A report between two layers of one document.
struct LayerDiff {
  std::string refLayer;
  std::string estLayer;
  DiffReport report;
  bool operator==(const LayerDiff&) const = default;
};

LayerDiff diff_layers(const RollDocument& doc, std::string_view refLayer, std::string_view estLayer,
                      const MatchTolerance& tol = {});

enum class HighlightClass { kNeutral, kMatched, kMissed, kExtra };
enum class HighlightMode { kOff, kEmphasizeMatched, kEmphasizeDifferences, kFull };

std::string_view to_string(HighlightClass c);
std::string_view to_string(HighlightMode m);
std::optional<HighlightMode> parse_highlight_mode(std::string_view text);

// layer id -> one class per note, parallel to RollDocument::notes(layer).
using HighlightMap = std::unordered_map<std::string, std::vector<HighlightClass>>;

/// Every midi layer gets an entry; layers outside the report stay Neutral.
/// Throws DocumentError when the report's layers are missing from `doc` or
/// its counts do not match their notes.
HighlightMap highlight_assignment(const RollDocument& doc, const LayerDiff& diff, HighlightMode mode);

}  // namespace waveroll
