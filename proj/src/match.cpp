#include "waveroll/match.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "waveroll/error.hpp"

namespace waveroll {

namespace {

constexpr double kDistanceScale = 1e7;
constexpr std::size_t kUnmatched = std::numeric_limits<std::size_t>::max();

bool offsets_agree(const NoteEvent& r, const NoteEvent& e, const MatchTolerance& tol) {
  double allowed = std::max(tol.offsetMinTolSec, tol.offsetRatio * (r.offsetSec - r.onsetSec));
  return within_tolerance(std::abs(r.offsetSec - e.offsetSec), allowed);
}

}  // namespace

void validate(const MatchTolerance& tol) {
  if (!(tol.onsetTolSec > 0.0) || !std::isfinite(tol.onsetTolSec)) {
    throw std::invalid_argument("onset tolerance must be a positive number of seconds");
  }
  if (!(tol.offsetRatio >= 0.0) || !std::isfinite(tol.offsetRatio)) {
    throw std::invalid_argument("offset ratio must be non-negative");
  }
  if (!(tol.offsetMinTolSec >= 0.0) || !std::isfinite(tol.offsetMinTolSec)) {
    throw std::invalid_argument("minimum offset tolerance must be non-negative");
  }
}

bool within_tolerance(double distance, double tolerance) {
  return std::round(distance * kDistanceScale) / kDistanceScale <= tolerance;
}

HitMatrix candidate_hits(const std::vector<NoteEvent>& ref, const std::vector<NoteEvent>& est,
                         const MatchTolerance& tol) {
  validate(tol);
  HitMatrix m{ref.size(), est.size(), {}};

  std::vector<std::size_t> byOnset(est.size());
  std::iota(byOnset.begin(), byOnset.end(), std::size_t{0});
  std::stable_sort(byOnset.begin(), byOnset.end(),
                   [&](std::size_t a, std::size_t b) { return est[a].onsetSec < est[b].onsetSec; });

  // Slightly wider than the tolerance; within_tolerance makes the final call.
  const double reach = tol.onsetTolSec + 1.0 / kDistanceScale;
  for (std::size_t r = 0; r < ref.size(); ++r) {
    const NoteEvent& rn = ref[r];
    auto lo = std::lower_bound(byOnset.begin(), byOnset.end(), rn.onsetSec - reach,
                               [&](std::size_t e, double t) { return est[e].onsetSec < t; });
    for (auto it = lo; it != byOnset.end() && est[*it].onsetSec <= rn.onsetSec + reach; ++it) {
      const NoteEvent& en = est[*it];
      if (!within_tolerance(std::abs(rn.onsetSec - en.onsetSec), tol.onsetTolSec)) continue;
      if (tol.requireExactPitch && rn.pitch != en.pitch) continue;
      if (tol.offsetEnabled && !offsets_agree(rn, en, tol)) continue;
      m.hits.emplace_back(r, *it);
    }
  }
  std::sort(m.hits.begin(), m.hits.end());
  return m;
}

std::vector<IndexPair> max_bipartite_match(const HitMatrix& hits) {
  std::vector<std::vector<std::size_t>> adj(hits.refCount);
  for (const auto& [r, e] : hits.hits) {
    if (r >= hits.refCount || e >= hits.estCount) throw std::out_of_range("hit index out of range");
    adj[r].push_back(e);
  }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }

  std::vector<std::size_t> refOfEst(hits.estCount, kUnmatched);
  std::vector<std::size_t> seenStamp(hits.estCount, kUnmatched);

  std::function<bool(std::size_t, std::size_t)> augment = [&](std::size_t r, std::size_t stamp) {
    for (std::size_t e : adj[r]) {
      if (seenStamp[e] == stamp) continue;
      seenStamp[e] = stamp;
      if (refOfEst[e] == kUnmatched || augment(refOfEst[e], stamp)) {
        refOfEst[e] = r;
        return true;
      }
    }
    return false;
  };
  for (std::size_t r = 0; r < hits.refCount; ++r) {
    if (!adj[r].empty()) augment(r, r);
  }

  std::vector<IndexPair> pairs;
  for (std::size_t e = 0; e < hits.estCount; ++e) {
    if (refOfEst[e] != kUnmatched) pairs.emplace_back(refOfEst[e], e);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

DiffReport classify_diff(const std::vector<NoteEvent>& ref, const std::vector<NoteEvent>& est,
                         const MatchTolerance& tol) {
  DiffReport report;
  report.tolerance = tol;
  report.refCount = ref.size();
  report.estCount = est.size();
  report.pairs = max_bipartite_match(candidate_hits(ref, est, tol));

  std::vector<bool> refUsed(ref.size()), estUsed(est.size());
  for (const auto& [r, e] : report.pairs) {
    refUsed[r] = true;
    estUsed[e] = true;
  }
  for (std::size_t r = 0; r < ref.size(); ++r) {
    if (!refUsed[r]) report.missedRef.push_back(r);
  }
  for (std::size_t e = 0; e < est.size(); ++e) {
    if (!estUsed[e]) report.extraEst.push_back(e);
  }
  return report;
}

Metrics compute_metrics(const DiffReport& report) {
  Metrics m;
  m.matchedCount = report.pairs.size();
  m.refCount = report.refCount;
  m.estCount = report.estCount;
  if (m.refCount == 0 && m.estCount == 0) {
    m.precision = m.recall = m.f1 = 1.0;
    return m;
  }
  m.precision = m.estCount == 0 ? 0.0 : static_cast<double>(m.matchedCount) / static_cast<double>(m.estCount);
  m.recall = m.refCount == 0 ? 0.0 : static_cast<double>(m.matchedCount) / static_cast<double>(m.refCount);
  double sum = m.precision + m.recall;
  m.f1 = sum == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / sum;
  return m;
}

LayerDiff diff_layers(const RollDocument& doc, std::string_view refLayer, std::string_view estLayer,
                      const MatchTolerance& tol) {
  for (auto id : {refLayer, estLayer}) {
    const TrackLayer* layer = doc.find_layer(id);
    if (layer == nullptr) throw DocumentError("unknown layer id \"" + std::string(id) + "\"");
    if (layer->kind != LayerKind::kMidi) throw DocumentError("layer \"" + std::string(id) + "\" is not midi");
  }
  return {std::string(refLayer), std::string(estLayer),
          classify_diff(doc.notes(refLayer), doc.notes(estLayer), tol)};
}

std::string_view to_string(HighlightClass c) {
  switch (c) {
    case HighlightClass::kMatched:
      return "matched";
    case HighlightClass::kMissed:
      return "missed";
    case HighlightClass::kExtra:
      return "extra";
    default:
      return "neutral";
  }
}

std::string_view to_string(HighlightMode m) {
  switch (m) {
    case HighlightMode::kEmphasizeMatched:
      return "matched";
    case HighlightMode::kEmphasizeDifferences:
      return "differences";
    case HighlightMode::kFull:
      return "full";
    default:
      return "off";
  }
}

std::optional<HighlightMode> parse_highlight_mode(std::string_view text) {
  for (auto m : {HighlightMode::kOff, HighlightMode::kEmphasizeMatched, HighlightMode::kEmphasizeDifferences,
                 HighlightMode::kFull}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

HighlightMap highlight_assignment(const RollDocument& doc, const LayerDiff& diff, HighlightMode mode) {
  for (const auto& id : {diff.refLayer, diff.estLayer}) {
    if (doc.find_layer(id) == nullptr) throw DocumentError("layer \"" + id + "\" is not in the document");
  }
  if (doc.notes(diff.refLayer).size() != diff.report.refCount ||
      doc.notes(diff.estLayer).size() != diff.report.estCount) {
    throw DocumentError("diff report does not match the notes of layers " + diff.refLayer + "/" + diff.estLayer);
  }

  HighlightMap map;
  for (const auto& layer : doc.layers) {
    if (layer.kind == LayerKind::kMidi) {
      map[layer.id].assign(doc.notes(layer.id).size(), HighlightClass::kNeutral);
    }
  }
  bool showMatched = mode == HighlightMode::kEmphasizeMatched || mode == HighlightMode::kFull;
  bool showDiffs = mode == HighlightMode::kEmphasizeDifferences || mode == HighlightMode::kFull;

  auto& ref = map[diff.refLayer];
  auto& est = map[diff.estLayer];
  if (showMatched) {
    for (const auto& [r, e] : diff.report.pairs) {
      ref[r] = HighlightClass::kMatched;
      est[e] = HighlightClass::kMatched;
    }
  }
  if (showDiffs) {
    for (auto r : diff.report.missedRef) ref[r] = HighlightClass::kMissed;
    for (auto e : diff.report.extraEst) est[e] = HighlightClass::kExtra;
  }
  return map;
}

}  // namespace waveroll
