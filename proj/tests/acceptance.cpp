// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. `--update-goldens` rewrites tests/golden from the current build.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <iostream>
#include <sstream>
#include <string>

#include "support/test_support.hpp"
#include "waveroll/cli.hpp"
#include "waveroll/export.hpp"
#include "waveroll/smf.hpp"
#include "waveroll/timebase.hpp"
#include "waveroll/transport.hpp"
#include "waveroll/wav.hpp"
#include "waveroll/workspace.hpp"

using namespace waveroll;
namespace fs = std::filesystem;

namespace {

// Collects the first few failure messages of one criterion.
struct Outcome {
  std::vector<std::string> failures;
  std::size_t checks = 0;

  void expect(bool ok, const std::function<std::string()>& what) {
    ++checks;
    if (!ok && failures.size() < 5) failures.push_back(what());
  }
};

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<NoteEvent> random_notes(std::mt19937& rng, int count) {
  std::uniform_real_distribution<double> onset(0.0, 2.0), len(0.01, 1.0);
  std::vector<NoteEvent> out;
  for (int i = 0; i < count; ++i) {
    double on = onset(rng);
    out.push_back({60 + static_cast<int>(rng() % 3), on, on + len(rng), 80, 0, 0});
  }
  return out;
}

Outcome matching_oracle() {
  Outcome o;
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto start = std::chrono::steady_clock::now();
  for (int trial = 0; trial < 200; ++trial) {
    auto ref = random_notes(rng, static_cast<int>(rng() % 11));
    auto est = random_notes(rng, static_cast<int>(rng() % 11));
    MatchTolerance t;
    t.onsetTolSec = 0.001 + 0.3 * u(rng);
    t.requireExactPitch = rng() % 4 != 0;
    t.offsetEnabled = rng() % 2 == 0;
    t.offsetRatio = 0.5 * u(rng);
    t.offsetMinTolSec = 0.2 * u(rng);

    HitMatrix hits = candidate_hits(ref, est, t);
    std::vector<std::pair<std::size_t, std::size_t>> raw;
    for (const auto& h : hits.hits) raw.push_back(h);
    std::size_t exhaustive = testing::brute_force_max_matching(ref.size(), est.size(), raw);
    DiffReport r = classify_diff(ref, est, t);
    o.expect(r.pairs.size() == exhaustive, [&] {
      return "trial " + std::to_string(trial) + ": matched " + std::to_string(r.pairs.size()) + ", exhaustive " +
             std::to_string(exhaustive);
    });

    std::vector<int> refSeen(ref.size()), estSeen(est.size());
    bool pairsAreHits = true;
    for (const auto& p : r.pairs) {
      ++refSeen[p.first];
      ++estSeen[p.second];
      pairsAreHits &= std::binary_search(hits.hits.begin(), hits.hits.end(), p);
    }
    for (auto i : r.missedRef) ++refSeen[i];
    for (auto i : r.extraEst) ++estSeen[i];
    bool partition = std::all_of(refSeen.begin(), refSeen.end(), [](int c) { return c == 1; }) &&
                     std::all_of(estSeen.begin(), estSeen.end(), [](int c) { return c == 1; }) &&
                     std::is_sorted(r.missedRef.begin(), r.missedRef.end()) &&
                     std::is_sorted(r.extraEst.begin(), r.extraEst.end());
    o.expect(partition && pairsAreHits, [&] { return "trial " + std::to_string(trial) + ": partition broken"; });
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.expect(secs < 10.0, [&] { return fmt("took %.2f s", secs); });
  return o;
}

Outcome self_comparison() {
  Outcome o;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(testing::fixture_dir())) {
    if (e.is_regular_file() && e.path().extension() == ".mid") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  o.expect(!files.empty(), [] { return std::string("no MIDI fixtures found"); });
  for (const auto& f : files) {
    CliRun r = cli({"compare", f.string(), f.string()});
    bool ok = r.code == kExitOk && r.out.find("P=1.000 R=1.000 F1=1.000") != std::string::npos &&
              r.out.find("missed=0 extra=0") != std::string::npos;
    o.expect(ok, [&] { return f.filename().string() + ": " + r.out + r.err; });
  }
  return o;
}

Outcome fixture_f_end_to_end() {
  Outcome o;
  CliRun r = cli({"compare", (testing::fixture_dir() / "fixture_f_ref.mid").string(),
                  (testing::fixture_dir() / "fixture_f_est.mid").string()});
  o.expect(r.code == kExitOk, [&] { return "exit " + std::to_string(r.code) + ": " + r.err; });
  double p = -1, rc = -1, f1 = -1;
  int matched = -1, missed = -1, extra = -1;
  auto line = r.out.find("P=");
  if (line != std::string::npos) {
    std::sscanf(r.out.c_str() + line, "P=%lf R=%lf F1=%lf matched=%d missed=%d extra=%d", &p, &rc, &f1, &matched,
                &missed, &extra);
  }
  // Independent arithmetic: 2 matches of 3 reference and 4 estimate notes.
  const double wantP = 2.0 / 4.0, wantR = 2.0 / 3.0, wantF = 2 * wantP * wantR / (wantP + wantR);
  o.expect(std::abs(p - 0.500) <= 0.001 && std::abs(p - wantP) <= 0.001, [&] { return fmt("P=%.4f", p); });
  o.expect(std::abs(rc - 0.667) <= 0.001 && std::abs(rc - wantR) <= 0.001, [&] { return fmt("R=%.4f", rc); });
  o.expect(std::abs(f1 - 0.571) <= 0.001 && std::abs(f1 - wantF) <= 0.001, [&] { return fmt("F1=%.4f", f1); });
  o.expect(missed == 1 && extra == 2, [&] { return fmt("missed=%g extra=%g", missed, static_cast<double>(extra)); });
  return o;
}

Outcome vlq_round_trip() {
  Outcome o;
  std::vector<uint32_t> values{0, 127, 128, 16383, 16384, 268435455};
  std::mt19937 rng(99);
  for (int i = 0; i < 10000; ++i) values.push_back(rng() % kVlqLimit);
  for (uint32_t v : values) {
    auto bytes = encode_vlq(v);
    VlqResult d = decode_vlq(bytes);
    o.expect(d.value == v && d.consumed == bytes.size(), [&] { return "value " + std::to_string(v); });
  }
  return o;
}

Outcome tempo_conversion() {
  Outcome o;
  struct Case {
    int ppq;
    std::vector<std::pair<uint64_t, uint32_t>> changes;
    uint64_t tick;
    double seconds;
  };
  // Worked by hand: segment lengths in beats times seconds per beat.
  const std::vector<Case> cases{
      {480, {{0, 500000}, {960, 250000}}, 1440, 1.25},  // 2 beats at 0.5 s + 1 beat at 0.25 s
      {480, {{0, 500000}}, 480, 0.5},
      {96, {{0, 1000000}, {96, 500000}, {192, 2000000}}, 240, 1.0 + 0.5 + 1.0},
      {1000, {{0, 600000}, {500, 300000}}, 2500, 0.3 + 0.6},
      {480, {{0, 500000}, {960, 250000}}, 960, 1.0},
  };
  for (const auto& c : cases) {
    TempoMap map(c.ppq, c.changes);
    double got = map.ticks_to_seconds(c.tick);
    o.expect(std::abs(got - c.seconds) <= 1e-9, [&] { return fmt("got %.12f want %.12f", got, c.seconds); });
  }

  std::mt19937 rng(5);
  for (int m = 0; m < 100; ++m) {
    int ppq = 24 + static_cast<int>(rng() % 960);
    std::vector<std::pair<uint64_t, uint32_t>> changes{{0, 200000 + rng() % 1800000}};
    int n = static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) changes.emplace_back(changes.back().first + 1 + rng() % 5000, 1 + rng() % 3000000);
    TempoMap map(ppq, changes);
    double prev = -1.0;
    bool monotone = true;
    for (uint64_t t = 0; t < changes.back().first + 5000; t += 1 + rng() % 97) {
      double s = map.ticks_to_seconds(t);
      monotone &= s > prev;
      prev = s;
    }
    o.expect(monotone, [&] { return "map " + std::to_string(m) + " not strictly increasing"; });
    uint64_t probe = rng() % (changes.back().first + 2000);
    double oracle = testing::naive_seconds(ppq, changes, probe);
    o.expect(std::abs(map.ticks_to_seconds(probe) - oracle) <= 1e-9 * std::max(1.0, oracle),
             [&] { return "map " + std::to_string(m) + " disagrees with accumulation"; });
  }
  return o;
}

RollDocument random_document(std::mt19937& rng) {
  std::uniform_real_distribution<double> onset(0.0, 8.0), len(0.01, 2.0);
  Manifest m{{{"a.mid", "a", LayerKind::kMidi}, {"b.mid", "b", LayerKind::kMidi}}};
  std::vector<ParsedSource> src;
  for (int l = 0; l < 2; ++l) {
    MidiSource s;
    for (int i = 0; i < 30; ++i) {
      double on = onset(rng);
      s.notes.push_back({40 + static_cast<int>(rng() % 40), on, on + len(rng), 70, 0, 0});
    }
    src.emplace_back(std::move(s));
  }
  return build_document(m, std::move(src));
}

Outcome transport_properties() {
  Outcome o;
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    double duration = 1.0 + 30.0 * u(rng);
    double a = 0.9 * duration * u(rng);
    double b = a + (duration - a) * (0.001 + 0.999 * u(rng));
    TransportState s = set_loop(make_transport(duration), a, b, 0.0);
    s = play(seek(s, a + (b - a) * u(rng), 0.0), 0.0);
    double elapsed = 500.0 * u(rng);
    double t = current_time(s, elapsed);
    o.expect(t >= a && t < b, [&] { return fmt("t=%.9f outside loop starting %.9f", t, a); });
  }

  for (int d = 0; d < 20; ++d) {
    RollDocument doc = random_document(rng);
    TransportState s = make_transport(doc.durationSec);
    double t0 = doc.durationSec * u(rng), t1 = t0 + 0.5 + 3.0 * u(rng);
    double mid = t0 + (t1 - t0) * u(rng);
    auto whole = events_in(doc, s, {}, t0, t1);
    auto left = mid > t0 ? events_in(doc, s, {}, t0, mid) : std::vector<ScheduledEvent>{};
    auto right = events_in(doc, s, {}, mid, t1);
    left.insert(left.end(), right.begin(), right.end());
    o.expect(left == whole, [&] { return "window concatenation differs for document " + std::to_string(d); });

    // A sweep tiling [0, past the end) sees every note start and finish.
    std::vector<ScheduledEvent> sweep;
    double step = 0.05 + u(rng);
    for (double w = 0.0; w <= doc.durationSec; w += step) {
      auto part = events_in(doc, s, {}, w, w + step);
      sweep.insert(sweep.end(), part.begin(), part.end());
    }
    std::map<std::pair<std::string, int>, int> depth;
    bool balanced = true;
    std::size_t ons = 0;
    for (const auto& e : sweep) {
      if (const auto* on = std::get_if<NoteOnEvt>(&e.kind)) {
        ++depth[{on->layerId, on->pitch}];
        ++ons;
      } else {
        const auto& off = std::get<NoteOffEvt>(e.kind);
        balanced &= --depth[{off.layerId, off.pitch}] >= 0;
      }
    }
    for (const auto& [k, v] : depth) balanced &= v == 0;
    o.expect(balanced && ons == 60, [&] { return "unbalanced sweep for document " + std::to_string(d); });
  }
  return o;
}

// The three golden documents and how each is rendered.
struct GoldenDoc {
  std::string stem;
  fs::path manifest;
};

std::vector<GoldenDoc> golden_docs() {
  return {{"empty", testing::fixture_dir() / "empty.json"},
          {"fixture_f", testing::fixture_dir() / "fixture_f.json"},
          {"session", testing::fixture_dir() / "session" / "manifest.json"}};
}

std::pair<std::string, std::string> golden_outputs(const GoldenDoc& g) {
  Workspace ws = load_workspace(g.manifest);
  auto reports = default_reports(ws.doc, {});
  RenderOptions opts;
  opts.widthPx = 960;
  opts.heightPx = 480;
  opts.showPlayhead = true;
  opts.playheadSec = 1.0;
  if (!reports.empty()) opts.highlight = highlight_assignment(ws.doc, reports.front(), HighlightMode::kFull);
  return {export_document_json(ws.doc, reports), render_svg(ws.doc, opts)};
}

Outcome determinism_goldens() {
  Outcome o;
  for (const auto& g : golden_docs()) {
    auto first = golden_outputs(g);
    auto second = golden_outputs(g);
    o.expect(first == second, [&] { return g.stem + ": two runs differ"; });
    auto jsonPath = testing::golden_dir() / (g.stem + ".json");
    auto svgPath = testing::golden_dir() / (g.stem + ".svg");
    o.expect(fs::exists(jsonPath) && testing::read_text(jsonPath) == first.first,
             [&] { return jsonPath.filename().string() + " differs from golden"; });
    o.expect(fs::exists(svgPath) && testing::read_text(svgPath) == first.second,
             [&] { return svgPath.filename().string() + " differs from golden"; });
  }
  return o;
}

Outcome wav_properties() {
  Outcome o;
  std::mt19937 rng(41);
  for (int channels = 1; channels <= 2; ++channels) {
    std::vector<std::vector<int16_t>> pcm(static_cast<std::size_t>(channels), std::vector<int16_t>(3001));
    for (auto& ch : pcm) {
      for (auto& v : ch) v = static_cast<int16_t>(static_cast<int>(rng() % 65536) - 32768);
      ch[0] = -32768;
      ch[1] = 32767;
    }
    PcmAudio audio = parse_wav(testing::wav_file(channels, 22050, 1, testing::pcm16_payload(pcm), true));
    bool exact = audio.sampleRate == 22050 && audio.channel_count() == channels && audio.frame_count() == 3001;
    for (std::size_t c = 0; exact && c < pcm.size(); ++c) {
      for (std::size_t i = 0; i < pcm[c].size(); ++i) {
        exact &= audio.channels[c][i] * 32768.0f == static_cast<float>(pcm[c][i]);
      }
    }
    o.expect(exact, [&] { return std::to_string(channels) + "-channel PCM16 round trip inexact"; });
  }

  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  for (int sig = 0; sig < 50; ++sig) {
    std::vector<float> s(1000 + rng() % 60000);
    float scale = u(rng);
    for (auto& v : s) v = scale * u(rng);
    const int rate = 8000 + static_cast<int>(rng() % 40000);
    PeakPyramid pyr = build_peaks(s, rate);
    double dur = static_cast<double>(s.size()) / rate;
    std::uniform_real_distribution<double> pos(0.0, dur);
    double t0 = pos(rng), t1 = pos(rng);
    if (t1 < t0) std::swap(t0, t1);
    if (t1 - t0 < 1e-3) t1 = t0 + 1e-3;
    int columns = 1 + static_cast<int>(rng() % 300);
    auto cols = peaks_for_window(pyr, rate, t0, t1, columns);
    bool contained = cols.size() == static_cast<std::size_t>(columns);
    for (int c = 0; contained && c < columns; ++c) {
      double a = (t0 + (t1 - t0) * c / columns) * rate;
      double b = (t0 + (t1 - t0) * (c + 1) / columns) * rate;
      auto from = std::min(s.size(), static_cast<std::size_t>(std::floor(a)));
      auto to = std::min(s.size(), static_cast<std::size_t>(std::ceil(b)));
      for (std::size_t i = from; i < to; ++i) {
        contained &= cols[static_cast<std::size_t>(c)].min <= s[i] && s[i] <= cols[static_cast<std::size_t>(c)].max;
      }
    }
    o.expect(contained, [&] { return "signal " + std::to_string(sig) + " escapes its peaks"; });
  }
  return o;
}

int update_goldens() {
  fs::create_directories(testing::golden_dir());
  for (const auto& g : golden_docs()) {
    auto [json, svg] = golden_outputs(g);
    std::ofstream(testing::golden_dir() / (g.stem + ".json"), std::ios::binary) << json;
    std::ofstream(testing::golden_dir() / (g.stem + ".svg"), std::ios::binary) << svg;
    std::cout << "wrote " << g.stem << ".json, " << g.stem << ".svg\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::string(argv[1]) == "--update-goldens") return update_goldens();

  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"matching oracle equivalence (200 random instances)", matching_oracle},
      {"self-comparison identity on every MIDI fixture", self_comparison},
      {"fixture F end-to-end through the CLI", fixture_f_end_to_end},
      {"VLQ round trip", vlq_round_trip},
      {"tempo conversion and monotonicity", tempo_conversion},
      {"transport loop, window concatenation and balanced sweeps", transport_properties},
      {"determinism goldens for render and export", determinism_goldens},
      {"WAV PCM16 round trip and peaks containment", wav_properties},
  };

  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.failures.push_back(std::string("threw: ") + e.what());
    }
    if (o.failures.empty()) {
      std::cout << "PASS  " << name << " (" << o.checks << " checks)\n";
    } else {
      ++failed;
      std::cout << "FAIL  " << name << "\n";
      for (const auto& f : o.failures) std::cout << "        " << f << "\n";
    }
  }

  double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool fast = total < 60.0;
  failed += fast ? 0 : 1;
  std::cout << (fast ? "PASS  " : "FAIL  ") << "full primary suite under 60 s (" << fmt("%.2f s", total) << ")\n";
  std::cout << (failed == 0 ? "all acceptance criteria passed\n" : std::to_string(failed) + " criteria failed\n");
  return failed == 0 ? 0 : 1;
}
