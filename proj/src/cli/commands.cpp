#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "waveroll/cli.hpp"
#include "waveroll/export.hpp"
#include "waveroll/serve.hpp"
#include "waveroll/workspace.hpp"

namespace waveroll {

namespace {

struct ToleranceFlags {
  double onsetTol = MatchTolerance{}.onsetTolSec;
  bool offsets = false;
  double offsetRatio = MatchTolerance{}.offsetRatio;
  double offsetMinTol = MatchTolerance{}.offsetMinTolSec;

  void attach(CLI::App* cmd) {
    cmd->add_option("--onset-tol", onsetTol, "Onset tolerance in seconds")->capture_default_str();
    cmd->add_flag("--offsets", offsets, "Also require offsets to agree");
    cmd->add_option("--offset-ratio", offsetRatio, "Offset tolerance as a fraction of reference duration")
        ->capture_default_str();
    cmd->add_option("--offset-min-tol", offsetMinTol, "Minimum offset tolerance in seconds")->capture_default_str();
  }

  MatchTolerance resolve() const {
    MatchTolerance tol;
    tol.onsetTolSec = onsetTol;
    tol.offsetEnabled = offsets;
    tol.offsetRatio = offsetRatio;
    tol.offsetMinTolSec = offsetMinTol;
    try {
      validate(tol);
    } catch (const std::invalid_argument& e) {
      throw InputError(std::string("invalid tolerance: ") + e.what());
    }
    return tol;
  }
};

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InputError("cannot write " + path);
  file << text;
  if (!file) throw InputError("failed writing " + path);
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string metrics_line(const std::string& label, const DiffReport& r) {
  Metrics m = compute_metrics(r);
  return label + ": P=" + fixed3(m.precision) + " R=" + fixed3(m.recall) + " F1=" + fixed3(m.f1) +
         " matched=" + std::to_string(m.matchedCount) + " missed=" + std::to_string(r.missedRef.size()) +
         " extra=" + std::to_string(r.extraEst.size()) + "\n";
}

struct CompareArgs {
  std::vector<std::string> files;
  std::string manifest;
  bool json = false;
  ToleranceFlags tol;
};

int cmd_compare(const CompareArgs& args, std::ostream& out) {
  MatchTolerance tol = args.tol.resolve();
  Workspace ws;
  if (!args.manifest.empty()) {
    ws = load_workspace(args.manifest);
  } else {
    Manifest m;
    for (const auto& f : args.files) m.entries.push_back({f, f, LayerKind::kMidi});
    ws = load_workspace(m, {});
  }
  std::vector<const TrackLayer*> midi;
  for (const auto& l : ws.doc.layers) {
    if (l.kind == LayerKind::kMidi) midi.push_back(&l);
  }
  if (midi.size() < 2) throw InputError("compare needs a reference and at least one estimate MIDI file");

  auto reports = default_reports(ws.doc, tol);
  if (args.json) {
    out << export_reports_json(reports);
    return kExitOk;
  }
  out << "reference: " << midi.front()->name << " (" << ws.doc.notes(midi.front()->id).size() << " notes)\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    out << metrics_line(midi[i + 1]->name, reports[i].report);
  }
  return kExitOk;
}

struct RenderArgs {
  std::string manifest;
  std::string out;
  int width = 1200;
  int height = 600;
  std::string highlight = "off";
  std::optional<double> t0, t1;
  std::optional<double> playhead;
  std::string refLayer, estLayer;
  bool noWaveform = false;
  bool noPedal = false;
  ToleranceFlags tol;
};

int cmd_render(const RenderArgs& args, std::ostream& out) {
  if (args.width < kMinRenderPx || args.height < kMinRenderPx) {
    throw InputError("--width and --height must be at least " + std::to_string(kMinRenderPx) + " px");
  }
  auto mode = parse_highlight_mode(args.highlight);
  if (!mode) throw InputError("unknown highlight mode \"" + args.highlight + "\"");
  MatchTolerance tol = args.tol.resolve();
  Workspace ws = load_workspace(args.manifest);
  RollDocument doc = ws.doc;

  Viewport vp = doc.viewport;
  if (args.t0) vp.timeStart = *args.t0;
  if (args.t1) vp.timeEnd = *args.t1;
  doc = set_viewport(doc, vp);

  RenderOptions opts;
  opts.widthPx = args.width;
  opts.heightPx = args.height;
  opts.showWaveform = !args.noWaveform;
  opts.showPedal = !args.noPedal;
  if (args.playhead) {
    opts.showPlayhead = true;
    opts.playheadSec = args.playhead;
  }
  if (*mode != HighlightMode::kOff) {
    std::string ref = args.refLayer, est = args.estLayer;
    for (const auto& l : doc.layers) {
      if (l.kind != LayerKind::kMidi) continue;
      if (ref.empty()) {
        ref = l.id;
      } else if (est.empty() && l.id != ref) {
        est = l.id;
      }
    }
    if (ref.empty() || est.empty()) throw InputError("highlighting needs two midi layers");
    try {
      opts.highlight = highlight_assignment(doc, diff_layers(doc, ref, est, tol), *mode);
    } catch (const DocumentError& e) {
      throw InputError(e.what());
    }
  }
  write_output(args.out, render_svg(doc, opts), out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Layered piano-roll comparison of MIDI transcriptions", "waveroll"};
  app.require_subcommand(1);

  CompareArgs compare;
  auto* compareCmd = app.add_subcommand("compare", "Note-level metrics of estimates against a reference");
  compareCmd->add_option("files", compare.files, "Reference MIDI file followed by estimate MIDI files");
  compareCmd->add_option("--manifest", compare.manifest, "Manifest JSON; its first midi entry is the reference");
  compareCmd->add_flag("--json", compare.json, "Print machine-readable reports");
  compare.tol.attach(compareCmd);

  RenderArgs render;
  auto* renderCmd = app.add_subcommand("render", "Render the layered piano roll as SVG");
  renderCmd->add_option("manifest", render.manifest, "Manifest JSON")->required();
  renderCmd->add_option("--out", render.out, "Output SVG path (stdout when omitted)");
  renderCmd->add_option("--width", render.width, "Roll width in pixels")->capture_default_str();
  renderCmd->add_option("--height", render.height, "Roll height in pixels")->capture_default_str();
  renderCmd->add_option("--highlight", render.highlight, "off | matched | differences | full")
      ->capture_default_str();
  renderCmd->add_option("--t0", render.t0, "Viewport start in seconds");
  renderCmd->add_option("--t1", render.t1, "Viewport end in seconds");
  renderCmd->add_option("--playhead", render.playhead, "Draw a playhead at this time");
  renderCmd->add_option("--ref-layer", render.refLayer, "Reference layer id for highlighting");
  renderCmd->add_option("--est-layer", render.estLayer, "Estimate layer id for highlighting");
  renderCmd->add_flag("--no-waveform", render.noWaveform, "Omit the waveform lane");
  renderCmd->add_flag("--no-pedal", render.noPedal, "Omit sustain pedal bands");
  render.tol.attach(renderCmd);

  std::string exportManifest, exportOut;
  ToleranceFlags exportTol;
  auto* exportCmd = app.add_subcommand("export", "Write the canonical document JSON");
  exportCmd->add_option("manifest", exportManifest, "Manifest JSON")->required();
  exportCmd->add_option("--out", exportOut, "Output path (stdout when omitted)");
  exportTol.attach(exportCmd);

  std::string peaksWav, peaksOut;
  auto* peaksCmd = app.add_subcommand("peaks", "Write waveform peak pyramid JSON for a WAV file");
  peaksCmd->add_option("wav", peaksWav, "WAV file")->required();
  peaksCmd->add_option("--out", peaksOut, "Output path (stdout when omitted)");

  std::string serveManifest, serveHost = "127.0.0.1", serveAssets;
  int servePort = 8080;
  ToleranceFlags serveTol;
  auto* serveCmd = app.add_subcommand("serve", "Serve the document, peaks and source files over HTTP");
  serveCmd->add_option("manifest", serveManifest, "Manifest JSON")->required();
  serveCmd->add_option("--port", servePort, "TCP port")->capture_default_str();
  serveCmd->add_option("--host", serveHost, "Listen address")->capture_default_str();
  serveCmd->add_option("--assets", serveAssets, "Directory of viewer assets served at /");
  serveTol.attach(serveCmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (compareCmd->parsed()) {
      if (compare.manifest.empty() && compare.files.size() < 2) {
        err << "error: compare needs a reference and at least one estimate MIDI file\n";
        return kExitUsage;
      }
      return cmd_compare(compare, out);
    }
    if (renderCmd->parsed()) return cmd_render(render, out);
    if (exportCmd->parsed()) {
      MatchTolerance tol = exportTol.resolve();
      Workspace ws = load_workspace(exportManifest);
      write_output(exportOut, export_document_json(ws.doc, default_reports(ws.doc, tol)), out);
      return kExitOk;
    }
    if (peaksCmd->parsed()) {
      auto bytes = read_file_bytes(peaksWav);
      PcmAudio pcm;
      PeakPyramid pyr;
      try {
        pcm = parse_wav(bytes);
        pyr = build_peaks(pcm);
      } catch (const WavError& e) {
        throw InputError(peaksWav + ": " + e.what());
      }
      write_output(peaksOut, export_peaks_json(pyr, pcm.channel_count()), out);
      return kExitOk;
    }
    if (serveCmd->parsed()) {
      ServeOptions opts;
      opts.tolerance = serveTol.resolve();
      opts.assetsDir = serveAssets;
      Workspace ws = load_workspace(serveManifest);
      auto server = make_server(ws, opts);
      if (!server->bind_to_port(serveHost, servePort)) {
        err << "error: cannot listen on " << serveHost << ":" << servePort << "\n";
        return kExitUsage;
      }
      out << "serving " << serveManifest << " on http://" << serveHost << ":" << servePort << "/\n";
      out.flush();
      return server->listen_after_bind() ? kExitOk : kExitInternal;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace waveroll
