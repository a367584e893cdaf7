#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <httplib.h>

#include "waveroll/match.hpp"
#include "waveroll/workspace.hpp"

namespace waveroll {

struct ServeOptions {
  MatchTolerance tolerance;
  std::filesystem::path assetsDir;  // optional static viewer bundle, mounted at "/"
};

/// Read-only endpoints over an immutable snapshot of `ws`:
///   GET /document.json   DocumentJson v1, identical to `export`
///   GET /peaks.json      waveform peaks of the audio entry (404 without one)
///   GET /files/<path>    raw bytes of a manifest entry
std::unique_ptr<httplib::Server> make_server(const Workspace& ws, const ServeOptions& opts);

std::string content_type_for(const std::string& path);

}  // namespace waveroll
