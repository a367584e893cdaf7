#pragma once

// Loading a manifest and its source files from disk.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "waveroll/error.hpp"
#include "waveroll/match.hpp"
#include "waveroll/roll.hpp"

namespace waveroll {

// A file that could not be read or decoded; the message names the path.
class InputError : public Error {
 public:
  using Error::Error;
};

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& path);

struct Workspace {
  std::filesystem::path baseDir;  // manifest paths resolve against this
  Manifest manifest;
  RollDocument doc;
  std::map<std::string, std::vector<uint8_t>> files;  // manifest path -> raw bytes
  int audioChannels = 0;
};

Workspace load_workspace(const std::filesystem::path& manifestPath);
Workspace load_workspace(const Manifest& manifest, const std::filesystem::path& baseDir);

// The first midi layer against every later midi layer.
std::vector<LayerDiff> default_reports(const RollDocument& doc, const MatchTolerance& tol);

}  // namespace waveroll
