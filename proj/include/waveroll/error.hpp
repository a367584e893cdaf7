#pragma once

#include <stdexcept>
#include <string>

namespace waveroll {

// Base for every input/usage failure raised by the engine. The CLI maps these
// to exit code 2; anything else escaping is an internal error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SmfErrc {
  kBadMagic,
  kBadHeaderLength,
  kUnsupportedFormat,
  kUnsupportedDivision,
  kTruncated,
  kMalformedVlq,
  kMalformedEvent,
};

class SmfError : public Error {
 public:
  SmfError(SmfErrc code, const std::string& what) : Error(what), code_(code) {}
  SmfErrc code() const noexcept { return code_; }

 private:
  SmfErrc code_;
};

enum class WavErrc {
  kBadMagic,
  kUnsupportedCodec,
  kTruncated,
  kMalformed,
  kEmpty,
};

class WavError : public Error {
 public:
  WavError(WavErrc code, const std::string& what) : Error(what), code_(code) {}
  WavErrc code() const noexcept { return code_; }

 private:
  WavErrc code_;
};

class ManifestError : public Error {
 public:
  using Error::Error;
};

// Unknown or duplicate layer ids, malformed document JSON.
class DocumentError : public Error {
 public:
  using Error::Error;
};

enum class TransportErrc {
  kInvalidLoop,
  kClockSkew,
};

class TransportError : public Error {
 public:
  TransportError(TransportErrc code, const std::string& what) : Error(what), code_(code) {}
  TransportErrc code() const noexcept { return code_; }

 private:
  TransportErrc code_;
};

}  // namespace waveroll
