#include "waveroll/smf.hpp"

#include <string>

#include "waveroll/error.hpp"

namespace waveroll {

namespace {

// Bounds-checked big-endian cursor over one chunk.
class ByteCursor {
 public:
  explicit ByteCursor(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  bool done() const { return pos_ >= bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t pos() const { return pos_; }

  uint8_t peek() const {
    require(1);
    return bytes_[pos_];
  }

  uint8_t u8() {
    require(1);
    return bytes_[pos_++];
  }

  uint16_t u16() {
    require(2);
    uint16_t v = static_cast<uint16_t>((bytes_[pos_] << 8) | bytes_[pos_ + 1]);
    pos_ += 2;
    return v;
  }

  uint32_t u32() {
    require(4);
    uint32_t v = (uint32_t{bytes_[pos_]} << 24) | (uint32_t{bytes_[pos_ + 1]} << 16) |
                 (uint32_t{bytes_[pos_ + 2]} << 8) | uint32_t{bytes_[pos_ + 3]};
    pos_ += 4;
    return v;
  }

  uint32_t vlq() {
    auto r = decode_vlq(bytes_.subspan(pos_));
    pos_ += r.consumed;
    return r.value;
  }

  std::span<const uint8_t> take(std::size_t n) {
    require(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void require(std::size_t n) const {
    if (remaining() < n) {
      throw SmfError(SmfErrc::kTruncated, "unexpected end of data at offset " + std::to_string(pos_));
    }
  }

  std::span<const uint8_t> bytes_;
  std::size_t pos_ = 0;
};

bool is_chunk(std::span<const uint8_t> id, const char* tag) {
  return id.size() == 4 && id[0] == tag[0] && id[1] == tag[1] && id[2] == tag[2] && id[3] == tag[3];
}

// Data bytes following a channel-voice status byte.
int channel_data_length(uint8_t status) {
  switch (status & 0xF0) {
    case 0xC0:
    case 0xD0:
      return 1;
    default:
      return 2;
  }
}

uint8_t data7(ByteCursor& cur) {
  uint8_t b = cur.u8();
  if (b & 0x80) {
    throw SmfError(SmfErrc::kMalformedEvent, "status byte where data byte expected at offset " +
                                                 std::to_string(cur.pos() - 1));
  }
  return b;
}

MidiTrack parse_track(std::span<const uint8_t> chunk) {
  MidiTrack track;
  ByteCursor cur(chunk);
  uint64_t tick = 0;
  uint8_t running = 0;

  while (!cur.done()) {
    tick += cur.vlq();
    uint8_t status = cur.peek();
    if (status & 0x80) {
      cur.u8();
    } else if (running != 0) {
      status = running;
    } else {
      throw SmfError(SmfErrc::kMalformedEvent,
                     "data byte without running status at offset " + std::to_string(cur.pos()));
    }

    if (status == 0xFF) {
      running = 0;
      uint8_t type = cur.u8();
      uint32_t len = cur.vlq();
      auto body = cur.take(len);
      if (type == 0x2F) {
        track.events.push_back({tick, EndOfTrack{}});
        break;
      }
      if (type == 0x51 && len == 3) {
        uint32_t us = (uint32_t{body[0]} << 16) | (uint32_t{body[1]} << 8) | uint32_t{body[2]};
        if (us == 0) {
          throw SmfError(SmfErrc::kMalformedEvent, "zero tempo at tick " + std::to_string(tick));
        }
        track.events.push_back({tick, Tempo{us}});
        continue;
      }
      OtherEvent other{0xFF, {type}};
      other.payload.insert(other.payload.end(), body.begin(), body.end());
      track.events.push_back({tick, std::move(other)});
    } else if (status == 0xF0 || status == 0xF7) {
      running = 0;
      uint32_t len = cur.vlq();
      auto body = cur.take(len);
      track.events.push_back({tick, OtherEvent{status, {body.begin(), body.end()}}});
    } else if (status >= 0xF1) {
      // System common/real-time bytes have no place in a file; keep them opaque.
      running = 0;
      track.events.push_back({tick, OtherEvent{status, {}}});
    } else {
      running = status;
      uint8_t channel = status & 0x0F;
      uint8_t a = data7(cur);
      uint8_t b = channel_data_length(status) == 2 ? data7(cur) : 0;
      switch (status & 0xF0) {
        case 0x90:
          track.events.push_back({tick, NoteOn{channel, a, b}});
          break;
        case 0x80:
          track.events.push_back({tick, NoteOff{channel, a, b}});
          break;
        case 0xB0:
          track.events.push_back({tick, ControlChange{channel, a, b}});
          break;
        default: {
          OtherEvent other{status, {a}};
          if (channel_data_length(status) == 2) other.payload.push_back(b);
          track.events.push_back({tick, std::move(other)});
        }
      }
    }
  }
  return track;
}

}  // namespace

VlqResult decode_vlq(std::span<const uint8_t> bytes) {
  uint32_t value = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (i >= bytes.size()) {
      throw SmfError(SmfErrc::kTruncated, "truncated variable-length quantity");
    }
    value = (value << 7) | (bytes[i] & 0x7F);
    if ((bytes[i] & 0x80) == 0) return {value, i + 1};
  }
  throw SmfError(SmfErrc::kMalformedVlq, "variable-length quantity longer than 4 bytes");
}

std::vector<uint8_t> encode_vlq(uint32_t value) {
  if (value >= kVlqLimit) {
    throw std::invalid_argument("value does not fit a variable-length quantity");
  }
  std::vector<uint8_t> out;
  out.push_back(value & 0x7F);
  value >>= 7;
  while (value != 0) {
    out.insert(out.begin(), static_cast<uint8_t>(0x80 | (value & 0x7F)));
    value >>= 7;
  }
  return out;
}

MidiFile parse_smf(std::span<const uint8_t> bytes) {
  ByteCursor cur(bytes);
  if (bytes.size() < 4 || !is_chunk(bytes.first(4), "MThd")) {
    throw SmfError(SmfErrc::kBadMagic, "not a standard MIDI file (missing MThd)");
  }
  cur.take(4);
  if (cur.u32() != 6) {
    throw SmfError(SmfErrc::kBadHeaderLength, "MThd length is not 6");
  }
  MidiFile file;
  file.format = cur.u16();
  uint16_t ntrks = cur.u16();
  uint16_t division = cur.u16();
  if (file.format == 2) {
    throw SmfError(SmfErrc::kUnsupportedFormat, "format 2 MIDI files are not supported");
  }
  if (file.format > 2) {
    throw SmfError(SmfErrc::kUnsupportedFormat, "unknown MIDI file format " + std::to_string(file.format));
  }
  if (division & 0x8000) {
    throw SmfError(SmfErrc::kUnsupportedDivision, "SMPTE time division is not supported");
  }
  if (division == 0) {
    throw SmfError(SmfErrc::kUnsupportedDivision, "time division of zero ticks per quarter");
  }
  file.division = division;

  while (file.tracks.size() < ntrks) {
    if (cur.remaining() < 8) {
      throw SmfError(SmfErrc::kTruncated, "expected " + std::to_string(ntrks) + " tracks, found " +
                                              std::to_string(file.tracks.size()));
    }
    auto id = cur.take(4);
    uint32_t len = cur.u32();
    if (cur.remaining() < len) {
      throw SmfError(SmfErrc::kTruncated, "track chunk " + std::to_string(file.tracks.size()) +
                                              " declares " + std::to_string(len) + " bytes, " +
                                              std::to_string(cur.remaining()) + " available");
    }
    auto body = cur.take(len);
    if (!is_chunk(id, "MTrk")) continue;  // alien chunk
    file.tracks.push_back(parse_track(body));
  }
  return file;
}

}  // namespace waveroll
