#include "waveroll/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "waveroll/error.hpp"

namespace waveroll {

namespace {

double clamp_media(const TransportState& s, double t) { return std::clamp(t, 0.0, s.durationSec); }

bool inside(const LoopRegion& loop, double t) { return t >= loop.a && t < loop.b; }

// Where playback should begin from `media` given the loop.
double entry_point(const TransportState& s, double media) {
  if (s.loop && !inside(*s.loop, media)) return s.loop->a;
  return media;
}

}  // namespace

TransportState make_transport(double durationSec) {
  TransportState s;
  s.durationSec = std::max(0.0, durationSec);
  return s;
}

double current_time(const TransportState& s, double wallNowSec) {
  if (std::holds_alternative<Stopped>(s.mode)) return 0.0;
  if (const auto* p = std::get_if<Paused>(&s.mode)) return p->mediaSec;

  const auto& play = std::get<Playing>(s.mode);
  double elapsed = wallNowSec - play.anchorWallSec;
  if (elapsed < 0.0) {
    throw TransportError(TransportErrc::kClockSkew, "wall clock reads earlier than the playback anchor");
  }
  double t = play.anchorMediaSec + elapsed;
  if (s.loop && play.anchorMediaSec < s.loop->b && t >= s.loop->b) {
    const double a = s.loop->a, b = s.loop->b;
    t = a + std::fmod(t - a, b - a);
    if (t >= b) t = a;  // fmod remainder rounded up to the period
    return t;
  }
  return std::min(t, s.durationSec);
}

TransportState settle(const TransportState& s, double wallNowSec) {
  if (s.playing() && !s.loop && current_time(s, wallNowSec) >= s.durationSec) return stop(s);
  return s;
}

TransportState play(const TransportState& s, double wallNowSec) {
  if (s.playing()) return s;
  TransportState out = s;
  double media = 0.0;
  if (const auto* p = std::get_if<Paused>(&s.mode)) media = p->mediaSec;
  out.mode = Playing{wallNowSec, entry_point(s, media)};
  return out;
}

TransportState pause(const TransportState& s, double wallNowSec) {
  if (!s.playing()) return s;
  TransportState settled = settle(s, wallNowSec);
  if (!settled.playing()) return settled;
  TransportState out = s;
  out.mode = Paused{current_time(s, wallNowSec)};
  return out;
}

TransportState stop(const TransportState& s) {
  TransportState out = s;
  out.mode = Stopped{};
  return out;
}

TransportState seek(const TransportState& s, double targetSec, double wallNowSec) {
  double target = clamp_media(s, std::isnan(targetSec) ? 0.0 : targetSec);
  TransportState out = s;
  if (s.playing()) {
    out.mode = Playing{wallNowSec, target};
  } else {
    out.mode = Paused{target};
  }
  return out;
}

TransportState set_loop(const TransportState& s, double aSec, double bSec, double wallNowSec) {
  LoopRegion loop{clamp_media(s, aSec), clamp_media(s, bSec)};
  if (!(loop.a < loop.b)) {
    throw TransportError(TransportErrc::kInvalidLoop, "loop start must precede loop end");
  }
  TransportState out = s;
  out.loop = loop;
  if (s.playing()) {
    double now = current_time(s, wallNowSec);
    out.mode = Playing{wallNowSec, inside(loop, now) ? now : loop.a};
  }
  return out;
}

TransportState clear_loop(const TransportState& s, double wallNowSec) {
  TransportState out = s;
  if (s.playing()) out.mode = Playing{wallNowSec, current_time(s, wallNowSec)};
  out.loop.reset();
  return out;
}

TrackMix& TrackMix::set_pan(double p) {
  pan_ = std::isnan(p) ? 0.0 : std::clamp(p, -1.0, 1.0);
  return *this;
}

TrackMix& TrackMix::set_gain(double g) {
  gain_ = std::isnan(g) ? 1.0 : std::clamp(g, 0.0, 2.0);
  return *this;
}

std::vector<ScheduledEvent> events_in(const RollDocument& doc, const TransportState& /*state*/,
                                      const MixTable& mixes, double t0Sec, double t1Sec) {
  if (!(t0Sec < t1Sec)) throw std::invalid_argument("event window must have t0 < t1");

  struct Keyed {
    ScheduledEvent ev;
    std::size_t layerOrder;
    int isOn;
    int pitch;
  };
  std::vector<Keyed> keyed;

  for (std::size_t li = 0; li < doc.layers.size(); ++li) {
    const TrackLayer& layer = doc.layers[li];
    if (layer.kind != LayerKind::kMidi || !layer.visible) continue;
    TrackMix mix(layer.id);
    if (auto it = mixes.find(layer.id); it != mixes.end()) mix = it->second;
    if (mix.mute()) continue;

    for (const auto& n : doc.notes(layer.id)) {
      if (n.onsetSec >= t0Sec && n.onsetSec < t1Sec) {
        keyed.push_back({{n.onsetSec, NoteOnEvt{layer.id, n.pitch, n.velocity}, mix.pan(), mix.gain()}, li, 1,
                         n.pitch});
      }
      if (n.offsetSec >= t0Sec && n.offsetSec < t1Sec) {
        keyed.push_back({{n.offsetSec, NoteOffEvt{layer.id, n.pitch}, mix.pan(), mix.gain()}, li, 0, n.pitch});
      }
    }
  }

  std::stable_sort(keyed.begin(), keyed.end(), [](const Keyed& x, const Keyed& y) {
    return std::tie(x.ev.atSec, x.layerOrder, x.isOn, x.pitch) < std::tie(y.ev.atSec, y.layerOrder, y.isOn, y.pitch);
  });
  std::vector<ScheduledEvent> out;
  out.reserve(keyed.size());
  for (auto& k : keyed) out.push_back(std::move(k.ev));
  return out;
}

}  // namespace waveroll
