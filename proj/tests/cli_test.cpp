#include <doctest.h>

#include <sstream>
#include <fstream>
#include <unistd.h>
#include <thread>

#include <json.hpp>

#include "support/test_support.hpp"
#include "waveroll/cli.hpp"
#include "waveroll/serve.hpp"

using namespace waveroll;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fx(const std::string& rel) { return (testing::fixture_dir() / rel).string(); }

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / ("waveroll_cli_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("compare prints metrics for fixture F") {
  Run r = run({"compare", fx("fixture_f_ref.mid"), fx("fixture_f_est.mid")});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("(3 notes)") != std::string::npos);
  CHECK(r.out.find("P=0.500 R=0.667 F1=0.571 matched=2 missed=1 extra=2") != std::string::npos);

  Run viaManifest = run({"compare", "--manifest", fx("fixture_f.json")});
  CHECK(viaManifest.code == kExitOk);
  CHECK(viaManifest.out.find("Estimate: P=0.500 R=0.667 F1=0.571") != std::string::npos);

  Run json = run({"compare", "--json", fx("fixture_f_ref.mid"), fx("fixture_f_est.mid")});
  REQUIRE(json.code == kExitOk);
  auto j = nlohmann::json::parse(json.out);
  CHECK(j["reports"][0]["missedRef"] == nlohmann::json::parse("[1]"));

  Run strict = run({"compare", "--onset-tol", "0.001", fx("fixture_f_ref.mid"), fx("fixture_f_est.mid")});
  CHECK(strict.code == kExitOk);
}

TEST_CASE("compare against itself is perfect") {
  for (const char* f : {"fixture_f_ref.mid", "multi_tempo.mid", "tempo_only.mid", "session/gt.mid"}) {
    Run r = run({"compare", fx(f), fx(f)});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("P=1.000 R=1.000 F1=1.000") != std::string::npos);
  }
}

TEST_CASE("compare input errors exit with the usage code") {
  Run missing = run({"compare", fx("fixture_f_ref.mid"), "/nonexistent/x.mid"});
  CHECK(missing.code == kExitUsage);
  CHECK(missing.err.find("/nonexistent/x.mid") != std::string::npos);

  CHECK(run({"compare", "--onset-tol", "-1", fx("fixture_f_ref.mid"), fx("fixture_f_ref.mid")}).code == kExitUsage);
  CHECK(run({"compare", "--onset-tol", "abc", fx("fixture_f_ref.mid"), fx("fixture_f_ref.mid")}).code == kExitUsage);
  CHECK(run({"compare", fx("fixture_f_ref.mid")}).code == kExitUsage);
  CHECK(run({"compare", fx("session/gt.wav"), fx("fixture_f_ref.mid")}).code == kExitUsage);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("render the session manifest") {
  Run r = run({"render", fx("session/manifest.json"), "--width", "800", "--height", "400"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.rfind("<?xml", 0) == 0);
  std::size_t layers = 0;
  for (auto p = r.out.find("<g class=\"layer\""); p != std::string::npos; p = r.out.find("<g class=\"layer\"", p + 1)) {
    ++layers;
  }
  CHECK(layers == 2);
  CHECK(r.out.find("<polyline") != std::string::npos);
  CHECK(run({"render", fx("session/manifest.json"), "--width", "800", "--height", "400"}).out == r.out);

  Run clipped = run({"render", fx("session/manifest.json"), "--t0", "2", "--t1", "4", "--highlight", "full"});
  CHECK(clipped.code == kExitOk);
  CHECK(clipped.out != r.out);
  CHECK(clipped.out.find("data-highlight") != std::string::npos);

  CHECK(run({"render", fx("session/manifest.json"), "--width", "8"}).code == kExitUsage);
  CHECK(run({"render", fx("session/manifest.json"), "--highlight", "loud"}).code == kExitUsage);
  CHECK(run({"render", fx("session/manifest.json"), "--no-waveform"}).out.find("<polyline") == std::string::npos);

  auto outPath = scratch_dir() / "roll.svg";
  CHECK(run({"render", fx("session/manifest.json"), "--out", outPath.string()}).code == kExitOk);
  CHECK(testing::read_text(outPath) == run({"render", fx("session/manifest.json")}).out);
}

TEST_CASE("export writes canonical JSON") {
  Run empty = run({"export", fx("empty.json")});
  REQUIRE(empty.code == kExitOk);
  auto j = nlohmann::json::parse(empty.out);
  CHECK(j["layers"].empty());
  CHECK(j["audio"].is_null());

  Run a = run({"export", fx("session/manifest.json")});
  Run b = run({"export", fx("session/manifest.json")});
  REQUIRE(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(nlohmann::json::parse(a.out)["reports"].size() == 1);
  CHECK(run({"export", "/nonexistent.json"}).code == kExitUsage);
}

TEST_CASE("peaks of silence are all zero") {
  std::vector<std::int16_t> silence(44100, 0);
  auto path = scratch_dir() / "silence.wav";
  {
    auto bytes = testing::wav_file(1, 44100, 1, testing::pcm16_payload({silence}));
    std::ofstream(path, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                                static_cast<std::streamsize>(bytes.size()));
  }
  Run r = run({"peaks", path.string()});
  REQUIRE(r.code == kExitOk);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["sampleCount"] == 44100);
  CHECK(j["channelCount"] == 1);
  for (const auto& level : j["levels"]) {
    for (const auto& v : level["min"]) CHECK(v.get<double>() == 0.0);
    for (const auto& v : level["max"]) CHECK(v.get<double>() == 0.0);
  }
  CHECK(run({"peaks", fx("fixture_f_ref.mid")}).code == kExitUsage);
}

TEST_CASE("serve exposes the document, peaks and source files") {
  Workspace ws = load_workspace(fx("session/manifest.json"));
  ServeOptions opts;
  auto server = make_server(ws, opts);
  int port = server->bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server->listen_after_bind(); });
  server->wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto doc = client.Get("/document.json");
  REQUIRE(doc);
  CHECK(doc->status == 200);
  CHECK(doc->body == run({"export", fx("session/manifest.json")}).out);
  CHECK(doc->get_header_value("Content-Type").find("application/json") == 0);

  auto mid = client.Get("/files/gt.mid");
  REQUIRE(mid);
  CHECK(mid->status == 200);
  auto raw = testing::read_bytes(testing::fixture_dir() / "session" / "gt.mid");
  CHECK(mid->body == std::string(raw.begin(), raw.end()));
  CHECK(mid->get_header_value("Content-Type") == "audio/midi");

  auto peaks = client.Get("/peaks.json");
  REQUIRE(peaks);
  CHECK(peaks->status == 200);
  CHECK(nlohmann::json::parse(peaks->body)["sampleRate"] == 8000);

  auto nothing = client.Get("/nonexistent");
  REQUIRE(nothing);
  CHECK(nothing->status == 404);
  auto escape = client.Get("/files/../manifest.json");
  REQUIRE(escape);
  CHECK(escape->status == 404);

  // A second listener on the same port must fail cleanly.
  Run busy = run({"serve", fx("session/manifest.json"), "--port", std::to_string(port)});
  CHECK(busy.code == kExitUsage);
  CHECK(busy.err.find("cannot listen") != std::string::npos);

  server->stop();
  worker.join();
}

TEST_CASE("serve without audio has no peaks") {
  Workspace ws = load_workspace(fx("fixture_f.json"));
  auto server = make_server(ws, {});
  int port = server->bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server->listen_after_bind(); });
  server->wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  auto peaks = client.Get("/peaks.json");
  REQUIRE(peaks);
  CHECK(peaks->status == 404);
  server->stop();
  worker.join();
}
