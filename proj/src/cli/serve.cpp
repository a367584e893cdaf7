#include "waveroll/serve.hpp"

#include "waveroll/export.hpp"

namespace waveroll {

std::string content_type_for(const std::string& path) {
  auto ext = std::filesystem::path(path).extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".mid" || ext == ".midi") return "audio/midi";
  if (ext == ".wav") return "audio/wav";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".html") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  return "application/octet-stream";
}

std::unique_ptr<httplib::Server> make_server(const Workspace& ws, const ServeOptions& opts) {
  auto server = std::make_unique<httplib::Server>();
  // httplib defaults to SO_REUSEPORT, which lets a second server share a busy port.
  server->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });

  // Everything served is rendered once up front; handlers only read.
  auto document = std::make_shared<const std::string>(
      export_document_json(ws.doc, default_reports(ws.doc, opts.tolerance)));
  std::shared_ptr<const std::string> peaks;
  if (ws.doc.waveform) {
    peaks = std::make_shared<const std::string>(export_peaks_json(*ws.doc.waveform, ws.audioChannels));
  }
  auto files = std::make_shared<const std::map<std::string, std::vector<uint8_t>>>(ws.files);

  server->Get("/document.json", [document](const httplib::Request&, httplib::Response& res) {
    res.set_content(*document, "application/json");
  });
  server->Get("/peaks.json", [peaks](const httplib::Request&, httplib::Response& res) {
    if (!peaks) {
      res.status = 404;
      res.set_content("no audio in manifest\n", "text/plain");
      return;
    }
    res.set_content(*peaks, "application/json");
  });
  server->Get(R"(/files/(.+))", [files](const httplib::Request& req, httplib::Response& res) {
    auto it = files->find(req.matches[1].str());
    if (it == files->end()) {
      res.status = 404;
      res.set_content("not found\n", "text/plain");
      return;
    }
    res.set_content(std::string(it->second.begin(), it->second.end()), content_type_for(it->first));
  });
  if (!opts.assetsDir.empty()) server->set_mount_point("/", opts.assetsDir.string());
  return server;
}

}  // namespace waveroll
