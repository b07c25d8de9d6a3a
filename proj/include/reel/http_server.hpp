#pragma once

#include <memory>
#include <string>
#include <thread>

#include "reel/service.hpp"

namespace httplib {
class Server;
}

namespace reel {

/// HTTP front end for a DocumentService:
///   POST /docs/{id}/text                      {"text"} -> {"generation"}
///   GET  /docs/{id}/frames?since=G&seen=M     long poll, 200 snapshot or 204
///   GET  /docs/{id}                           {"text", "snapshot"}
class HttpServer {
public:
  explicit HttpServer(DocumentService &service, std::size_t worker_threads = 64);
  ~HttpServer();

  HttpServer(const HttpServer &) = delete;
  HttpServer &operator=(const HttpServer &) = delete;

  /// Binds and serves on a background thread. Port 0 picks a free port.
  /// Returns the bound port; throws Error if binding fails.
  int start(const std::string &host, int port);
  /// Serves on the calling thread until stop().
  void run(const std::string &host, int port);
  void stop();

private:
  DocumentService &service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

} // namespace reel
