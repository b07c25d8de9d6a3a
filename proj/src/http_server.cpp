#include "reel/http_server.hpp"

#include <charconv>

#include <httplib.h>
#include <spdlog/spdlog.h>

namespace reel {
namespace {

constexpr const char *kJson = "application/json";

template <typename T> std::optional<T> query_number(const httplib::Request &req, const char *key) {
  if (!req.has_param(key)) return std::nullopt;
  auto text = req.get_param_value(key);
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument(std::string("bad query parameter ") + key);
  }
  return value;
}

void send_error(httplib::Response &res, int status, const std::string &message) {
  res.status = status;
  res.set_content(nlohmann::json{{"error", message}}.dump(), kJson);
}

} // namespace

HttpServer::HttpServer(DocumentService &service, std::size_t worker_threads)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto &server = *server_;
  server.new_task_queue = [worker_threads] { return new httplib::ThreadPool(worker_threads); };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  auto hold = std::chrono::duration_cast<std::chrono::seconds>(service_.options().hold_timeout);
  server.set_write_timeout(hold.count() + 5, 0);

  server.Options(R"(/docs/.*)", [](const httplib::Request &, httplib::Response &res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  server.Post(R"(/docs/([^/]+)/text)", [this](const httplib::Request &req, httplib::Response &res) {
    nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("text") ||
        !body["text"].is_string()) {
      send_error(res, 400, "expected a JSON body {\"text\": string}");
      return;
    }
    auto generation = service_.handle_update(req.matches[1], body["text"].get<std::string>());
    res.set_content(nlohmann::json{{"generation", generation}}.dump(), kJson);
  });

  server.Get(R"(/docs/([^/]+)/frames)", [this](const httplib::Request &req, httplib::Response &res) {
    std::optional<Generation> since;
    std::optional<std::uint64_t> seen;
    try {
      since = query_number<Generation>(req, "since");
      seen = query_number<std::uint64_t>(req, "seen");
    } catch (const std::invalid_argument &e) {
      send_error(res, 400, e.what());
      return;
    }
    try {
      auto snapshot = service_.handle_poll(req.matches[1], since, seen);
      if (!snapshot) {
        res.status = 204;
        return;
      }
      res.set_content(snapshot->dump(), kJson);
    } catch (const NotFoundError &e) {
      send_error(res, 404, e.what());
    }
  });

  server.Get(R"(/docs/([^/]+))", [this](const httplib::Request &req, httplib::Response &res) {
    try {
      res.set_content(service_.handle_get_document(req.matches[1]).dump(), kJson);
    } catch (const NotFoundError &e) {
      send_error(res, 404, e.what());
    }
  });

  server.set_logger([](const httplib::Request &req, const httplib::Response &res) {
    spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string &host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (!server_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void HttpServer::run(const std::string &host, int port) {
  if (!server_->listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
}

void HttpServer::stop() {
  service_.shutdown();
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

} // namespace reel
