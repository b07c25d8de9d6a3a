#include <csignal>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "reel/driver.hpp"
#include "reel/external_prover.hpp"
#include "reel/http_server.hpp"
#include "reel/linker.hpp"

namespace {

reel::HttpServer *g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Asynchronous proof-script editing server"};
  app.set_config("--config", "", "TOML/INI file with any of the options below; flags win");

  std::string listen = "127.0.0.1:8080";
  double hold_seconds = 25.0;
  std::string backend = "simulated";
  std::string prover_path = "coqtop";
  int latency_ms = 0;
  std::string log_level = "info";

  app.add_option("--listen", listen, "host:port to listen on")->capture_default_str();
  app.add_option("--hold-timeout", hold_seconds, "seconds an idle poll is held before 204")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--prover", backend, "prover backend")
      ->check(CLI::IsMember({"simulated", "external"}))
      ->capture_default_str();
  app.add_option("--prover-path", prover_path, "external prover binary (run with -emacs)")
      ->capture_default_str();
  app.add_option("--sim-latency-ms", latency_ms, "delay before every prover command")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}))
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  spdlog::set_level(spdlog::level::from_str(log_level));

  auto colon = listen.rfind(':');
  if (colon == std::string::npos) {
    std::cerr << "--listen expects host:port\n";
    return 2;
  }
  std::string host = listen.substr(0, colon);
  int port = std::stoi(listen.substr(colon + 1));

  reel::ServiceOptions options;
  options.hold_timeout = std::chrono::milliseconds(static_cast<long>(hold_seconds * 1000));
  options.install_tools = [=](reel::Scheduler &scheduler) {
    std::shared_ptr<reel::ProverBackend> prover;
    if (backend == "external") {
      try {
        prover = std::make_shared<reel::ExternalProver>(reel::ExternalProverOptions{prover_path});
      } catch (const reel::BackendError &e) {
        spdlog::error("cannot start {}: {}", prover_path, e.what());
        prover = std::make_shared<reel::UnavailableProver>(e.what());
      }
    } else {
      prover = std::make_shared<reel::SimulatedProver>();
    }
    scheduler.register_tool(
        reel::make_prover_tool(prover, {std::chrono::milliseconds(latency_ms)}));
    scheduler.register_tool(reel::make_linker_tool());
  };

  reel::DocumentService service(options);
  reel::HttpServer server(service);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  spdlog::info("listening on {}:{} ({} prover, hold {}s)", host, port, backend, hold_seconds);
  try {
    server.run(host, port);
  } catch (const std::exception &e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
