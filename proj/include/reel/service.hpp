#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "reel/error.hpp"
#include "reel/scheduler.hpp"

namespace reel {

class NotFoundError : public Error {
public:
  using Error::Error;
};

struct ServiceOptions {
  /// How long a poll from an up-to-date client is held before 204.
  std::chrono::milliseconds hold_timeout{25000};
  /// Registers the tools of a newly created document.
  std::function<void(Scheduler &)> install_tools;
};

/// One edited text: a queue of pending updates, the worker applying them
/// and the scheduler holding the movie.
class Document {
public:
  explicit Document(const ServiceOptions &options);
  ~Document();

  Document(const Document &) = delete;
  Document &operator=(const Document &) = delete;

  /// Queues `text` and returns the generation it will produce.
  Generation enqueue(std::string text);

  Scheduler &scheduler() { return scheduler_; }

private:
  void work(std::stop_token stop);

  Scheduler scheduler_;
  std::mutex queue_mutex_;
  std::condition_variable_any queue_cv_;
  std::deque<std::string> queue_;
  Generation acked_ = 0;
  std::jthread worker_;
};

/// Document store behind the HTTP endpoints.
class DocumentService {
public:
  explicit DocumentService(ServiceOptions options);
  ~DocumentService();

  /// Acknowledges before any processing happens. Creates the document on
  /// first use.
  Generation handle_update(const std::string &id, std::string text);

  /// Snapshot as soon as there is something the client has not seen;
  /// nullopt when the hold timed out. Throws NotFoundError.
  std::optional<nlohmann::json> handle_poll(const std::string &id, std::optional<Generation> since,
                                            std::optional<std::uint64_t> seen);

  /// {text, snapshot}, without blocking. Throws NotFoundError.
  nlohmann::json handle_get_document(const std::string &id);

  std::shared_ptr<Document> find(const std::string &id);

  /// Releases held polls; later polls return immediately.
  void shutdown();

  const ServiceOptions &options() const { return options_; }

private:
  ServiceOptions options_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Document>> documents_;
};

/// Snapshot message for an observation; cells exclude the scheduler's
/// dependencies cell.
nlohmann::json snapshot_of(const Observation &observation);

} // namespace reel
