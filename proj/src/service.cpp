#include "reel/service.hpp"

#include <spdlog/spdlog.h>

#include "reel/camera.hpp"
#include "reel/wire.hpp"

namespace reel {

Document::Document(const ServiceOptions &options) {
  if (options.install_tools) options.install_tools(scheduler_);
  worker_ = std::jthread([this](std::stop_token stop) { work(stop); });
}

Document::~Document() {
  scheduler_.shutdown();
  worker_.request_stop();
  worker_.join();
  scheduler_.cancel_runs();
}

Generation Document::enqueue(std::string text) {
  std::lock_guard lock(queue_mutex_);
  queue_.push_back(std::move(text));
  queue_cv_.notify_one();
  return ++acked_;
}

void Document::work(std::stop_token stop) {
  while (true) {
    std::string text;
    {
      std::unique_lock lock(queue_mutex_);
      if (!queue_cv_.wait(lock, stop, [&] { return !queue_.empty(); })) return;
      text = std::move(queue_.front());
      queue_.pop_front();
    }
    // Stop the tools first so the old movie carries every result they
    // managed to deliver.
    scheduler_.cancel_runs();
    auto old = scheduler_.snapshot();
    try {
      auto result = camera(*old, text);
      spdlog::debug("generation {}: {} frames, {} invalidated", result.movie.generation(),
                    result.movie.size(), result.invalidated.size());
      scheduler_.notify_update(std::move(result.movie), std::move(result.invalidated));
    } catch (const std::exception &e) {
      spdlog::error("update to generation {} failed: {}", old->generation() + 1, e.what());
    }
  }
}

nlohmann::json snapshot_of(const Observation &observation) {
  const Movie &movie = *observation.movie;
  return snapshot_message(movie, observation.all_done, observation.marker,
                          [&](FrameId id) -> std::optional<CellMap> {
                            const Frame *frame = movie.find(id);
                            if (frame == nullptr) return std::nullopt;
                            CellMap cells = frame->cells;
                            cells.erase(cells::kDependencies);
                            return cells;
                          });
}

DocumentService::DocumentService(ServiceOptions options) : options_(std::move(options)) {}

DocumentService::~DocumentService() { shutdown(); }

std::shared_ptr<Document> DocumentService::find(const std::string &id) {
  std::lock_guard lock(mutex_);
  auto it = documents_.find(id);
  if (it == documents_.end()) return nullptr;
  return it->second;
}

Generation DocumentService::handle_update(const std::string &id, std::string text) {
  std::shared_ptr<Document> document;
  {
    std::lock_guard lock(mutex_);
    auto &slot = documents_[id];
    if (!slot) slot = std::make_shared<Document>(options_);
    document = slot;
  }
  return document->enqueue(std::move(text));
}

std::optional<nlohmann::json> DocumentService::handle_poll(const std::string &id,
                                                           std::optional<Generation> since,
                                                           std::optional<std::uint64_t> seen) {
  auto document = find(id);
  if (!document) throw NotFoundError("no document " + id);
  auto deadline = std::chrono::steady_clock::now() + options_.hold_timeout;
  auto observation = document->scheduler().wait_for_change(seen, since.value_or(0), deadline);
  if (!observation) return std::nullopt;
  return snapshot_of(*observation);
}

nlohmann::json DocumentService::handle_get_document(const std::string &id) {
  auto document = find(id);
  if (!document) throw NotFoundError("no document " + id);
  auto observation = document->scheduler().observe();
  return {{"text", observation.movie->text()}, {"snapshot", snapshot_of(observation)}};
}

void DocumentService::shutdown() {
  std::lock_guard lock(mutex_);
  for (auto &[id, document] : documents_) document->scheduler().shutdown();
}

} // namespace reel
