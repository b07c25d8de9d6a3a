#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

#include "reel/error.hpp"
#include "reel/movie.hpp"

namespace reel {

class Scheduler;
class ToolContext;

/// A process working on the movie. It may read `required_cells` and is the
/// only writer of `provided_cells`.
struct ToolDescriptor {
  std::string name;
  std::set<std::string> required_cells;
  std::set<std::string> provided_cells;
  std::function<void(ToolContext &)> run;
};

struct ToolHandle {
  std::size_t index = 0;
  friend bool operator==(ToolHandle, ToolHandle) = default;
};

struct ToolResult {
  Generation generation = 0;
  FrameId frame = 0;
  CellMap cells;
};

class ConflictError : public Error {
public:
  using Error::Error;
};

class CycleError : public Error {
public:
  using Error::Error;
};

/// A tool wrote a cell it does not provide.
class ProvidesViolation : public Error {
public:
  using Error::Error;
};

/// Handed to a tool run: the snapshot it works on plus the channel back
/// into the scheduler.
class ToolContext {
public:
  ToolContext(Scheduler &scheduler, ToolHandle handle, std::shared_ptr<const Movie> movie,
              std::vector<FrameId> invalidated, std::stop_token stop);

  const Movie &movie() const { return *movie_; }
  const std::shared_ptr<const Movie> &snapshot() const { return movie_; }
  const std::vector<FrameId> &invalidated() const { return invalidated_; }
  Generation generation() const { return movie_->generation(); }
  const std::stop_token &stop_token() const { return stop_; }
  bool cancelled() const { return stop_.stop_requested(); }

  /// False when the result is stale.
  bool submit(FrameId frame, CellMap cells);

  /// Blocks until `frame` carries every cell in `cells`, the providers of
  /// those cells are done, the run is cancelled or the movie moves on.
  /// Returns the frame's cells at that point, or nullopt if cancelled.
  std::optional<CellMap> wait_for(FrameId frame, const std::set<std::string> &cells);

  void mark_done();

private:
  Scheduler &scheduler_;
  ToolHandle handle_;
  std::shared_ptr<const Movie> movie_;
  std::vector<FrameId> invalidated_;
  std::stop_token stop_;
};

/// What a poller sees: the current movie with merged cells and a marker
/// that changes whenever anything observable does.
struct Observation {
  std::shared_ptr<const Movie> movie;
  bool all_done = true;
  std::uint64_t marker = 0;
};

/// Owns the authoritative movie for one document, runs registered tools on
/// every new generation and merges their results.
class Scheduler {
public:
  Scheduler();
  ~Scheduler();

  Scheduler(const Scheduler &) = delete;
  Scheduler &operator=(const Scheduler &) = delete;

  /// Throws ConflictError if another tool already provides one of the
  /// cells, CycleError if the cell graph would become cyclic.
  ToolHandle register_tool(ToolDescriptor descriptor);

  /// Installs a new generation: cancels and joins running tools, fills the
  /// dependencies cell, clears done flags and starts tools in dependency
  /// order.
  void notify_update(Movie movie, std::vector<FrameId> invalidated);

  /// Signals running tools to stop and waits for them.
  void cancel_runs();

  /// Merges a result computed against the current generation. Throws
  /// ProvidesViolation for cells the tool does not provide.
  bool submit_result(ToolHandle tool, ToolResult result);

  void mark_done(ToolHandle tool, Generation generation);
  bool all_done() const;

  /// Tool-computed cells of a frame in the current generation.
  std::optional<CellMap> get_data(FrameId frame) const;

  std::shared_ptr<const Movie> snapshot() const;
  Generation generation() const;
  Observation observe() const;

  /// Blocks until the marker differs from `seen` (or `seen` is empty) and
  /// the generation has reached `since`, or `deadline` passes.
  std::optional<Observation> wait_for_change(std::optional<std::uint64_t> seen, Generation since,
                                             std::chrono::steady_clock::time_point deadline);

  bool wait_all_done(std::chrono::milliseconds timeout);

  /// Releases every blocked waiter for good.
  void shutdown();

private:
  friend class ToolContext;

  struct Registered {
    ToolDescriptor descriptor;
    std::optional<Generation> done_for;
    bool reported = false;
    bool started = false;
  };

  std::optional<CellMap> wait_for_cells(ToolHandle tool, Generation generation, FrameId frame,
                                        const std::set<std::string> &cells,
                                        const std::stop_token &stop);
  bool all_done_locked() const;
  bool providers_ready_locked(std::size_t index) const;
  void start_ready_locked();
  void bump_locked();

  mutable std::mutex mutex_;
  std::condition_variable_any changed_;
  std::vector<Registered> tools_;
  std::shared_ptr<const Movie> movie_;
  std::vector<FrameId> invalidated_;
  std::stop_source run_stop_;
  std::vector<std::jthread> runs_;
  std::uint64_t marker_ = 0;
  bool shutting_down_ = false;
};

/// Fills each command frame's dependencies cell with the previous command
/// frame, giving a linear execution order.
Movie with_linear_dependencies(const Movie &movie);

} // namespace reel
