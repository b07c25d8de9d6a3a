#include "reel/scheduler.hpp"

#include <algorithm>
#include <exception>

#include <spdlog/spdlog.h>

namespace reel {
namespace {

bool intersects(const std::set<std::string> &a, const std::set<std::string> &b) {
  return std::any_of(a.begin(), a.end(), [&](const std::string &x) { return b.contains(x); });
}

bool has_cycle(const std::vector<const ToolDescriptor *> &tools) {
  const std::size_t n = tools.size();
  // 0 = unvisited, 1 = on stack, 2 = finished
  std::vector<int> mark(n, 0);
  std::function<bool(std::size_t)> visit = [&](std::size_t u) {
    mark[u] = 1;
    for (std::size_t v = 0; v < n; ++v) {
      if (!intersects(tools[u]->provided_cells, tools[v]->required_cells)) continue;
      if (mark[v] == 1) return true;
      if (mark[v] == 0 && visit(v)) return true;
    }
    mark[u] = 2;
    return false;
  };
  for (std::size_t u = 0; u < n; ++u) {
    if (mark[u] == 0 && visit(u)) return true;
  }
  return false;
}

} // namespace

ToolContext::ToolContext(Scheduler &scheduler, ToolHandle handle, std::shared_ptr<const Movie> movie,
                         std::vector<FrameId> invalidated, std::stop_token stop)
    : scheduler_(scheduler), handle_(handle), movie_(std::move(movie)),
      invalidated_(std::move(invalidated)), stop_(std::move(stop)) {}

bool ToolContext::submit(FrameId frame, CellMap cells) {
  return scheduler_.submit_result(handle_, ToolResult{generation(), frame, std::move(cells)});
}

std::optional<CellMap> ToolContext::wait_for(FrameId frame, const std::set<std::string> &cells) {
  return scheduler_.wait_for_cells(handle_, generation(), frame, cells, stop_);
}

void ToolContext::mark_done() { scheduler_.mark_done(handle_, generation()); }

Movie with_linear_dependencies(const Movie &movie) {
  std::optional<FrameId> previous;
  std::map<FrameId, std::optional<FrameId>> before;
  for (const Frame *frame : movie.frames()) {
    if (frame->kind != FrameKind::command) continue;
    before[frame->id] = previous;
    previous = frame->id;
  }
  return movie.transform_cells([&](const Frame &frame) {
    CellMap cells = frame.cells;
    if (frame.kind == FrameKind::command) {
      auto deps = nlohmann::json::array();
      if (auto prev = before.at(frame.id)) deps.push_back(*prev);
      cells[cells::kDependencies] = std::move(deps);
    }
    return cells;
  });
}

Scheduler::Scheduler() : movie_(std::make_shared<const Movie>()) {}

Scheduler::~Scheduler() {
  shutdown();
  cancel_runs();
}

ToolHandle Scheduler::register_tool(ToolDescriptor descriptor) {
  std::lock_guard lock(mutex_);
  for (const char *reserved : {cells::kCommand, cells::kDependencies}) {
    if (descriptor.provided_cells.contains(reserved)) {
      throw ConflictError("tool " + descriptor.name + " may not provide the " + reserved + " cell");
    }
  }
  for (const auto &other : tools_) {
    if (intersects(other.descriptor.provided_cells, descriptor.provided_cells)) {
      throw ConflictError("tool " + descriptor.name + " provides a cell already provided by " +
                          other.descriptor.name);
    }
  }
  std::vector<const ToolDescriptor *> all;
  for (const auto &other : tools_) all.push_back(&other.descriptor);
  all.push_back(&descriptor);
  if (has_cycle(all)) {
    throw CycleError("registering " + descriptor.name + " would make the cell graph cyclic");
  }
  Registered entry;
  entry.descriptor = std::move(descriptor);
  // Nothing has been scheduled for the current movie yet.
  entry.done_for = movie_->generation();
  entry.reported = true;
  tools_.push_back(std::move(entry));
  return ToolHandle{tools_.size() - 1};
}

void Scheduler::cancel_runs() {
  std::vector<std::jthread> old;
  {
    std::lock_guard lock(mutex_);
    run_stop_.request_stop();
    old.swap(runs_);
    changed_.notify_all();
  }
  old.clear();  // joins
}

void Scheduler::notify_update(Movie movie, std::vector<FrameId> invalidated) {
  cancel_runs();
  std::lock_guard lock(mutex_);
  if (movie.generation() <= movie_->generation()) {
    throw ConsistencyError("generation " + std::to_string(movie.generation()) +
                           " does not advance past " + std::to_string(movie_->generation()));
  }
  movie_ = std::make_shared<const Movie>(with_linear_dependencies(movie));
  invalidated_ = std::move(invalidated);
  run_stop_ = std::stop_source{};
  for (auto &tool : tools_) {
    tool.done_for.reset();
    tool.reported = false;
    tool.started = false;
  }
  bump_locked();
  start_ready_locked();
}

bool Scheduler::providers_ready_locked(std::size_t index) const {
  const auto &required = tools_[index].descriptor.required_cells;
  for (std::size_t i = 0; i < tools_.size(); ++i) {
    if (i == index) continue;
    if (intersects(tools_[i].descriptor.provided_cells, required) && !tools_[i].reported) return false;
  }
  return true;
}

void Scheduler::start_ready_locked() {
  if (run_stop_.stop_requested() || shutting_down_) return;
  for (std::size_t i = 0; i < tools_.size(); ++i) {
    auto &tool = tools_[i];
    if (tool.started || tool.done_for || !providers_ready_locked(i)) continue;
    tool.started = true;
    ToolHandle handle{i};
    auto run = tool.descriptor.run;
    auto name = tool.descriptor.name;
    auto movie = movie_;
    auto invalidated = invalidated_;
    auto stop = run_stop_.get_token();
    runs_.emplace_back([this, handle, run, name, movie, invalidated, stop]() mutable {
      ToolContext context(*this, handle, movie, std::move(invalidated), stop);
      try {
        if (run) run(context);
      } catch (const std::exception &e) {
        spdlog::error("tool {} failed: {}", name, e.what());
      }
      if (!stop.stop_requested()) mark_done(handle, movie->generation());
    });
  }
}

void Scheduler::bump_locked() {
  ++marker_;
  changed_.notify_all();
}

bool Scheduler::submit_result(ToolHandle tool, ToolResult result) {
  std::lock_guard lock(mutex_);
  const auto &provides = tools_.at(tool.index).descriptor.provided_cells;
  for (const auto &[name, value] : result.cells) {
    if (!provides.contains(name)) {
      throw ProvidesViolation("tool " + tools_[tool.index].descriptor.name + " wrote cell " + name);
    }
  }
  if (result.generation != movie_->generation()) return false;
  const Frame *frame = movie_->find(result.frame);
  if (frame == nullptr) return false;
  if (frame->kind == FrameKind::comment &&
      (result.cells.contains(cells::kReachedState) || result.cells.contains(cells::kResponse))) {
    throw ProvidesViolation("prover cells written to a comment frame");
  }
  movie_ = std::make_shared<const Movie>(movie_->with_cells(result.frame, result.cells));
  tools_[tool.index].reported = true;
  bump_locked();
  start_ready_locked();
  return true;
}

void Scheduler::mark_done(ToolHandle tool, Generation generation) {
  std::lock_guard lock(mutex_);
  if (generation != movie_->generation()) return;
  auto &entry = tools_.at(tool.index);
  if (entry.done_for == generation) return;
  entry.done_for = generation;
  entry.reported = true;
  bump_locked();
  start_ready_locked();
}

bool Scheduler::all_done_locked() const {
  return std::all_of(tools_.begin(), tools_.end(), [&](const Registered &tool) {
    return tool.done_for == movie_->generation();
  });
}

bool Scheduler::all_done() const {
  std::lock_guard lock(mutex_);
  return all_done_locked();
}

std::optional<CellMap> Scheduler::get_data(FrameId frame) const {
  std::lock_guard lock(mutex_);
  const Frame *found = movie_->find(frame);
  if (found == nullptr) return std::nullopt;
  CellMap cells = found->cells;
  cells.erase(cells::kDependencies);
  return cells;
}

std::shared_ptr<const Movie> Scheduler::snapshot() const {
  std::lock_guard lock(mutex_);
  return movie_;
}

Generation Scheduler::generation() const {
  std::lock_guard lock(mutex_);
  return movie_->generation();
}

Observation Scheduler::observe() const {
  std::lock_guard lock(mutex_);
  return {movie_, all_done_locked(), marker_};
}

std::optional<Observation> Scheduler::wait_for_change(std::optional<std::uint64_t> seen,
                                                      Generation since,
                                                      std::chrono::steady_clock::time_point deadline) {
  std::unique_lock lock(mutex_);
  bool ready = changed_.wait_until(lock, deadline, [&] {
    if (shutting_down_) return true;
    return movie_->generation() >= since && (!seen || *seen != marker_);
  });
  if (!ready || shutting_down_) return std::nullopt;
  return Observation{movie_, all_done_locked(), marker_};
}

bool Scheduler::wait_all_done(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  return changed_.wait_for(lock, timeout, [&] { return all_done_locked(); });
}

std::optional<CellMap> Scheduler::wait_for_cells(ToolHandle tool, Generation generation,
                                                 FrameId frame, const std::set<std::string> &cells,
                                                 const std::stop_token &stop) {
  std::unique_lock lock(mutex_);
  auto satisfied = [&] {
    if (movie_->generation() != generation) return true;
    const Frame *found = movie_->find(frame);
    if (found == nullptr) return true;
    if (std::all_of(cells.begin(), cells.end(),
                    [&](const std::string &c) { return c == cells::kCommand || found->cells.contains(c); })) {
      return true;
    }
    for (std::size_t i = 0; i < tools_.size(); ++i) {
      if (i == tool.index) continue;
      if (intersects(tools_[i].descriptor.provided_cells, cells) && tools_[i].done_for != generation) {
        return false;
      }
    }
    return true;
  };
  if (!changed_.wait(lock, stop, satisfied)) return std::nullopt;
  if (movie_->generation() != generation) return std::nullopt;
  const Frame *found = movie_->find(frame);
  if (found == nullptr) return std::nullopt;
  return found->cells;
}

void Scheduler::shutdown() {
  std::lock_guard lock(mutex_);
  shutting_down_ = true;
  changed_.notify_all();
}

} // namespace reel
