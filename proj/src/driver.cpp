#include "reel/driver.hpp"

#include <algorithm>
#include <condition_variable>
#include <mutex>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace reel {
namespace {

CellMap cells_for(const ProverReply &reply, Correctness correctness) {
  return {{cells::kResponse, reply.response},
          {cells::kReachedState, reply.new_state.value()},
          {cells::kCorrectness, to_string(correctness)}};
}

CellMap unprocessed_cells(const std::string &why) {
  return {{cells::kResponse, why},
          {cells::kReachedState, StateNumber::undefined().value()},
          {cells::kCorrectness, to_string(Correctness::unprocessed)}};
}

bool recorded_valid(const Frame &frame) {
  auto it = frame.cells.find(cells::kCorrectness);
  return it != frame.cells.end() && it->second == to_string(Correctness::valid);
}

/// Waits out the configured delay. False if the run was cancelled.
bool pace(const DriveOptions &options) {
  if (options.command_delay.count() > 0) {
    std::mutex mutex;
    std::condition_variable_any cv;
    std::unique_lock lock(mutex);
    cv.wait_for(lock, options.stop, options.command_delay, [] { return false; });
  }
  return !options.stop.stop_requested();
}

class Run {
public:
  Run(const Movie &movie, ProverBackend &prover, const ResultSink &sink, const DriveOptions &options)
      : movie_(movie), prover_(prover), sink_(sink), options_(options) {}

  /// Executes `order[from..]`, emitting cells after each frame.
  void execute_from(const std::vector<FrameId> &order, std::size_t from) {
    for (std::size_t i = from; i < order.size(); ++i) {
      if (!pace(options_)) return;
      const Frame &frame = *movie_.find(order[i]);
      try {
        StateNumber before = prover_.state();
        ProverReply reply = prover_.execute(frame.command);
        bool advanced = reply.ok && reply.new_state == before.next();
        sink_({frame.id, cells_for(reply, advanced ? Correctness::valid : Correctness::invalid)});
      } catch (const BackendError &e) {
        abandon(order, i, e.what());
        return;
      }
    }
  }

  /// Marks `order[from..]` unprocessed after the backend failed.
  void abandon(const std::vector<FrameId> &order, std::size_t from, const std::string &why) {
    for (std::size_t i = from; i < order.size(); ++i) {
      sink_({order[i], unprocessed_cells("Prover unavailable: " + why)});
    }
  }

  const Movie &movie_;
  ProverBackend &prover_;
  const ResultSink &sink_;
  const DriveOptions &options_;
};

} // namespace

const char *to_string(Correctness value) {
  switch (value) {
  case Correctness::valid:
    return "valid";
  case Correctness::invalid:
    return "invalid";
  case Correctness::unprocessed:
    return "unprocessed";
  }
  return "unprocessed";
}

StateNumber reached_state(const Frame &frame) {
  auto it = frame.cells.find(cells::kReachedState);
  if (it == frame.cells.end() || !it->second.is_number_integer()) return StateNumber::undefined();
  return StateNumber{it->second.get<int>()};
}

std::vector<FrameId> dependency_order(const Movie &movie) {
  std::vector<const Frame *> commands;
  for (const Frame *frame : movie.frames()) {
    if (frame->kind == FrameKind::command) commands.push_back(frame);
  }
  std::vector<FrameId> order;
  bool annotated = std::all_of(commands.begin(), commands.end(), [](const Frame *f) {
    auto it = f->cells.find(cells::kDependencies);
    return it != f->cells.end() && it->second.is_array();
  });
  if (!annotated) {
    for (const Frame *frame : commands) order.push_back(frame->id);
    return order;
  }

  // Kahn's algorithm, ties broken by document position.
  std::unordered_map<FrameId, std::size_t> position;
  for (std::size_t i = 0; i < commands.size(); ++i) position[commands[i]->id] = i;
  std::vector<std::size_t> pending(commands.size(), 0);
  std::vector<std::vector<std::size_t>> dependents(commands.size());
  for (std::size_t i = 0; i < commands.size(); ++i) {
    for (const auto &dep : commands[i]->cells.at(cells::kDependencies)) {
      auto it = position.find(dep.get<FrameId>());
      if (it == position.end()) continue;
      dependents[it->second].push_back(i);
      ++pending[i];
    }
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (pending[i] == 0) ready.push(i);
  }
  while (!ready.empty()) {
    std::size_t i = ready.top();
    ready.pop();
    order.push_back(commands[i]->id);
    for (std::size_t d : dependents[i]) {
      if (--pending[d] == 0) ready.push(d);
    }
  }
  // Frames on a dependency cycle run last, in document order.
  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (pending[i] != 0) order.push_back(commands[i]->id);
  }
  return order;
}

void drive_init(const Movie &movie, ProverBackend &prover, const ResultSink &sink,
                const DriveOptions &options) {
  auto order = dependency_order(movie);
  if (order.empty()) return;
  Run run(movie, prover, sink, options);
  if (prover.state() > StateNumber::initial()) {
    if (!pace(options)) return;
    try {
      prover.back_to(StateNumber::initial());
    } catch (const BackendError &e) {
      run.abandon(order, 0, e.what());
      return;
    }
  }
  run.execute_from(order, 0);
}

void drive_on_change(const Movie &movie, std::span<const FrameId> invalidated, ProverBackend &prover,
                     const ResultSink &sink, const DriveOptions &options) {
  auto order = dependency_order(movie);
  if (order.empty()) return;

  // 1. Invalidated frames and everything after the earliest one are undefined.
  std::size_t earliest = movie.size();
  for (FrameId id : invalidated) {
    if (auto index = movie.index_of(id)) earliest = std::min(earliest, *index);
  }
  std::vector<StateNumber> reached;
  reached.reserve(order.size());
  for (FrameId id : order) {
    bool stale = *movie.index_of(id) >= earliest;
    reached.push_back(stale ? StateNumber::undefined() : reached_state(*movie.find(id)));
  }
  auto first_undefined = static_cast<std::size_t>(
      std::find_if(reached.begin(), reached.end(), [](StateNumber s) { return !s.defined(); }) -
      reached.begin());
  if (first_undefined == order.size()) return;

  // 2. Highest state among the frames the first undefined one depends on.
  StateNumber target = StateNumber::initial();
  for (std::size_t i = 0; i < first_undefined; ++i) target = std::max(target, reached[i]);

  Run run(movie, prover, sink, options);
  try {
    // 3. Back up; a finished proof may make the prover overshoot.
    StateNumber landed = prover.state();
    if (landed > target) {
      if (!pace(options)) return;
      landed = prover.back_to(target).new_state;
    }

    // 4. Replay what the overshoot undid. Frames recorded invalid never
    // advanced the state and are skipped.
    for (std::size_t i = 0; i < first_undefined; ++i) {
      if (!(landed < reached[i] && reached[i] <= target)) continue;
      const Frame &frame = *movie.find(order[i]);
      if (!recorded_valid(frame)) continue;
      if (!pace(options)) return;
      StateNumber before = prover.state();
      ProverReply reply = prover.execute(frame.command);
      if (!reply.ok || reply.new_state != reached[i] || reply.new_state != before.next()) {
        sink({frame.id, cells_for(reply, Correctness::invalid)});
      }
    }
  } catch (const BackendError &e) {
    run.abandon(order, first_undefined, e.what());
    return;
  }

  // 5. Everything still undefined, in order.
  run.execute_from(order, first_undefined);
}

std::vector<FrameResult> drive_init(const Movie &movie, ProverBackend &prover) {
  std::vector<FrameResult> results;
  drive_init(movie, prover, [&](FrameResult r) { results.push_back(std::move(r)); });
  return results;
}

std::vector<FrameResult> drive_on_change(const Movie &movie, std::span<const FrameId> invalidated,
                                         ProverBackend &prover) {
  std::vector<FrameResult> results;
  drive_on_change(movie, invalidated, prover, [&](FrameResult r) { results.push_back(std::move(r)); });
  return results;
}

Movie apply_results(const Movie &movie, const std::vector<FrameResult> &results) {
  std::unordered_map<FrameId, std::vector<const CellMap *>> by_frame;
  for (const auto &result : results) by_frame[result.frame].push_back(&result.cells);
  return movie.transform_cells([&](const Frame &frame) {
    CellMap cells = frame.cells;
    if (auto it = by_frame.find(frame.id); it != by_frame.end()) {
      for (const CellMap *update : it->second) {
        for (const auto &[name, value] : *update) cells[name] = value;
      }
    }
    return cells;
  });
}

ToolDescriptor make_prover_tool(std::shared_ptr<ProverBackend> prover, ProverToolOptions options) {
  ToolDescriptor tool;
  tool.name = "prover";
  tool.required_cells = {cells::kCommand, cells::kDependencies};
  tool.provided_cells = {cells::kResponse, cells::kReachedState, cells::kCorrectness};
  tool.run = [prover = std::move(prover), options](ToolContext &context) {
    DriveOptions drive{options.command_delay, context.stop_token()};
    drive_on_change(
        context.movie(), context.invalidated(), *prover,
        [&](FrameResult result) { context.submit(result.frame, std::move(result.cells)); }, drive);
  };
  return tool;
}

} // namespace reel
