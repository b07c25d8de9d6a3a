#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <span>
#include <stop_token>
#include <vector>

#include "reel/movie.hpp"
#include "reel/prover.hpp"
#include "reel/scheduler.hpp"

namespace reel {

enum class Correctness { valid, invalid, unprocessed };

const char *to_string(Correctness value);

/// Cells the prover fills for one frame.
struct FrameResult {
  FrameId frame = 0;
  CellMap cells;
};

using ResultSink = std::function<void(FrameResult)>;

struct DriveOptions {
  /// Delay before every prover command; for exercising slow provers.
  std::chrono::milliseconds command_delay{0};
  std::stop_token stop;
};

/// Command frames in the order recorded by their dependencies cells, or in
/// document order when the cells are absent.
std::vector<FrameId> dependency_order(const Movie &movie);

/// Reached state recorded in a frame, undefined if there is none.
StateNumber reached_state(const Frame &frame);

/// Sends every command frame to the prover in dependency order, emitting
/// response, reached_state and correctness after each.
void drive_init(const Movie &movie, ProverBackend &prover, const ResultSink &sink,
                const DriveOptions &options = {});

/// Re-synchronizes the prover after an edit: undefine the invalidated
/// frames and everything after them, back up to the highest state among
/// the remaining predecessors, replay what an overshoot skipped and then
/// execute every undefined frame.
void drive_on_change(const Movie &movie, std::span<const FrameId> invalidated, ProverBackend &prover,
                     const ResultSink &sink, const DriveOptions &options = {});

std::vector<FrameResult> drive_init(const Movie &movie, ProverBackend &prover);
std::vector<FrameResult> drive_on_change(const Movie &movie, std::span<const FrameId> invalidated,
                                         ProverBackend &prover);

/// Movie with the results merged in.
Movie apply_results(const Movie &movie, const std::vector<FrameResult> &results);

struct ProverToolOptions {
  std::chrono::milliseconds command_delay{0};
};

/// Prover as a scheduled tool: requires {command, dependencies}, provides
/// {response, reached_state, correctness}.
ToolDescriptor make_prover_tool(std::shared_ptr<ProverBackend> prover, ProverToolOptions options = {});

} // namespace reel
