#pragma once

#include <functional>
#include <optional>

#include <nlohmann/json.hpp>

#include "reel/movie.hpp"

namespace reel {

/// Frame as sent to the editor: its range and cells. The command text is
/// left out; the client already has it.
nlohmann::json wire_frame(const Frame &frame, const CellMap &cells);

using DataSource = std::function<std::optional<CellMap>(FrameId)>;

/// {generation, all_done, marker, frames[]}, with each frame's cells taken
/// from `data`.
nlohmann::json snapshot_message(const Movie &movie, bool all_done, std::uint64_t marker,
                                const DataSource &data);

/// Range of a wire frame.
Range wire_range(const nlohmann::json &frame);

} // namespace reel
