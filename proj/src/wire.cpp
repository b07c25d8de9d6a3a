#include "reel/wire.hpp"

namespace reel {

nlohmann::json wire_frame(const Frame &frame, const CellMap &cells) {
  nlohmann::json out = {{"id", frame.id},
                        {"start_line", frame.range.start.line},
                        {"start_char", frame.range.start.character},
                        {"end_line", frame.range.end.line},
                        {"end_char", frame.range.end.character},
                        {"kind", to_string(frame.kind)}};
  auto &cell_json = out["cells"] = nlohmann::json::object();
  for (const auto &[name, value] : cells) cell_json[name] = value;
  return out;
}

nlohmann::json snapshot_message(const Movie &movie, bool all_done, std::uint64_t marker,
                                const DataSource &data) {
  auto frames = nlohmann::json::array();
  for (const Frame *frame : movie.frames()) {
    frames.push_back(wire_frame(*frame, data(frame->id).value_or(CellMap{})));
  }
  return {{"generation", movie.generation()},
          {"all_done", all_done},
          {"marker", marker},
          {"frames", std::move(frames)}};
}

Range wire_range(const nlohmann::json &frame) {
  return {{frame.at("start_line").get<std::size_t>(), frame.at("start_char").get<std::size_t>()},
          {frame.at("end_line").get<std::size_t>(), frame.at("end_char").get<std::size_t>()}};
}

} // namespace reel
