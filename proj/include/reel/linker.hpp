#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "reel/movie.hpp"
#include "reel/scheduler.hpp"

namespace reel {

/// Reference from a word in a command to the frame declaring that lemma.
/// `range` is relative to the start of the frame's command text.
struct Link {
  Range range;
  FrameId target = 0;
  std::string name;

  friend bool operator==(const Link &, const Link &) = default;
};

nlohmann::json to_json(const std::vector<Link> &links);

/// Lemma declared by a command ("Lemma foo: ..." or "Theorem foo: ..."),
/// if any.
std::optional<std::string> declared_lemma(std::string_view command);

/// For every command frame: whole-word occurrences of lemma names declared
/// in an earlier frame.
std::map<FrameId, std::vector<Link>> link_frames(const Movie &movie);

/// requires {command}, provides {links}.
ToolDescriptor make_linker_tool();

} // namespace reel
