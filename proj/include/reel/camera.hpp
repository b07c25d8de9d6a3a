#pragma once

#include <string_view>
#include <vector>

#include "reel/movie.hpp"

namespace reel {

struct CameraResult {
  Movie movie;
  /// New frames plus re-keyed following frames, in document order.
  std::vector<FrameId> invalidated;
};

/// Parses `text` from scratch into a movie at `generation`.
Movie build_movie(std::string_view text, Generation generation = 0);

/// Rebuilds `old_movie` for `new_text`: diff the texts, re-scan only the
/// frames the patch touches and splice the result in. Frames before the
/// edit keep their cells; the generation always advances by one.
CameraResult camera(const Movie &old_movie, std::string_view new_text);

} // namespace reel
