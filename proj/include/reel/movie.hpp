#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "reel/text.hpp"

namespace reel {

using FrameId = std::uint64_t;
using Generation = std::uint64_t;

/// Tool-computed cell payloads, keyed by cell name.
using CellMap = std::map<std::string, nlohmann::json>;

namespace cells {
inline constexpr const char *kCommand = "command";
inline constexpr const char *kDependencies = "dependencies";
inline constexpr const char *kResponse = "response";
inline constexpr const char *kReachedState = "reached_state";
inline constexpr const char *kCorrectness = "correctness";
inline constexpr const char *kLinks = "links";
} // namespace cells

enum class FrameKind { command, comment };

const char *to_string(FrameKind kind);

/// Process-wide unique frame id.
FrameId next_frame_id();

/// One command or comment span. The command cell is held in `command`;
/// `cells` carries everything else.
struct Frame {
  FrameId id = 0;
  Range range;
  FrameKind kind = FrameKind::command;
  std::string command;
  CellMap cells;

  static Frame make(Range range, FrameKind kind, std::string command);
};

/// Immutable snapshot of a document: contiguous frames ordered by range
/// start, the full text, and a generation counter.
class Movie {
public:
  Movie() = default;

  /// Builds a movie from frames in document order. Throws ConsistencyError
  /// unless the frames tile their concatenated text starting at (0,0).
  static Movie from_frames(std::vector<Frame> frames, Generation generation);

  Generation generation() const { return generation_; }
  const std::string &text() const { return text_; }
  Position end() const { return end_; }
  std::size_t size() const { return frames_.size(); }
  bool empty() const { return frames_.empty(); }

  const Frame *find(FrameId id) const;
  std::optional<std::size_t> index_of(FrameId id) const;

  /// Frames in document order.
  std::vector<const Frame *> frames() const;
  std::vector<FrameId> ids() const;

  /// Copy of this movie with `cells` merged into one frame's tool cells.
  /// Same generation.
  Movie with_cells(FrameId id, const CellMap &cells) const;
  /// Copy with every frame's tool cells replaced by `fn(frame)`.
  template <typename Fn> Movie transform_cells(Fn &&fn) const {
    Movie out = *this;
    for (auto &[start, frame] : out.frames_) frame.cells = fn(static_cast<const Frame &>(frame));
    return out;
  }

  Movie with_generation(Generation generation) const;

  /// Re-checks every structural invariant; throws ConsistencyError.
  void validate() const;

private:
  friend std::optional<Frame> lookup_frame(const Movie &, Position);
  friend Movie splice_frames(const Movie &, const std::vector<FrameId> &,
                             const std::vector<FrameId> &, std::vector<Frame>);

  void insert(Frame frame);

  std::map<Position, Frame> frames_;
  std::unordered_map<FrameId, Position> by_id_;
  std::string text_;
  Position end_;
  Generation generation_ = 0;
};

/// Frame whose range contains `pos`; the end of a range belongs to the next
/// frame.
std::optional<Frame> lookup_frame(const Movie &movie, Position pos);

struct AffectedFrames {
  std::vector<FrameId> changed;
  std::vector<FrameId> following;
};

/// Frames touched by an edit of `span` and every frame after them. An empty
/// span selects the frame owning its position (the last frame at end of
/// text). Throws OutOfBoundsError if the span leaves the text.
AffectedFrames affected_frames(const Movie &movie, Range span);

/// Replaces `changed` with `new_frames` and re-keys `following` behind
/// them. Tool cells of new and following frames are cleared; earlier frames
/// are untouched. The generation is incremented.
Movie splice_frames(const Movie &movie, const std::vector<FrameId> &changed,
                    const std::vector<FrameId> &following, std::vector<Frame> new_frames);

} // namespace reel
