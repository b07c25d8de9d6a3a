#include "reel/movie.hpp"

#include <atomic>

#include "reel/error.hpp"

namespace reel {

const char *to_string(FrameKind kind) {
  return kind == FrameKind::command ? "command" : "comment";
}

FrameId next_frame_id() {
  static std::atomic<FrameId> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

Frame Frame::make(Range range, FrameKind kind, std::string command) {
  return Frame{next_frame_id(), range, kind, std::move(command), {}};
}

Movie Movie::from_frames(std::vector<Frame> frames, Generation generation) {
  Movie movie;
  movie.generation_ = generation;
  for (auto &frame : frames) movie.insert(std::move(frame));
  movie.validate();
  return movie;
}

void Movie::insert(Frame frame) {
  if (frame.range.start != end_) {
    throw ConsistencyError("frame does not start where the previous one ends");
  }
  end_ = frame.range.end;
  text_ += frame.command;
  auto start = frame.range.start;
  if (!by_id_.emplace(frame.id, start).second) {
    throw ConsistencyError("duplicate frame id " + std::to_string(frame.id));
  }
  frames_.emplace(start, std::move(frame));
}

const Frame *Movie::find(FrameId id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return nullptr;
  return &frames_.at(it->second);
}

std::optional<std::size_t> Movie::index_of(FrameId id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return static_cast<std::size_t>(std::distance(frames_.begin(), frames_.find(it->second)));
}

std::vector<const Frame *> Movie::frames() const {
  std::vector<const Frame *> out;
  out.reserve(frames_.size());
  for (const auto &[start, frame] : frames_) out.push_back(&frame);
  return out;
}

std::vector<FrameId> Movie::ids() const {
  std::vector<FrameId> out;
  out.reserve(frames_.size());
  for (const auto &[start, frame] : frames_) out.push_back(frame.id);
  return out;
}

Movie Movie::with_cells(FrameId id, const CellMap &cells) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw ConsistencyError("unknown frame " + std::to_string(id));
  Movie out = *this;
  auto &target = out.frames_.at(it->second).cells;
  for (const auto &[name, value] : cells) target[name] = value;
  return out;
}

Movie Movie::with_generation(Generation generation) const {
  Movie out = *this;
  out.generation_ = generation;
  return out;
}

void Movie::validate() const {
  Position cursor;
  std::string text;
  for (const auto &[start, frame] : frames_) {
    if (start != frame.range.start) throw ConsistencyError("frame keyed by a stale range");
    if (frame.range.start != cursor) throw ConsistencyError("frames are not contiguous");
    if (frame.command.empty()) throw ConsistencyError("frame with empty command text");
    if (reel::advance(frame.range.start, frame.command) != frame.range.end) {
      throw ConsistencyError("frame range does not match its command text");
    }
    if (frame.kind == FrameKind::comment &&
        (frame.cells.contains(cells::kReachedState) || frame.cells.contains(cells::kResponse))) {
      throw ConsistencyError("comment frame carries prover cells");
    }
    auto id_it = by_id_.find(frame.id);
    if (id_it == by_id_.end() || id_it->second != start) {
      throw ConsistencyError("id index out of sync");
    }
    cursor = frame.range.end;
    text += frame.command;
  }
  if (cursor != end_) throw ConsistencyError("last frame does not end at end of text");
  if (text != text_) throw ConsistencyError("frame texts do not concatenate to the document");
  if (by_id_.size() != frames_.size()) throw ConsistencyError("id index out of sync");
}

std::optional<Frame> lookup_frame(const Movie &movie, Position pos) {
  const auto &frames = movie.frames_;
  auto it = frames.upper_bound(pos);
  if (it == frames.begin()) return std::nullopt;
  --it;
  if (!it->second.range.contains(pos)) return std::nullopt;
  return it->second;
}

AffectedFrames affected_frames(const Movie &movie, Range span) {
  if (span.end < span.start || movie.end() < span.end) {
    throw OutOfBoundsError("edit span outside the document");
  }
  AffectedFrames out;
  if (movie.empty()) return out;

  auto frames = movie.frames();
  std::size_t first = frames.size();
  std::size_t last = 0;
  if (span.empty()) {
    // Insertion point: owned by the frame containing it, or the last frame
    // at end of text.
    first = frames.size() - 1;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      if (frames[i]->range.contains(span.start)) {
        first = i;
        break;
      }
    }
    last = first;
  } else {
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const auto &range = frames[i]->range;
      if (range.start < span.end && span.start < range.end) {
        first = std::min(first, i);
        last = i;
      }
    }
  }
  for (std::size_t i = first; i <= last; ++i) out.changed.push_back(frames[i]->id);
  for (std::size_t i = last + 1; i < frames.size(); ++i) out.following.push_back(frames[i]->id);
  return out;
}

Movie splice_frames(const Movie &movie, const std::vector<FrameId> &changed,
                    const std::vector<FrameId> &following, std::vector<Frame> new_frames) {
  auto frames = movie.frames();
  std::size_t first = frames.size();
  if (!changed.empty()) {
    auto idx = movie.index_of(changed.front());
    if (!idx) throw ConsistencyError("changed frame not in movie");
    first = *idx;
  } else if (!movie.empty()) {
    throw ConsistencyError("splice of a non-empty movie needs at least one changed frame");
  }
  if (first + changed.size() + following.size() != frames.size()) {
    throw ConsistencyError("changed and following frames must reach the end of the movie");
  }
  for (std::size_t i = 0; i < changed.size(); ++i) {
    if (frames[first + i]->id != changed[i]) throw ConsistencyError("changed frames not contiguous");
  }
  for (std::size_t i = 0; i < following.size(); ++i) {
    if (frames[first + changed.size() + i]->id != following[i]) {
      throw ConsistencyError("following frames out of order");
    }
  }

  Movie out;
  out.generation_ = movie.generation_ + 1;
  for (std::size_t i = 0; i < first; ++i) out.insert(*frames[i]);

  Position cursor = out.end_;
  for (auto &frame : new_frames) {
    if (frame.range.start != cursor || reel::advance(cursor, frame.command) != frame.range.end) {
      throw ConsistencyError("new frames are not contiguous with the preceding text");
    }
    frame.cells.clear();
    cursor = frame.range.end;
    out.insert(std::move(frame));
  }
  // Re-keyed by reinsertion at their shifted ranges.
  for (std::size_t i = 0; i < following.size(); ++i) {
    Frame frame = *frames[first + changed.size() + i];
    frame.range.start = cursor;
    frame.range.end = reel::advance(cursor, frame.command);
    frame.cells.clear();
    cursor = frame.range.end;
    out.insert(std::move(frame));
  }
  return out;
}

} // namespace reel
