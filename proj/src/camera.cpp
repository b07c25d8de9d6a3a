#include "reel/camera.hpp"

#include "reel/diff.hpp"
#include "reel/error.hpp"
#include "reel/scanner.hpp"

namespace reel {
namespace {

std::vector<Frame> to_frames(std::vector<Token> tokens) {
  std::vector<Frame> frames;
  frames.reserve(tokens.size());
  for (auto &token : tokens) frames.push_back(Frame::make(token.range, token.kind, std::move(token.text)));
  return frames;
}

} // namespace

Movie build_movie(std::string_view text, Generation generation) {
  return Movie::from_frames(to_frames(scan_commands(text)), generation);
}

CameraResult camera(const Movie &old_movie, std::string_view new_text) {
  // 1. The old commands as a single text.
  const std::string &old_text = old_movie.text();
  if (old_text == new_text) return {old_movie.with_generation(old_movie.generation() + 1), {}};

  // 2. Where the texts differ.
  Patch patch = text_diff(old_text, new_text);
  TextIndex old_index(old_text);
  TextIndex new_index(new_text);
  const auto &new_points = new_index.code_points();
  Range span{old_index.position_of(patch.ops.front().at),
             old_index.position_of(patch.ops.back().at + patch.ops.back().delete_len)};

  // 3. Frames to re-scan, and the ones after them.
  AffectedFrames affected = affected_frames(old_movie, span);
  auto frames = old_movie.frames();
  if (!affected.changed.empty()) {
    // A command ending in '.' stays terminated only while the character
    // after it is whitespace; pull the previous frame in if the edit broke
    // that.
    std::size_t first = *old_movie.index_of(affected.changed.front());
    if (first > 0 && frames[first - 1]->kind == FrameKind::command) {
      std::size_t boundary = old_index.offset_of(frames[first - 1]->range.end);
      if (boundary < new_points.size() && !is_script_space(new_points[boundary])) {
        affected.changed.insert(affected.changed.begin(), frames[first - 1]->id);
      }
    }
  }

  const auto delta = static_cast<std::ptrdiff_t>(new_points.size()) -
                     static_cast<std::ptrdiff_t>(old_index.size());
  std::size_t begin = affected.changed.empty()
                          ? 0
                          : old_index.offset_of(old_movie.find(affected.changed.front())->range.start);
  std::vector<Token> tokens;
  while (true) {
    std::size_t old_end = affected.changed.empty()
                              ? 0
                              : old_index.offset_of(old_movie.find(affected.changed.back())->range.end);
    // Apply the patch to the changed fragment.
    Patch local;
    for (const auto &op : patch.ops) local.ops.push_back({op.at - begin, op.delete_len, op.insert});
    auto old_fragment = std::u32string_view(old_index.code_points()).substr(begin, old_end - begin);
    std::u32string fragment = apply_patch(old_fragment, local);
    auto new_end = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(old_end) + delta);
    if (fragment != std::u32string_view(new_points).substr(begin, new_end - begin)) {
      throw ConsistencyError("patched fragment disagrees with the new text");
    }

    // 4. Parse it. If the scan ran off the end of the fragment the next
    // frame is part of the same token; absorb it and retry.
    std::optional<char32_t> lookahead;
    if (new_end < new_points.size()) lookahead = new_points[new_end];
    ScanResult scanned = scan_fragment(fragment, new_index.position_of(begin), lookahead);
    if (scanned.closed || affected.following.empty()) {
      tokens = std::move(scanned.tokens);
      break;
    }
    affected.changed.push_back(affected.following.front());
    affected.following.erase(affected.following.begin());
  }

  // 5. Splice in the new frames; following frames are re-keyed and cleared.
  CameraResult result;
  auto new_frames = to_frames(std::move(tokens));
  for (const auto &frame : new_frames) result.invalidated.push_back(frame.id);
  result.invalidated.insert(result.invalidated.end(), affected.following.begin(),
                            affected.following.end());
  result.movie = splice_frames(old_movie, affected.changed, affected.following, std::move(new_frames));
  return result;
}

} // namespace reel
