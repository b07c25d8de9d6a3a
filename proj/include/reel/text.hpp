#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace reel {

/// Zero-based line and character. Characters are counted in code points.
struct Position {
  std::size_t line = 0;
  std::size_t character = 0;

  friend auto operator<=>(const Position &, const Position &) = default;
};

/// Half-open span [start, end).
struct Range {
  Position start;
  Position end;

  bool empty() const { return !(start < end); }
  bool contains(Position pos) const { return start <= pos && pos < end; }

  friend bool operator==(const Range &, const Range &) = default;
};

std::u32string decode_utf8(std::string_view text);
std::string encode_utf8(std::u32string_view text);

/// Position reached after walking over `text` starting at `from`.
Position advance(Position from, std::string_view text);
Position advance(Position from, std::u32string_view text);

/// Code-point view of a text with offset <-> position conversion.
class TextIndex {
public:
  explicit TextIndex(std::string_view utf8);

  const std::u32string &code_points() const { return text_; }
  std::size_t size() const { return text_.size(); }
  Position end() const { return position_of(text_.size()); }

  Position position_of(std::size_t offset) const;
  /// Throws OutOfBoundsError if `pos` lies outside the text.
  std::size_t offset_of(Position pos) const;

  std::string slice(std::size_t begin, std::size_t end) const;

private:
  std::u32string text_;
  std::vector<std::size_t> line_starts_;
};

} // namespace reel
