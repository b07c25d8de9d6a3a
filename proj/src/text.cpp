#include "reel/text.hpp"

#include <algorithm>

#include "reel/error.hpp"

namespace reel {

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    auto lead = static_cast<unsigned char>(text[i]);
    std::size_t extra = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      cp = lead & 0x1F;
      extra = 1;
    } else if ((lead & 0xF0) == 0xE0) {
      cp = lead & 0x0F;
      extra = 2;
    } else if ((lead & 0xF8) == 0xF0) {
      cp = lead & 0x07;
      extra = 3;
    } else {
      // Stray continuation or invalid lead byte.
      out.push_back(U'�');
      ++i;
      continue;
    }
    if (i + extra >= text.size()) {
      out.push_back(U'�');
      break;
    }
    bool valid = true;
    for (std::size_t k = 1; k <= extra; ++k) {
      auto byte = static_cast<unsigned char>(text[i + k]);
      if ((byte & 0xC0) != 0x80) {
        valid = false;
        break;
      }
      cp = (cp << 6) | (byte & 0x3F);
    }
    if (!valid) {
      out.push_back(U'�');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

std::string encode_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

Position advance(Position from, std::u32string_view text) {
  for (char32_t c : text) {
    if (c == U'\n') {
      ++from.line;
      from.character = 0;
    } else {
      ++from.character;
    }
  }
  return from;
}

Position advance(Position from, std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    auto byte = static_cast<unsigned char>(text[i]);
    if (byte == '\n') {
      ++from.line;
      from.character = 0;
    } else if ((byte & 0xC0) != 0x80) {
      ++from.character;
    }
  }
  return from;
}

TextIndex::TextIndex(std::string_view utf8) : text_(decode_utf8(utf8)) {
  line_starts_.push_back(0);
  for (std::size_t i = 0; i < text_.size(); ++i) {
    if (text_[i] == U'\n') line_starts_.push_back(i + 1);
  }
}

Position TextIndex::position_of(std::size_t offset) const {
  if (offset > text_.size()) {
    throw OutOfBoundsError("offset " + std::to_string(offset) + " past end of text");
  }
  auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
  auto line = static_cast<std::size_t>(std::distance(line_starts_.begin(), it)) - 1;
  return {line, offset - line_starts_[line]};
}

std::size_t TextIndex::offset_of(Position pos) const {
  if (pos.line >= line_starts_.size()) {
    throw OutOfBoundsError("line " + std::to_string(pos.line) + " past end of text");
  }
  std::size_t line_end = pos.line + 1 < line_starts_.size()
                             ? line_starts_[pos.line + 1] - 1
                             : text_.size();
  std::size_t offset = line_starts_[pos.line] + pos.character;
  if (offset > line_end) {
    throw OutOfBoundsError("character " + std::to_string(pos.character) +
                           " past end of line " + std::to_string(pos.line));
  }
  return offset;
}

std::string TextIndex::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > text_.size()) throw OutOfBoundsError("slice out of range");
  return encode_utf8(std::u32string_view(text_).substr(begin, end - begin));
}

} // namespace reel
