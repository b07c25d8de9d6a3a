#include "reel/scanner.hpp"

namespace reel {
namespace {

class Cursor {
public:
  Cursor(std::u32string_view text, std::optional<char32_t> lookahead)
      : text_(text), lookahead_(lookahead) {}

  bool done() const { return pos_ >= text_.size(); }
  std::size_t pos() const { return pos_; }
  char32_t peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : U'\0';
  }
  bool at(std::u32string_view s) const { return text_.substr(pos_).starts_with(s); }
  void bump(std::size_t n = 1) { pos_ += n; }

  /// '.' at the cursor is followed by whitespace or the end of the document.
  bool at_terminator() const {
    if (peek() != U'.') return false;
    if (pos_ + 1 < text_.size()) return is_script_space(text_[pos_ + 1]);
    return !lookahead_ || is_script_space(*lookahead_);
  }

  /// Consumes a comment starting at "(*". Returns false if input ran out.
  bool skip_comment() {
    int depth = 0;
    while (!done()) {
      if (at(U"(*")) {
        ++depth;
        bump(2);
      } else if (at(U"*)")) {
        --depth;
        bump(2);
        if (depth == 0) return true;
      } else {
        bump();
      }
    }
    return false;
  }

  bool skip_string() {
    bump();
    while (!done()) {
      if (peek() == U'"') {
        bump();
        return true;
      }
      bump();
    }
    return false;
  }

private:
  std::u32string_view text_;
  std::optional<char32_t> lookahead_;
  std::size_t pos_ = 0;
};

} // namespace

bool is_script_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v';
}

ScanResult scan_fragment(std::u32string_view fragment, Position base,
                         std::optional<char32_t> lookahead) {
  ScanResult result;
  Cursor cur(fragment, lookahead);
  Position at = base;

  auto emit = [&](std::size_t begin, FrameKind kind) {
    auto piece = fragment.substr(begin, cur.pos() - begin);
    Position end = reel::advance(at, piece);
    result.tokens.push_back(Token{{at, end}, kind, encode_utf8(piece)});
    at = end;
  };

  while (!cur.done()) {
    std::size_t begin = cur.pos();
    while (!cur.done() && is_script_space(cur.peek())) cur.bump();
    if (cur.done()) {
      emit(begin, FrameKind::comment);
      result.closed = false;
      break;
    }
    if (cur.at(U"(*")) {
      bool closed = cur.skip_comment();
      emit(begin, FrameKind::comment);
      result.closed = closed;
      continue;
    }
    bool terminated = false;
    while (!cur.done()) {
      if (cur.at(U"(*")) {
        if (!cur.skip_comment()) break;
      } else if (cur.peek() == U'"') {
        if (!cur.skip_string()) break;
      } else if (cur.at_terminator()) {
        cur.bump();
        terminated = true;
        break;
      } else {
        cur.bump();
      }
    }
    emit(begin, FrameKind::command);
    result.closed = terminated;
  }
  return result;
}

std::vector<Token> scan_commands(std::string_view text) {
  auto code_points = decode_utf8(text);
  return scan_fragment(code_points, Position{}, std::nullopt).tokens;
}

} // namespace reel
