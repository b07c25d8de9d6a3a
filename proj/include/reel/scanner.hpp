#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reel/movie.hpp"

namespace reel {

struct Token {
  Range range;
  FrameKind kind = FrameKind::command;
  std::string text;

  friend bool operator==(const Token &, const Token &) = default;
};

struct ScanResult {
  std::vector<Token> tokens;
  /// False when the input ran out mid-token: an unterminated command, an
  /// unclosed comment or trailing whitespace with nothing after it.
  bool closed = true;
};

/// Splits a proof script into command and comment tokens.
///
/// A command ends at '.' followed by whitespace or end of input. Comments
/// `(* ... *)` nest; inside a command they and double-quoted strings are
/// skipped. Whitespace before a token belongs to that token. A trailing run
/// of whitespace becomes a blank comment token.
std::vector<Token> scan_commands(std::string_view text);

/// Scans a fragment that starts at `base` in a larger document. `lookahead`
/// is the character right after the fragment, or nullopt at end of text.
ScanResult scan_fragment(std::u32string_view fragment, Position base,
                         std::optional<char32_t> lookahead);

bool is_script_space(char32_t c);

} // namespace reel
