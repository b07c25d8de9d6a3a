#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace reel {

/// Replace `delete_len` code points at `at` (an offset into the old text)
/// with `insert`.
struct PatchOp {
  std::size_t at = 0;
  std::size_t delete_len = 0;
  std::string insert;

  friend bool operator==(const PatchOp &, const PatchOp &) = default;
};

/// Ops sorted by `at`, non-overlapping, all relative to the old text.
struct Patch {
  std::vector<PatchOp> ops;

  bool empty() const { return ops.empty(); }
  /// Net change in length, in code points.
  std::ptrdiff_t length_delta() const;
};

/// Computes a patch turning `old_text` into `new_text`.
Patch text_diff(std::string_view old_text, std::string_view new_text);

/// Throws PatchError when an op is out of bounds, unsorted or overlapping.
std::string apply_patch(std::string_view old_text, const Patch &patch);
std::u32string apply_patch(std::u32string_view old_text, const Patch &patch);

} // namespace reel
