#include "reel/diff.hpp"

#include <algorithm>
#include <optional>

#include "reel/error.hpp"
#include "reel/text.hpp"

namespace reel {
namespace {

// Above this edit distance the middle section is sent as one replacement.
constexpr std::size_t kMaxEditDistance = 1024;

enum class Step : unsigned char { keep, remove, add };

// Myers' O((N+M)D) shortest edit script. Returns nullopt past the cap.
std::optional<std::vector<Step>> shortest_edit(std::u32string_view a, std::u32string_view b) {
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  const auto m = static_cast<std::ptrdiff_t>(b.size());
  const std::ptrdiff_t max_d = std::min<std::ptrdiff_t>(n + m, kMaxEditDistance);
  const std::ptrdiff_t offset = max_d + 1;
  std::vector<std::ptrdiff_t> v(2 * offset + 1, 0);
  std::vector<std::vector<std::ptrdiff_t>> trace;

  for (std::ptrdiff_t d = 0; d <= max_d; ++d) {
    trace.emplace_back(v.begin() + (offset - d - 1), v.begin() + (offset + d + 2));
    for (std::ptrdiff_t k = -d; k <= d; k += 2) {
      std::ptrdiff_t x = (k == -d || (k != d && v[offset + k - 1] < v[offset + k + 1]))
                             ? v[offset + k + 1]
                             : v[offset + k - 1] + 1;
      std::ptrdiff_t y = x - k;
      while (x < n && y < m && a[x] == b[y]) {
        ++x;
        ++y;
      }
      v[offset + k] = x;
      if (x < n || y < m) continue;

      // Walk the trace backwards from (n, m).
      std::vector<Step> steps;
      for (std::ptrdiff_t dd = d; dd >= 0; --dd) {
        const auto &snap = trace[dd];
        auto at = [&](std::ptrdiff_t kk) { return snap[kk + dd + 1]; };
        std::ptrdiff_t kk = x - y;
        std::ptrdiff_t prev_k = (kk == -dd || (kk != dd && at(kk - 1) < at(kk + 1))) ? kk + 1 : kk - 1;
        std::ptrdiff_t prev_x = dd == 0 ? 0 : at(prev_k);
        std::ptrdiff_t prev_y = dd == 0 ? 0 : prev_x - prev_k;
        while (x > prev_x && y > prev_y) {
          steps.push_back(Step::keep);
          --x;
          --y;
        }
        if (dd > 0) steps.push_back(x == prev_x ? Step::add : Step::remove);
        x = prev_x;
        y = prev_y;
      }
      std::reverse(steps.begin(), steps.end());
      return steps;
    }
  }
  return std::nullopt;
}

} // namespace

std::ptrdiff_t Patch::length_delta() const {
  std::ptrdiff_t delta = 0;
  for (const auto &op : ops) {
    delta += static_cast<std::ptrdiff_t>(decode_utf8(op.insert).size()) -
             static_cast<std::ptrdiff_t>(op.delete_len);
  }
  return delta;
}

Patch text_diff(std::string_view old_text, std::string_view new_text) {
  Patch patch;
  if (old_text == new_text) return patch;
  auto a = decode_utf8(old_text);
  auto b = decode_utf8(new_text);

  std::size_t prefix = 0;
  while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
  std::size_t suffix = 0;
  while (suffix < a.size() - prefix && suffix < b.size() - prefix &&
         a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix]) {
    ++suffix;
  }
  std::u32string_view mid_a = std::u32string_view(a).substr(prefix, a.size() - prefix - suffix);
  std::u32string_view mid_b = std::u32string_view(b).substr(prefix, b.size() - prefix - suffix);

  auto steps = shortest_edit(mid_a, mid_b);
  if (!steps) {
    patch.ops.push_back({prefix, mid_a.size(), encode_utf8(mid_b)});
    return patch;
  }

  std::size_t ia = 0;
  std::size_t ib = 0;
  std::optional<PatchOp> pending;
  std::u32string pending_insert;
  auto flush = [&] {
    if (!pending) return;
    pending->insert = encode_utf8(pending_insert);
    patch.ops.push_back(std::move(*pending));
    pending.reset();
    pending_insert.clear();
  };
  for (Step step : *steps) {
    switch (step) {
    case Step::keep:
      flush();
      ++ia;
      ++ib;
      break;
    case Step::remove:
      if (!pending) pending = PatchOp{prefix + ia, 0, {}};
      ++pending->delete_len;
      ++ia;
      break;
    case Step::add:
      if (!pending) pending = PatchOp{prefix + ia, 0, {}};
      pending_insert.push_back(mid_b[ib]);
      ++ib;
      break;
    }
  }
  flush();
  return patch;
}

std::u32string apply_patch(std::u32string_view old_text, const Patch &patch) {
  std::u32string out;
  out.reserve(old_text.size());
  std::size_t cursor = 0;
  for (const auto &op : patch.ops) {
    if (op.at < cursor) throw PatchError("patch ops overlap or are out of order");
    if (op.at > old_text.size() || op.delete_len > old_text.size() - op.at) {
      throw PatchError("patch op at " + std::to_string(op.at) + " exceeds text of length " +
                       std::to_string(old_text.size()));
    }
    out.append(old_text.substr(cursor, op.at - cursor));
    out.append(decode_utf8(op.insert));
    cursor = op.at + op.delete_len;
  }
  out.append(old_text.substr(cursor));
  return out;
}

std::string apply_patch(std::string_view old_text, const Patch &patch) {
  return encode_utf8(apply_patch(std::u32string_view(decode_utf8(old_text)), patch));
}

} // namespace reel
