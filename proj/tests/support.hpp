#pragma once

// Generators and oracles shared by the unit tests and the acceptance run.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "reel/camera.hpp"
#include "reel/driver.hpp"
#include "reel/linker.hpp"
#include "reel/movie.hpp"
#include "reel/prover.hpp"
#include "reel/scanner.hpp"
#include "reel/scheduler.hpp"
#include "reel/text.hpp"

namespace reel::test {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng &rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline bool chance(Rng &rng, double p) { return std::bernoulli_distribution(p)(rng); }

inline std::string join_commands(const std::vector<std::string> &commands) {
  std::string out;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (i > 0) out += '\n';
    out += commands[i];
  }
  return out;
}

/// Proof-script lines: proofs of fresh lemmas with a mix of accepted and
/// rejected tactics, some closed with Qed/Admitted, plus stray junk.
inline std::vector<std::string> random_script(Rng &rng, std::size_t max_commands) {
  static const char *good[] = {"intros.", "auto.", "trivial.", "reflexivity.", "split.",
                               "exact H.", "intros x y."};
  static const char *bad[] = {"frobnicate.", "exact.", "Qed.", "Lemma oops.", "induction n."};
  std::size_t target = 1 + pick(rng, max_commands);
  std::vector<std::string> out;
  std::vector<std::string> lemmas;
  int next_lemma = 0;
  while (out.size() < target) {
    if (chance(rng, 0.15)) {
      out.push_back(bad[pick(rng, std::size(bad))]);
      continue;
    }
    std::string name = "l" + std::to_string(next_lemma++);
    out.push_back("Lemma " + name + ": forall x, x->x.");
    std::size_t body = pick(rng, 4);
    for (std::size_t i = 0; i < body && out.size() < target; ++i) {
      if (!lemmas.empty() && chance(rng, 0.2)) {
        out.push_back("apply " + lemmas[pick(rng, lemmas.size())] + ".");
      } else if (chance(rng, 0.15)) {
        out.push_back(bad[pick(rng, std::size(bad))]);
      } else {
        out.push_back(good[pick(rng, std::size(good))]);
      }
    }
    if (out.size() < target && chance(rng, 0.8)) {
      if (out.size() + 1 < target && chance(rng, 0.75)) out.push_back("auto.");
      out.push_back(chance(rng, 0.7) ? "Qed." : "Admitted.");
    }
    lemmas.push_back(name);
  }
  out.resize(target);
  return out;
}

/// Alternatives for command i of a script: an accepted tactic, a rejected
/// one, deletion and an insertion in front of it.
inline std::vector<std::vector<std::string>> single_command_edits(const std::vector<std::string> &script,
                                                                  std::size_t i) {
  std::vector<std::vector<std::string>> out;
  auto replaced = [&](std::string text) {
    auto copy = script;
    copy[i] = std::move(text);
    return copy;
  };
  out.push_back(replaced(script[i] == "auto." ? "trivial." : "auto."));
  out.push_back(replaced("frobnicate."));
  out.push_back(replaced("Lemma fresh: forall x, x->x."));
  auto deleted = script;
  deleted.erase(deleted.begin() + static_cast<std::ptrdiff_t>(i));
  out.push_back(deleted);
  auto inserted = script;
  inserted.insert(inserted.begin() + static_cast<std::ptrdiff_t>(i), "intros.");
  out.push_back(inserted);
  return out;
}

/// Random text over an alphabet that exercises the scanner: terminators,
/// comment brackets, strings, newlines and a non-ASCII letter.
inline std::string random_snippet(Rng &rng, std::size_t max_len) {
  static const char *pieces[] = {"a", "b", "x", " ", " ", "\n", ".", ". ", ".\n", "(*", "*)",
                                 "\"", "intros", "Nat.add", "λ", "\t", "auto."};
  std::string out;
  std::size_t len = pick(rng, max_len + 1);
  for (std::size_t i = 0; i < len; ++i) out += pieces[pick(rng, std::size(pieces))];
  return out;
}

/// Applies a random insert/delete/replace to `text` (code-point offsets).
inline std::string random_edit(Rng &rng, const std::string &text) {
  std::u32string cps = decode_utf8(text);
  std::size_t at = pick(rng, cps.size() + 1);
  std::size_t del = at == cps.size() ? 0 : pick(rng, std::min<std::size_t>(cps.size() - at, 12) + 1);
  std::u32string insert = decode_utf8(chance(rng, 0.8) ? random_snippet(rng, 4) : "");
  cps.replace(at, del, insert);
  return encode_utf8(cps);
}

inline std::optional<FrameId> linear_lookup(const Movie &movie, Position pos) {
  for (const Frame *frame : movie.frames()) {
    if (frame->range.contains(pos)) return frame->id;
  }
  return std::nullopt;
}

/// Index of the first code point where the texts differ.
inline std::size_t common_prefix(const std::string &a, const std::string &b) {
  auto ua = decode_utf8(a);
  auto ub = decode_utf8(b);
  std::size_t k = 0;
  while (k < ua.size() && k < ub.size() && ua[k] == ub[k]) ++k;
  return k;
}

/// Movie over `text` with prover cells from a fresh simulated prover and
/// links from the linker.
inline Movie batch_run(const std::string &text) {
  Movie movie = with_linear_dependencies(build_movie(text, 1));
  SimulatedProver prover;
  movie = apply_results(movie, drive_init(movie, prover));
  std::vector<FrameResult> links;
  for (auto &[id, frame_links] : link_frames(movie)) {
    links.push_back({id, {{cells::kLinks, to_json(frame_links)}}});
  }
  return apply_results(movie, links);
}

} // namespace reel::test
