#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reel/error.hpp"

namespace reel {

/// State counter reported by the prover. Valid states are >= 1;
/// `undefined()` marks a frame that has not been evaluated.
class StateNumber {
public:
  constexpr StateNumber() = default;
  constexpr explicit StateNumber(int value) : value_(value) {}

  static constexpr StateNumber undefined() { return StateNumber{-1}; }
  static constexpr StateNumber initial() { return StateNumber{1}; }

  constexpr int value() const { return value_; }
  constexpr bool defined() const { return value_ >= 1; }
  constexpr StateNumber next() const { return StateNumber{value_ + 1}; }

  friend constexpr auto operator<=>(StateNumber, StateNumber) = default;

private:
  int value_ = -1;
};

struct ProverReply {
  std::string response;
  StateNumber new_state;
  bool ok = false;
  std::optional<std::string> warning;
};

/// Raised when the prover cannot be reached or speaks an unexpected dialect.
class BackendError : public Error {
public:
  using Error::Error;
};

class InvalidTargetError : public Error {
public:
  using Error::Error;
};

/// A lock-step prover that counts successful commands and can backtrack.
class ProverBackend {
public:
  virtual ~ProverBackend() = default;

  virtual ProverReply execute(std::string_view command) = 0;
  /// Reverts to `target` or, if that lies inside a finished proof, to the
  /// state before the proof was opened.
  virtual ProverReply back_to(StateNumber target) = 0;
  virtual StateNumber state() const = 0;
};

// --- simulated prover -----------------------------------------------------

enum class ProofMarker { opens_proof, closes_proof, neutral };

struct JournalEntry {
  StateNumber state;
  std::string command;
  ProofMarker marker = ProofMarker::neutral;
  /// Lemma name for entries that open a proof.
  std::string lemma;
  /// Goals left open after this command.
  int goals = 0;
};

/// Successful commands in execution order.
struct ProverSession {
  std::vector<JournalEntry> journal;

  StateNumber current_state() const {
    return journal.empty() ? StateNumber::initial() : journal.back().state;
  }
  /// Name of the open proof, if any.
  std::optional<std::string> open_proof() const;
  bool declared(std::string_view lemma) const;
  int open_goals() const { return journal.empty() ? 0 : journal.back().goals; }
};

/// Deterministic stand-in for the prover: `Lemma`/`Theorem` open a proof
/// with one goal, `intros` keeps it, `split` adds one, `auto`, `trivial`,
/// `reflexivity`, `exact X` and `apply X` each solve one. `Qed` closes a
/// proof without goals, `Admitted` closes any, `BackTo n.` backtracks.
/// Everything else is rejected.
ProverReply sim_execute(ProverSession &session, std::string_view command);

/// Throws InvalidTargetError unless 1 <= target <= current state.
ProverReply sim_backto(ProverSession &session, StateNumber target);

class SimulatedProver final : public ProverBackend {
public:
  ProverReply execute(std::string_view command) override { return sim_execute(session_, command); }
  ProverReply back_to(StateNumber target) override { return sim_backto(session_, target); }
  StateNumber state() const override { return session_.current_state(); }

  const ProverSession &session() const { return session_; }

private:
  ProverSession session_;
};

/// Forwards to another backend and counts the traffic.
class CountingProver final : public ProverBackend {
public:
  explicit CountingProver(std::shared_ptr<ProverBackend> inner) : inner_(std::move(inner)) {}

  ProverReply execute(std::string_view command) override;
  ProverReply back_to(StateNumber target) override;
  StateNumber state() const override { return inner_->state(); }

  std::size_t executed() const { return executed_; }
  std::size_t backtracks() const { return backtracks_; }
  std::size_t total() const { return executed_ + backtracks_; }
  const std::vector<std::string> &log() const { return log_; }
  void reset_counts();

private:
  std::shared_ptr<ProverBackend> inner_;
  std::size_t executed_ = 0;
  std::size_t backtracks_ = 0;
  std::vector<std::string> log_;
};

/// Stands in when the configured prover could not be started: every call
/// raises BackendError.
class UnavailableProver final : public ProverBackend {
public:
  explicit UnavailableProver(std::string reason) : reason_(std::move(reason)) {}

  ProverReply execute(std::string_view) override { throw BackendError(reason_); }
  ProverReply back_to(StateNumber) override { throw BackendError(reason_); }
  StateNumber state() const override { return StateNumber::initial(); }

private:
  std::string reason_;
};

/// Trims surrounding whitespace and strips comments; collapses inner runs
/// of whitespace to one space.
std::string normalize_command(std::string_view command);

} // namespace reel
