#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reel/prover.hpp"

namespace reel {

/// State number in an emacs-mode prompt, e.g. `<prompt>foo < 3 |foo| 2 < </prompt>`:
/// the first integer after "< ".
std::optional<StateNumber> parse_prompt(std::string_view output);

/// N from "Warning: Actually back to state N."
std::optional<StateNumber> parse_backto_warning(std::string_view output);

struct ExternalProverOptions {
  std::string program = "coqtop";
  std::vector<std::string> arguments = {"-emacs"};
  std::chrono::milliseconds reply_timeout{30000};
};

/// Drives a prover subprocess over stdin/stdout, reading state numbers from
/// its prompt. Any I/O failure or unparsable prompt raises BackendError.
class ExternalProver final : public ProverBackend {
public:
  explicit ExternalProver(ExternalProverOptions options);
  ~ExternalProver() override;

  ExternalProver(const ExternalProver &) = delete;
  ExternalProver &operator=(const ExternalProver &) = delete;

  ProverReply execute(std::string_view command) override;
  ProverReply back_to(StateNumber target) override;
  StateNumber state() const override { return state_; }

private:
  std::string round_trip(std::string_view line);
  std::string read_until_prompt();
  void shutdown();

  ExternalProverOptions options_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  StateNumber state_ = StateNumber::initial();
};

} // namespace reel
