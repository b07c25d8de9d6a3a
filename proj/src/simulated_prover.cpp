#include <algorithm>
#include <cctype>
#include <charconv>
#include <regex>

#include "reel/prover.hpp"

namespace reel {
namespace {

constexpr std::string_view kSolvingTactics[] = {"auto", "trivial", "reflexivity"};

bool starts_with_word(std::string_view body, std::string_view word) {
  if (!body.starts_with(word)) return false;
  return body.size() == word.size() || body[word.size()] == ' ';
}

ProverReply failure(const ProverSession &session, std::string message) {
  return {"Error: " + std::move(message), session.current_state(), false, std::nullopt};
}

ProverReply success(ProverSession &session, std::string command, ProofMarker marker,
                    std::string lemma, int goals, std::string response) {
  StateNumber next = session.current_state().next();
  session.journal.push_back({next, std::move(command), marker, std::move(lemma), goals});
  return {std::move(response), next, true, std::nullopt};
}

std::string goal_display(const ProverSession &session, int goals) {
  if (goals == 0) return "No more subgoals.";
  auto it = std::find_if(session.journal.rbegin(), session.journal.rend(),
                         [](const JournalEntry &e) { return e.marker == ProofMarker::opens_proof; });
  std::string statement;
  if (it != session.journal.rend()) {
    auto colon = it->command.find(':');
    if (colon != std::string::npos) statement = it->command.substr(colon + 1);
    while (!statement.empty() && (statement.back() == '.' || statement.back() == ' ')) statement.pop_back();
    while (!statement.empty() && statement.front() == ' ') statement.erase(statement.begin());
  }
  std::string header = goals == 1 ? "1 subgoal" : std::to_string(goals) + " subgoals";
  return header + "\n\n  ============================\n   " + statement;
}

} // namespace

std::optional<std::string> ProverSession::open_proof() const {
  for (auto it = journal.rbegin(); it != journal.rend(); ++it) {
    if (it->marker == ProofMarker::closes_proof) return std::nullopt;
    if (it->marker == ProofMarker::opens_proof) return it->lemma;
  }
  return std::nullopt;
}

bool ProverSession::declared(std::string_view lemma) const {
  return std::any_of(journal.begin(), journal.end(), [&](const JournalEntry &e) {
    return e.marker == ProofMarker::opens_proof && e.lemma == lemma;
  });
}

std::string normalize_command(std::string_view command) {
  std::string out;
  int depth = 0;
  bool pending_space = false;
  for (std::size_t i = 0; i < command.size(); ++i) {
    if (command.substr(i, 2) == "(*") {
      ++depth;
      ++i;
      continue;
    }
    if (depth > 0) {
      if (command.substr(i, 2) == "*)") {
        --depth;
        ++i;
        pending_space = true;
      }
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(command[i]))) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(command[i]);
  }
  return out;
}

ProverReply sim_execute(ProverSession &session, std::string_view command) {
  std::string text = normalize_command(command);
  if (text.empty() || text.back() != '.') return failure(session, "Syntax error: '.' expected after [command].");
  std::string body = text.substr(0, text.size() - 1);
  while (!body.empty() && body.back() == ' ') body.pop_back();

  static const std::regex backto(R"(^BackTo ([0-9]+)$)");
  static const std::regex lemma(R"(^(Lemma|Theorem) ([A-Za-z_][A-Za-z0-9_']*) ?: ?(\S.*)$)");
  std::smatch match;

  if (std::regex_match(body, match, backto)) {
    int target = 0;
    std::string digits = match[1].str();
    std::from_chars(digits.data(), digits.data() + digits.size(), target);
    try {
      return sim_backto(session, StateNumber{target});
    } catch (const InvalidTargetError &e) {
      return failure(session, e.what());
    }
  }

  if (std::regex_match(body, match, lemma)) {
    std::string name = match[2].str();
    if (session.open_proof()) return failure(session, "Nested proofs are not allowed.");
    if (session.declared(name)) return failure(session, name + " already exists.");
    std::string statement = match[3].str();
    return success(session, text, ProofMarker::opens_proof, name, 1,
                   "1 subgoal\n\n  ============================\n   " + statement);
  }

  auto open = session.open_proof();
  if (body == "Qed" || body == "Admitted") {
    if (!open) return failure(session, "No focused proof (No proof-editing in progress).");
    if (body == "Qed" && session.open_goals() > 0) {
      return failure(session, "Attempt to save an incomplete proof.");
    }
    std::string verb = body == "Qed" ? " is defined" : " is assumed";
    return success(session, text, ProofMarker::closes_proof, {}, 0, *open + verb);
  }

  bool solves = ((starts_with_word(body, "exact") || starts_with_word(body, "apply")) &&
                 body.find(' ') != std::string::npos) ||
                std::find(std::begin(kSolvingTactics), std::end(kSolvingTactics), body) !=
                    std::end(kSolvingTactics);
  bool keeps = starts_with_word(body, "intros");
  bool splits = body == "split";
  if (solves || keeps || splits) {
    if (!open) return failure(session, "No focused proof (No proof-editing in progress).");
    int goals = session.open_goals();
    if (goals == 0) return failure(session, "No such goal.");
    goals += solves ? -1 : splits ? 1 : 0;
    return success(session, text, ProofMarker::neutral, {}, goals, goal_display(session, goals));
  }

  std::string word = body.substr(0, body.find(' '));
  return failure(session, "Unknown command \"" + word + "\".");
}

ProverReply sim_backto(ProverSession &session, StateNumber target) {
  StateNumber current = session.current_state();
  if (target < StateNumber::initial() || target > current) {
    throw InvalidTargetError("Invalid backtrack: state " + std::to_string(target.value()) +
                             " is not between 1 and " + std::to_string(current.value()) + ".");
  }
  // A finished proof cannot be re-entered: land before its opening command.
  StateNumber reached = target;
  StateNumber open_at = StateNumber::undefined();
  for (const auto &entry : session.journal) {
    if (entry.marker == ProofMarker::opens_proof) open_at = entry.state;
    if (entry.marker == ProofMarker::closes_proof) {
      if (open_at.defined() && open_at <= target && target < entry.state) {
        reached = StateNumber{open_at.value() - 1};
        break;
      }
      open_at = StateNumber::undefined();
    }
  }
  std::erase_if(session.journal, [&](const JournalEntry &e) { return e.state > reached; });

  ProverReply reply{"", reached, true, std::nullopt};
  if (reached != target) {
    reply.warning = "Actually back to state " + std::to_string(reached.value()) + ".";
    reply.response = "Warning: " + *reply.warning;
  }
  return reply;
}

ProverReply CountingProver::execute(std::string_view command) {
  ++executed_;
  log_.emplace_back(command);
  return inner_->execute(command);
}

ProverReply CountingProver::back_to(StateNumber target) {
  ++backtracks_;
  log_.push_back("BackTo " + std::to_string(target.value()) + ".");
  return inner_->back_to(target);
}

void CountingProver::reset_counts() {
  executed_ = 0;
  backtracks_ = 0;
  log_.clear();
}

} // namespace reel
