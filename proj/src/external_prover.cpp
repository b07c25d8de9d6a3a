#include "reel/external_prover.hpp"

#include <cerrno>
#include <charconv>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace reel {
namespace {

constexpr std::string_view kPromptOpen = "<prompt>";
constexpr std::string_view kPromptClose = "</prompt>";

std::optional<int> leading_int(std::string_view text) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr == text.data()) return std::nullopt;
  return value;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

} // namespace

std::optional<StateNumber> parse_prompt(std::string_view output) {
  auto open = output.rfind(kPromptOpen);
  if (open == std::string_view::npos) return std::nullopt;
  auto body = output.substr(open + kPromptOpen.size());
  auto close = body.find(kPromptClose);
  if (close == std::string_view::npos) return std::nullopt;
  body = body.substr(0, close);
  auto marker = body.find("< ");
  if (marker == std::string_view::npos) return std::nullopt;
  auto value = leading_int(body.substr(marker + 2));
  if (!value || *value < 1) return std::nullopt;
  return StateNumber{*value};
}

std::optional<StateNumber> parse_backto_warning(std::string_view output) {
  constexpr std::string_view kWarning = "Actually back to state ";
  auto at = output.find(kWarning);
  if (at == std::string_view::npos) return std::nullopt;
  auto value = leading_int(output.substr(at + kWarning.size()));
  if (!value) return std::nullopt;
  return StateNumber{*value};
}

ExternalProver::ExternalProver(ExternalProverOptions options) : options_(std::move(options)) {
  int in_pipe[2];
  int out_pipe[2];
  if (pipe(in_pipe) != 0) throw BackendError(std::string("pipe: ") + std::strerror(errno));
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw BackendError(std::string("pipe: ") + std::strerror(errno));
  }

  std::vector<std::string> argv_storage;
  argv_storage.push_back(options_.program);
  argv_storage.insert(argv_storage.end(), options_.arguments.begin(), options_.arguments.end());
  std::vector<char *> argv;
  for (auto &arg : argv_storage) argv.push_back(arg.data());
  argv.push_back(nullptr);

  pid_ = fork();
  if (pid_ < 0) {
    int err = errno;
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
    throw BackendError(std::string("fork: ") + std::strerror(err));
  }
  if (pid_ == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(out_pipe[1], STDERR_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execvp(argv[0], argv.data());
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  fcntl(to_child_, F_SETFD, FD_CLOEXEC);
  fcntl(from_child_, F_SETFD, FD_CLOEXEC);
  std::signal(SIGPIPE, SIG_IGN);

  try {
    auto state = parse_prompt(read_until_prompt());
    if (!state) throw BackendError("prover greeting has no parsable prompt");
    state_ = *state;
  } catch (...) {
    shutdown();
    throw;
  }
}

ExternalProver::~ExternalProver() { shutdown(); }

void ExternalProver::shutdown() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    kill(pid_, SIGTERM);
    waitpid(pid_, nullptr, 0);
    pid_ = -1;
  }
}

std::string ExternalProver::read_until_prompt() {
  auto deadline = std::chrono::steady_clock::now() + options_.reply_timeout;
  while (true) {
    auto close_at = buffer_.find(kPromptClose);
    if (close_at != std::string::npos) {
      auto end = close_at + kPromptClose.size();
      std::string out = buffer_.substr(0, end);
      buffer_.erase(0, end);
      return out;
    }
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) throw BackendError("timed out waiting for the prover prompt");
    pollfd pfd{from_child_, POLLIN, 0};
    int ready = poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) throw BackendError("timed out waiting for the prover prompt");
    char chunk[4096];
    ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw BackendError("prover process exited");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::string ExternalProver::round_trip(std::string_view line) {
  std::string payload(line);
  payload.push_back('\n');
  std::size_t written = 0;
  while (written < payload.size()) {
    ssize_t n = write(to_child_, payload.data() + written, payload.size() - written);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw BackendError("prover process closed its input");
    written += static_cast<std::size_t>(n);
  }
  return read_until_prompt();
}

ProverReply ExternalProver::execute(std::string_view command) {
  std::string text = normalize_command(command);
  // The prover would block waiting for the rest of the sentence.
  if (text.empty() || text.back() != '.') {
    return {"Error: '.' expected after [command].", state_, false, std::nullopt};
  }
  std::string output = round_trip(text);
  auto state = parse_prompt(output);
  if (!state) throw BackendError("unparsable prover prompt: " + output);
  ProverReply reply;
  reply.response = trim(output.substr(0, output.rfind(kPromptOpen)));
  reply.ok = *state == state_.next();
  reply.new_state = *state;
  state_ = *state;
  return reply;
}

ProverReply ExternalProver::back_to(StateNumber target) {
  if (target < StateNumber::initial() || target > state_) {
    throw InvalidTargetError("cannot back to state " + std::to_string(target.value()));
  }
  std::string output = round_trip("BackTo " + std::to_string(target.value()) + ".");
  auto state = parse_prompt(output);
  if (!state) throw BackendError("unparsable prover prompt: " + output);
  ProverReply reply;
  reply.response = trim(output.substr(0, output.rfind(kPromptOpen)));
  reply.new_state = *state;
  reply.ok = *state <= target;
  if (auto warned = parse_backto_warning(output)) {
    reply.warning = "Actually back to state " + std::to_string(warned->value()) + ".";
  }
  state_ = *state;
  return reply;
}

} // namespace reel
