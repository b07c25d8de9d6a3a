// Acceptance run: one line per criterion, exit status 1 if any fails.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "reel/camera.hpp"
#include "reel/driver.hpp"
#include "reel/http_server.hpp"
#include "reel/linker.hpp"
#include "reel/service.hpp"
#include "reel/wire.hpp"
#include "support.hpp"

using namespace reel;
using namespace std::chrono_literals;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

/// Collects the first few mismatches of a criterion.
class Report {
public:
  void fail(const std::string &what) {
    if (failures_++ < 5) out_ << (failures_ > 1 ? "; " : "") << what;
  }
  void note(const std::string &what) { notes_ << (notes_.tellp() > 0 ? ", " : "") << what; }
  Outcome outcome() const {
    if (failures_ == 0) return {true, notes_.str()};
    return {false, std::to_string(failures_) + " mismatches: " + out_.str()};
  }

private:
  std::size_t failures_ = 0;
  std::ostringstream out_;
  std::ostringstream notes_;
};

int g_failed = 0;

void criterion(const char *name, std::chrono::milliseconds budget, const std::function<Outcome()> &body) {
  auto start = Clock::now();
  Outcome outcome;
  try {
    outcome = body();
  } catch (const std::exception &e) {
    outcome = {false, std::string("exception: ") + e.what()};
  }
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
  bool in_time = elapsed <= budget;
  bool ok = outcome.ok && in_time;
  if (!ok) ++g_failed;
  std::printf("%s  %-34s %6lld ms (budget %lld ms)  %s%s\n", ok ? "PASS" : "FAIL", name,
              static_cast<long long>(elapsed.count()), static_cast<long long>(budget.count()),
              outcome.detail.c_str(), in_time ? "" : " [over budget]");
  std::fflush(stdout);
}

std::string column(const Movie &movie, const char *cell) {
  std::string out;
  for (const Frame *frame : movie.frames()) {
    auto it = frame->cells.find(cell);
    out += (it == frame->cells.end() ? std::string("-") : it->second.dump()) + "|";
  }
  return out;
}

Movie init_run(const std::string &text, ProverBackend &prover) {
  Movie movie = with_linear_dependencies(build_movie(text, 1));
  return apply_results(movie, drive_init(movie, prover));
}

Movie change_run(const Movie &movie, const std::string &text, ProverBackend &prover) {
  auto result = camera(movie, text);
  Movie next = with_linear_dependencies(result.movie);
  return apply_results(next, drive_on_change(next, result.invalidated, prover));
}

// --- criteria -------------------------------------------------------------

Outcome transcript_replay() {
  Report report;
  const char *lemma = "Lemma foo: forall x, x->x.";

  SimulatedProver within;
  std::vector<int> states{within.state().value()};
  for (const char *command : {lemma, "intros.", "BackTo 2."}) states.push_back(within.execute(command).new_state.value());
  if (states != std::vector<int>{1, 2, 3, 2}) report.fail("BackTo within a proof");
  auto last = within.session().open_proof();
  if (last != "foo") report.fail("proof not open after BackTo 2");

  SimulatedProver outside;
  std::vector<int> seq{outside.state().value()};
  ProverReply reply;
  for (const char *command : {lemma, "intros.", "Admitted.", "BackTo 2."}) {
    reply = outside.execute(command);
    seq.push_back(reply.new_state.value());
  }
  if (reply.new_state != StateNumber{1}) report.fail("final state " + std::to_string(reply.new_state.value()));
  if (reply.warning != std::optional<std::string>("Actually back to state 1.")) report.fail("warning text");
  if (reply.response != "Warning: Actually back to state 1.") report.fail("response text");

  std::string trace;
  for (int s : seq) trace += (trace.empty() ? "" : ">") + std::to_string(s);
  report.note("within 1>2>3>2");
  report.note("outside " + trace);
  return report.outcome();
}

Outcome incremental_vs_batch() {
  Report report;
  test::Rng rng(20240611);
  std::size_t scripts = 0;
  std::size_t edits = 0;
  for (; scripts < 400; ++scripts) {
    auto script = test::random_script(rng, 20);
    SimulatedProver base;
    Movie movie = init_run(test::join_commands(script), base);
    for (std::size_t i = 0; i < script.size(); ++i) {
      for (const auto &edited : test::single_command_edits(script, i)) {
        ++edits;
        std::string text = test::join_commands(edited);
        SimulatedProver prover = base;
        Movie incremental = change_run(movie, text, prover);
        SimulatedProver fresh;
        Movie batch = init_run(text, fresh);
        if (column(incremental, cells::kResponse) != column(batch, cells::kResponse) ||
            column(incremental, cells::kCorrectness) != column(batch, cells::kCorrectness)) {
          report.fail("script " + std::to_string(scripts) + " edit at " + std::to_string(i));
        }
      }
    }
  }
  report.note(std::to_string(scripts) + " scripts");
  report.note(std::to_string(edits) + " single-command edits");
  return report.outcome();
}

Outcome driver_efficiency() {
  Report report;
  constexpr std::size_t K = 50;
  std::vector<std::string> script{"Lemma big: forall x, x->x."};
  while (script.size() < K) script.push_back("intros.");
  SimulatedProver base_inner;
  Movie movie = init_run(test::join_commands(script), base_inner);
  for (std::size_t i = 1; i <= K; ++i) {
    auto edited = script;
    edited[i - 1] = i == 1 ? "Lemma bigger: forall x, x->x." : "intros x.";
    auto counting = CountingProver(std::make_shared<SimulatedProver>(base_inner));
    Movie after = change_run(movie, test::join_commands(edited), counting);
    std::size_t bound = (K - i + 1) + 1;
    if (counting.total() > bound) {
      report.fail("i=" + std::to_string(i) + " sent " + std::to_string(counting.total()) + " > " +
                  std::to_string(bound));
    }
    if (column(after, cells::kCorrectness).find("invalid") != std::string::npos) report.fail("edit broke the proof");
  }
  report.note("i=1..50 within bound");

  // Overshoot: edit the third command, inside a finished proof. The two
  // commands before it are the proof prefix that BackTo throws away.
  std::vector<std::string> closed{"Lemma a: forall x, x->x.", "intros.", "auto.", "Qed."};
  for (int k = 0; k < 4; ++k) {
    closed.push_back("Lemma b" + std::to_string(k) + ": forall x, x->x.");
    closed.push_back("trivial.");
    closed.push_back("Qed.");
  }
  auto counting = CountingProver(std::make_shared<SimulatedProver>());
  Movie before = init_run(test::join_commands(closed), counting);
  counting.reset_counts();
  auto edited = closed;
  edited[2] = "reflexivity.";
  Movie after = change_run(before, test::join_commands(edited), counting);
  const std::size_t prefix = 2;
  const std::size_t suffix = closed.size() - 3 + 1;
  if (counting.backtracks() != 1) report.fail("overshoot case sent " + std::to_string(counting.backtracks()) + " BackTo");
  if (counting.executed() != prefix + suffix) {
    report.fail("overshoot case executed " + std::to_string(counting.executed()) + ", expected " +
                std::to_string(prefix + suffix));
  }
  if (column(after, cells::kCorrectness).find("invalid") != std::string::npos) report.fail("overshoot case invalid");
  report.note("overshoot: 1 BackTo + " + std::to_string(prefix) + " replayed + " + std::to_string(suffix) + " executed");
  return report.outcome();
}

Outcome range_tree_oracle() {
  Report report;
  test::Rng rng(42);
  std::size_t positions = 0;
  std::size_t max_frames = 0;
  for (int round = 0; round < 1000; ++round) {
    std::size_t want = 1 + test::pick(rng, 200);
    std::string text;
    std::size_t frames = 0;
    while (frames < want) {
      switch (test::pick(rng, 4)) {
      case 0: text += "\n(* c" + std::to_string(frames) + " *)"; break;
      case 1: text += "\n  intros x."; break;
      case 2: text += " exact (fun λ => λ)."; break;
      default: text += "\nauto."; break;
      }
      ++frames;
    }
    Movie movie = build_movie(text);
    if (movie.empty() || movie.size() > 200) report.fail("movie size " + std::to_string(movie.size()));
    max_frames = std::max(max_frames, movie.size());
    TextIndex index(movie.text());
    auto check = [&](Position pos) {
      ++positions;
      auto found = lookup_frame(movie, pos);
      auto expected = test::linear_lookup(movie, pos);
      if (found.has_value() != expected.has_value() || (found && found->id != *expected)) {
        report.fail("round " + std::to_string(round) + " at " + std::to_string(pos.line) + ":" +
                    std::to_string(pos.character));
      }
    };
    for (std::size_t i = 0; i <= index.size(); ++i) check(index.position_of(i));
    check({index.end().line + 1, 0});
  }
  report.note("1000 movies");
  report.note("up to " + std::to_string(max_frames) + " frames");
  report.note(std::to_string(positions) + " positions");
  return report.outcome();
}

Outcome camera_properties() {
  Report report;
  test::Rng rng(7);
  std::size_t steps = 0;
  for (int sequence = 0; sequence < 1000; ++sequence) {
    Movie movie = build_movie(test::join_commands(test::random_script(rng, 12)));
    movie = movie.transform_cells([](const Frame &f) { return CellMap{{"tag", f.id}}; });
    for (int step = 0; step < 5; ++step, ++steps) {
      std::string next = test::random_edit(rng, movie.text());
      auto result = camera(movie, next);
      const Movie &out = result.movie;
      std::string where = "sequence " + std::to_string(sequence) + " step " + std::to_string(step);

      if (out.text() != next) report.fail("fidelity, " + where);
      try {
        out.validate();
      } catch (const std::exception &e) {
        report.fail(std::string("invariants, ") + e.what() + ", " + where);
      }

      auto tokens = scan_commands(next);
      auto frames = out.frames();
      bool same = tokens.size() == frames.size();
      for (std::size_t i = 0; same && i < frames.size(); ++i) {
        same = frames[i]->range == tokens[i].range && frames[i]->kind == tokens[i].kind;
      }
      if (!same) report.fail("batch re-scan, " + where);

      std::size_t k = test::common_prefix(movie.text(), next);
      TextIndex index(movie.text());
      for (const Frame *frame : movie.frames()) {
        if (index.offset_of(frame->range.end) >= k) break;
        const Frame *kept = out.find(frame->id);
        if (kept == nullptr || kept->cells != frame->cells) report.fail("locality, " + where);
      }

      Movie tagged = out.transform_cells([](const Frame &f) { return CellMap{{"tag", f.id}}; });
      auto round_trip = camera(tagged, tagged.text());
      if (!round_trip.invalidated.empty() || round_trip.movie.ids() != tagged.ids()) {
        report.fail("round trip, " + where);
      }
      for (FrameId id : tagged.ids()) {
        if (round_trip.movie.find(id)->cells != tagged.find(id)->cells) report.fail("round trip cells, " + where);
      }
      movie = tagged;
    }
  }
  report.note("1000 sequences");
  report.note(std::to_string(steps) + " edits");
  return report.outcome();
}

Outcome protocol_liveness() {
  Report report;
  const auto hold = 2000ms;
  const auto latency = 100ms;
  ServiceOptions options;
  options.hold_timeout = hold;
  options.install_tools = [latency](Scheduler &scheduler) {
    scheduler.register_tool(make_prover_tool(std::make_shared<SimulatedProver>(), {latency}));
    scheduler.register_tool(make_linker_tool());
  };
  DocumentService service(options);
  HttpServer server(service, 16);
  int port = server.start("127.0.0.1", 0);

  // Background reader: re-requests after every response, like the editor.
  std::atomic<bool> stop{false};
  std::atomic<int> snapshots{0};
  std::thread reader([&] {
    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(10, 0);
    std::string seen;
    while (!stop) {
      auto res = client.Get("/docs/live/frames" + seen);
      if (!res) {
        std::this_thread::sleep_for(10ms);
        continue;
      }
      if (res->status == 404) {
        std::this_thread::sleep_for(10ms);
        continue;
      }
      if (res->status != 200) continue;
      ++snapshots;
      auto body = nlohmann::json::parse(res->body);
      seen = "?seen=" + std::to_string(body["marker"].get<std::uint64_t>());
    }
  });

  httplib::Client writer("127.0.0.1", port);
  writer.set_read_timeout(10, 0);
  std::vector<std::string> script{"Lemma foo: forall x, x->x.", "intros.", "split.", "auto.", "exact H."};
  std::vector<std::string> texts;
  test::Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    auto edits = test::single_command_edits(script, test::pick(rng, script.size()));
    script = edits[i % 2 == 0 ? 0 : 4];
    if (i == 6) script.push_back("Lemma bar: forall x, x->x.");
    if (i == 7) script.push_back("apply foo.");
    texts.push_back(test::join_commands(script));
  }
  texts.back() += "\nQed.";

  std::chrono::microseconds worst_ack{0};
  Generation last = 0;
  for (const auto &text : texts) {
    auto start = Clock::now();
    auto res = writer.Post("/docs/live/text", nlohmann::json{{"text", text}}.dump(), "application/json");
    auto took = std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start);
    if (!res || res->status != 200) {
      report.fail("update rejected");
      continue;
    }
    worst_ack = std::max(worst_ack, took);
    if (took >= 50ms) report.fail("ack took " + std::to_string(took.count() / 1000) + " ms");
    last = nlohmann::json::parse(res->body)["generation"].get<Generation>();
    std::this_thread::sleep_for(150ms);
  }
  if (last != texts.size()) report.fail("last generation " + std::to_string(last));

  // Convergence from the client's side.
  nlohmann::json final_snapshot;
  std::string seen;
  auto deadline = Clock::now() + 30s;
  while (Clock::now() < deadline) {
    auto res = writer.Get("/docs/live/frames?since=" + std::to_string(last) + seen);
    if (!res) break;
    if (res->status != 200) continue;
    final_snapshot = nlohmann::json::parse(res->body);
    seen = "&seen=" + std::to_string(final_snapshot["marker"].get<std::uint64_t>());
    if (final_snapshot["all_done"] == true && final_snapshot["generation"] == last) break;
  }
  if (final_snapshot.is_null() || final_snapshot["all_done"] != true) {
    report.fail("never converged");
  } else {
    Movie batch = test::batch_run(texts.back());
    auto expected = batch.frames();
    const auto &frames = final_snapshot["frames"];
    if (frames.size() != expected.size()) {
      report.fail("frame count");
    } else {
      std::map<FrameId, std::size_t> live_index;
      std::map<FrameId, std::size_t> batch_index;
      for (std::size_t i = 0; i < expected.size(); ++i) {
        live_index[frames[i]["id"].get<FrameId>()] = i;
        batch_index[expected[i]->id] = i;
      }
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (wire_range(frames[i]) != expected[i]->range) report.fail("range of frame " + std::to_string(i));
        nlohmann::json want = nlohmann::json::object();
        for (const auto &[name, value] : expected[i]->cells) {
          if (name != cells::kDependencies) want[name] = value;
        }
        nlohmann::json got = frames[i]["cells"];
        // Link targets are frame ids; compare them by position instead.
        for (auto *side : {&want, &got}) {
          auto &index = side == &want ? batch_index : live_index;
          if (side->contains(cells::kLinks)) {
            for (auto &link : (*side)[cells::kLinks]) link["target"] = index.at(link["target"].get<FrameId>());
          }
        }
        if (got != want) report.fail("cells of frame " + std::to_string(i));
      }
    }
  }

  // An up-to-date client is held until the timeout.
  auto start = Clock::now();
  auto idle = writer.Get("/docs/live/frames?since=" + std::to_string(last) + seen);
  auto held = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
  if (!idle || idle->status != 204) report.fail("idle poll was not 204");
  if (held < hold * 9 / 10 || held > hold * 11 / 10) report.fail("idle poll held " + std::to_string(held.count()) + " ms");

  stop = true;
  server.stop();
  reader.join();
  report.note("10 edits");
  report.note("worst ack " + std::to_string(worst_ack.count() / 1000.0).substr(0, 5) + " ms");
  report.note("idle 204 after " + std::to_string(held.count()) + " ms of " + std::to_string(hold.count()));
  report.note(std::to_string(snapshots.load()) + " snapshots to the background reader");
  return report.outcome();
}

Outcome error_propagation() {
  Report report;
  std::string good = "Lemma foo: forall x, x->x.\nintros.\nexact H.\nQed.";
  std::string bad = "Lemma foo: forall x, x->x.\nintros.\nfrobnicate.\nQed.";
  const std::string expected = "\"valid\"|\"valid\"|\"invalid\"|\"invalid\"|";

  SimulatedProver prover;
  Movie movie = init_run(good, prover);
  Movie edited = change_run(movie, bad, prover);
  SimulatedProver fresh;
  Movie scratch = init_run(bad, fresh);
  for (const Movie *m : {&edited, &scratch}) {
    if (column(*m, cells::kCorrectness) != expected) report.fail("correctness " + column(*m, cells::kCorrectness));
    auto response = m->frames()[2]->cells.at(cells::kResponse).get<std::string>();
    if (!response.starts_with("Error: ")) report.fail("frame 3 response: " + response);
  }
  report.note("[valid, valid, invalid, invalid] after the edit and from scratch");
  return report.outcome();
}

} // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  criterion("transcript replay", 1000ms, transcript_replay);
  criterion("incremental vs batch oracle", 60000ms, incremental_vs_batch);
  criterion("driver efficiency", 60000ms, driver_efficiency);
  criterion("range tree oracle", 10000ms, range_tree_oracle);
  criterion("camera properties", 30000ms, camera_properties);
  criterion("protocol liveness and convergence", 60000ms, protocol_liveness);
  criterion("error propagation", 60000ms, error_propagation);
  std::printf("%d of 7 criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
