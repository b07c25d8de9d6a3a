#include "reel/linker.hpp"

#include <regex>
#include <unordered_set>

namespace reel {
namespace {

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '\'' || (static_cast<unsigned char>(c) & 0x80) != 0;
}

std::vector<Link> links_in(const Frame &frame, const std::map<std::string, FrameId> &declared) {
  std::vector<Link> links;
  const std::string &text = frame.command;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_char(text[i])) {
      ++i;
      continue;
    }
    std::size_t begin = i;
    while (i < text.size() && is_word_char(text[i])) ++i;
    std::string_view word(text.data() + begin, i - begin);
    auto it = declared.find(std::string(word));
    if (it == declared.end()) continue;
    Position start = reel::advance(Position{}, std::string_view(text).substr(0, begin));
    links.push_back({{start, reel::advance(start, word)}, it->second, std::string(word)});
  }
  return links;
}

} // namespace

nlohmann::json to_json(const std::vector<Link> &links) {
  auto out = nlohmann::json::array();
  for (const auto &link : links) {
    out.push_back({{"name", link.name},
                   {"target", link.target},
                   {"start_line", link.range.start.line},
                   {"start_char", link.range.start.character},
                   {"end_line", link.range.end.line},
                   {"end_char", link.range.end.character}});
  }
  return out;
}

std::optional<std::string> declared_lemma(std::string_view command) {
  static const std::regex declaration(R"((?:^|\s)(?:Lemma|Theorem)\s+([A-Za-z_][A-Za-z0-9_']*))");
  std::match_results<std::string_view::const_iterator> match;
  if (!std::regex_search(command.begin(), command.end(), match, declaration)) return std::nullopt;
  return match[1].str();
}

std::map<FrameId, std::vector<Link>> link_frames(const Movie &movie) {
  std::map<FrameId, std::vector<Link>> out;
  std::map<std::string, FrameId> declared;
  for (const Frame *frame : movie.frames()) {
    if (frame->kind != FrameKind::command) continue;
    out[frame->id] = links_in(*frame, declared);
    if (auto name = declared_lemma(frame->command)) declared[*name] = frame->id;
  }
  return out;
}

ToolDescriptor make_linker_tool() {
  ToolDescriptor tool;
  tool.name = "linker";
  tool.required_cells = {cells::kCommand};
  tool.provided_cells = {cells::kLinks};
  tool.run = [](ToolContext &context) {
    const Movie &movie = context.movie();
    auto links = link_frames(movie);
    for (const Frame *frame : movie.frames()) {
      if (context.cancelled()) return;
      auto it = links.find(frame->id);
      if (it == links.end() || frame->cells.contains(cells::kLinks)) continue;
      context.submit(frame->id, {{cells::kLinks, to_json(it->second)}});
    }
  };
  return tool;
}

} // namespace reel
