#include "montage/parsers.hpp"

#include <cctype>
#include <optional>

#include "montage/text.hpp"

namespace montage {

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

// Content of a list line without its marker, or nullopt if unmarked.
std::optional<std::string_view> strip_marker(std::string_view line) {
  line = trim(line);
  if (line.empty()) return std::nullopt;
  static constexpr std::string_view kBullet = "\xE2\x80\xA2";  // U+2022
  if (line.front() == '-' || line.front() == '*' || line.front() == '+') {
    // "**Bold**" is emphasis, not a bullet.
    if (line.size() > 1 && line[0] == '*' && line[1] == '*') return std::nullopt;
    return trim(line.substr(1));
  }
  if (line.substr(0, kBullet.size()) == kBullet) return trim(line.substr(kBullet.size()));
  std::size_t i = 0;
  while (i < line.size() && is_digit(line[i])) ++i;
  if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')') &&
      (i + 1 == line.size() || std::isspace(static_cast<unsigned char>(line[i + 1]))))
    return trim(line.substr(i + 1));
  return std::nullopt;
}

bool is_none_item(std::string_view item) {
  const std::string key = to_lower_ascii(trim(item));
  return key == "none" || key == "none." || key == "(none)" || key == "n/a" ||
         key == "[]" || key == "-";
}

// Marked lines when any line is marked, otherwise all non-empty lines.
std::vector<std::string> list_items(const std::vector<std::string_view>& lines) {
  std::vector<std::string> marked, plain;
  for (std::string_view line : lines) {
    if (trim(line).empty()) continue;
    if (auto item = strip_marker(line)) {
      if (!item->empty()) marked.emplace_back(*item);
    } else {
      plain.emplace_back(trim(line));
    }
  }
  return marked.empty() ? plain : marked;
}

std::string_view strip_decoration(std::string_view s) {
  auto deco = [](char c) {
    return c == '*' || c == '`' || c == '"' || c == '\'' || c == '<' || c == '>' ||
           c == '#' || c == '_' || c == '-' || std::isspace(static_cast<unsigned char>(c));
  };
  while (!s.empty() && deco(s.front())) s.remove_prefix(1);
  while (!s.empty() && deco(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<std::string> parse_event_list(std::string_view raw) {
  std::vector<std::string> items = list_items(split_lines(raw));
  std::erase_if(items, [](const std::string& s) { return is_none_item(s); });
  if (items.empty()) throw Error(Errc::empty_event_list, "no events in response");
  return items;
}

FactLists parse_fact_lists(std::string_view raw) {
  enum class Section { none, event, descriptive };
  Section current = Section::none;
  bool saw_event = false, saw_descriptive = false;
  std::vector<std::string_view> event_lines, descriptive_lines;

  for (std::string_view line : split_lines(raw)) {
    const std::string lower = to_lower_ascii(line);
    const bool has_event = lower.find("event facts") != std::string::npos ||
                           lower.find("event fact list") != std::string::npos;
    const bool has_desc = lower.find("descriptive facts") != std::string::npos ||
                          lower.find("descriptive fact list") != std::string::npos;
    if (has_event && has_desc) continue;  // echoed "Event ... and Descriptive ..." line
    if (has_event || has_desc) {
      current = has_event ? Section::event : Section::descriptive;
      (has_event ? saw_event : saw_descriptive) = true;
      // Items may follow the heading on the same line.
      const std::size_t colon = line.find(':');
      if (colon != std::string_view::npos) {
        std::string_view rest = trim(line.substr(colon + 1));
        if (!rest.empty() && strip_decoration(rest).size() > 0)
          (has_event ? event_lines : descriptive_lines).push_back(rest);
      }
      continue;
    }
    if (current == Section::event) event_lines.push_back(line);
    if (current == Section::descriptive) descriptive_lines.push_back(line);
  }
  if (!saw_event) throw Error(Errc::missing_section, "event");
  if (!saw_descriptive) throw Error(Errc::missing_section, "descriptive");

  FactLists out;
  out.event_facts = list_items(event_lines);
  out.descriptive_facts = list_items(descriptive_lines);
  std::erase_if(out.event_facts, [](const std::string& s) { return is_none_item(s); });
  std::erase_if(out.descriptive_facts, [](const std::string& s) { return is_none_item(s); });
  return out;
}

Verdict parse_verdict(std::string_view raw) {
  std::string_view s = trim(raw);
  auto alpha = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && !alpha(s.front())) s.remove_prefix(1);
  std::size_t n = 0;
  while (n < s.size() && alpha(s[n])) ++n;
  const std::string word = to_lower_ascii(s.substr(0, n));
  if (word == "true") return Verdict::correct;
  if (word == "false") return Verdict::incorrect;
  return Verdict::unverifiable;
}

namespace {

std::vector<std::string> split_bracketed(std::string_view body) {
  std::vector<std::string> items;
  std::size_t i = 0;
  while (i < body.size()) {
    while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
    if (i >= body.size()) break;
    std::string item;
    const char q = body[i];
    bool quoted = false;
    if (q == '"' || q == '\'') {
      const std::size_t close = body.find(q, i + 1);
      if (close != std::string_view::npos) {
        std::size_t after = close + 1;
        while (after < body.size() && std::isspace(static_cast<unsigned char>(body[after]))) ++after;
        if (after == body.size() || body[after] == ',') {
          item = std::string(body.substr(i + 1, close - i - 1));
          i = after + 1;
          quoted = true;
        }
      }
    }
    if (!quoted) {
      std::size_t comma = body.find(',', i);
      if (comma == std::string_view::npos) comma = body.size();
      item = std::string(trim(body.substr(i, comma - i)));
      i = comma + 1;
    }
    item = std::string(trim(item));
    if (!item.empty()) items.push_back(std::move(item));
  }
  return items;
}

}  // namespace

std::vector<std::string> parse_sorted_events(std::string_view raw) {
  const std::size_t open = raw.find('[');
  const std::size_t close = raw.rfind(']');
  if (open != std::string_view::npos && close != std::string_view::npos && close > open) {
    auto items = split_bracketed(raw.substr(open + 1, close - open - 1));
    if (!items.empty()) return items;
  }
  std::vector<std::string> items;
  for (std::string_view line : split_lines(raw))
    if (auto item = strip_marker(line); item && !item->empty()) items.emplace_back(*item);
  if (items.empty()) throw Error(Errc::unparseable_order, std::string(trim(raw)).substr(0, 80));
  return items;
}

std::string_view to_string(NarrativeTechnique t) noexcept {
  switch (t) {
    case NarrativeTechnique::chronological: return "chronological";
    case NarrativeTechnique::flashback: return "flashback";
    case NarrativeTechnique::interjection: return "interjection";
    case NarrativeTechnique::supplementary_narration: return "supplementary narration";
  }
  return "chronological";
}

namespace {

NarrativeTechnique parse_technique(std::string_view value) {
  std::string s;
  for (char c : strip_decoration(value)) {
    if (c == '_' || c == '-') c = ' ';
    if (c == ' ' && (s.empty() || s.back() == ' ')) continue;
    s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '.')) s.pop_back();
  if (s.size() > 6 && s.ends_with(" order")) s.resize(s.size() - 6);
  if (s == "chronological") return NarrativeTechnique::chronological;
  if (s == "flashback") return NarrativeTechnique::flashback;
  if (s == "interjection") return NarrativeTechnique::interjection;
  if (s == "supplementary narration" || s == "supplementary")
    return NarrativeTechnique::supplementary_narration;
  throw Error(Errc::unknown_technique, std::string(trim(value)));
}

// If `line` is "<label>: value" for one of `labels`, returns the value.
std::optional<std::string_view> labelled(std::string_view line,
                                         std::initializer_list<std::string_view> labels) {
  std::string_view s = trim(line);
  while (!s.empty() && (s.front() == '-' || s.front() == '*' || s.front() == '`' ||
                        s.front() == ' '))
    s.remove_prefix(1);
  const std::string lower = to_lower_ascii(s);
  for (std::string_view label : labels) {
    if (lower.rfind(label, 0) != 0) continue;
    std::size_t i = label.size();
    while (i < s.size() && (s[i] == '*' || s[i] == '`' || s[i] == ' ')) ++i;
    if (i < s.size() && s[i] == ':') {
      ++i;
      while (i < s.size() && (s[i] == '*' || s[i] == '`')) ++i;
      return s.substr(i);
    }
  }
  return std::nullopt;
}

}  // namespace

RephraseResult parse_rephrase(std::string_view raw) {
  std::optional<std::string> original, chosen, rephrased;
  const auto lines = split_lines(raw);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!original) {
      if (auto v = labelled(lines[i], {"original_narrative_technique", "original narrative technique"})) {
        original = std::string(*v);
        continue;
      }
    }
    if (!chosen) {
      if (auto v = labelled(lines[i], {"choosed_narrative_technique", "chosen_narrative_technique",
                                       "choosed narrative technique", "chosen narrative technique"})) {
        chosen = std::string(*v);
        continue;
      }
    }
    if (auto v = labelled(lines[i], {"rephrased"})) {
      std::string text(*v);
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        text += '\n';
        text += lines[j];
      }
      rephrased = std::string(strip_decoration(trim(text)).empty() ? "" : trim(text));
      break;
    }
  }
  if (!original) throw Error(Errc::missing_field, "Original_Narrative_Technique");
  if (!chosen) throw Error(Errc::missing_field, "Choosed_Narrative_Technique");
  if (!rephrased || rephrased->empty()) throw Error(Errc::missing_field, "Rephrased");
  return {parse_technique(*original), parse_technique(*chosen), std::move(*rephrased)};
}

int parse_consistency_score(std::string_view raw) {
  std::size_t start = 0;
  const std::string lower = to_lower_ascii(raw);
  if (const std::size_t label = lower.find("consistency"); label != std::string::npos) {
    start = label + std::string_view("consistency").size();
    const std::size_t colon = lower.find(':', start);
    if (colon != std::string::npos && colon < lower.find('\n', start)) start = colon + 1;
  }
  for (std::size_t i = start; i < raw.size();) {
    if (!is_digit(raw[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < raw.size() && is_digit(raw[j])) ++j;
    if (j - i == 1 && raw[i] >= '1' && raw[i] <= '5') return raw[i] - '0';
    i = j;
  }
  throw Error(Errc::no_score_found, std::string(trim(raw)).substr(0, 80));
}

}  // namespace montage
