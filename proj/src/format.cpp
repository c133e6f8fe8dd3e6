#include "tmlab/format.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

namespace tmlab {

namespace {

// With check_range false only the grammar is checked, so truncation is
// reported before any out-of-range letter.
Transition parse_code(std::string_view text, std::size_t at, std::size_t num_states, bool check_range) {
  auto need = [&](std::size_t i) {
    if (i >= text.size()) throw FormatError("truncated transition code", i);
    return text[i];
  };
  const char w = need(at);
  if (w != '0' && w != '1') throw FormatError("write symbol must be 0 or 1", at);
  const char d = need(at + 1);
  if (d != 'L' && d != 'R') throw FormatError("direction must be L or R", at + 1);
  const char q = need(at + 2);
  if (q < 'A' || q > 'Z') throw FormatError("unknown state letter", at + 2);
  Transition t;
  t.write = static_cast<Symbol>(w - '0');
  t.move = d == 'L' ? Move::Left : Move::Right;
  if (q == 'Z') {
    t.next = kHaltState;
  } else {
    const auto idx = static_cast<std::size_t>(q - 'A');
    if (check_range && idx >= num_states) throw FormatError("state letter beyond group count", at + 2);
    t.next = static_cast<StateIndex>(idx);
  }
  return t;
}

bool is_undefined_code(std::string_view text, std::size_t at) {
  if (at >= text.size() || text[at] != '-') return false;
  for (std::size_t i = at; i < at + 3; ++i) {
    if (i >= text.size()) throw FormatError("truncated transition code", i);
    if (text[i] != '-') throw FormatError("undefined transition must be ---", i);
  }
  return true;
}

}  // namespace

Machine parse_machine(std::string_view text) {
  if (text.empty()) throw FormatError("empty machine text", 0);
  const std::size_t groups = static_cast<std::size_t>(std::count(text.begin(), text.end(), '_')) + 1;
  if (groups > kMaxTextStates) throw FormatError("more groups than state letters", 0);
  Machine m(groups);
  for (const bool check_range : {false, true}) {
    std::size_t at = 0;
    for (std::size_t g = 0; g < groups; ++g) {
      if (g > 0) {
        if (at >= text.size() || text[at] != '_') throw FormatError("expected group separator", at);
        ++at;
      }
      for (Symbol s = 0; s < 2; ++s) {
        if (at < text.size() && text[at] == '_') throw FormatError("truncated group", at);
        if (!is_undefined_code(text, at)) {
          const Transition t = parse_code(text, at, groups, check_range);
          if (check_range) m.set(static_cast<StateIndex>(g), s, t);
        }
        at += 3;
      }
    }
    if (at != text.size()) throw FormatError("trailing characters", at);
  }
  return m;
}

std::string serialize_machine(const Machine& m) {
  if (m.num_states() == 0) throw FormatError("machine has no states", 0);
  if (m.num_states() > kMaxTextStates) throw FormatError("too many states for letter encoding", 0);
  std::string out;
  out.reserve(m.num_states() * 7);
  for (std::size_t q = 0; q < m.num_states(); ++q) {
    if (q > 0) out.push_back('_');
    for (Symbol s = 0; s < 2; ++s) {
      const auto& t = m.at(static_cast<StateIndex>(q), s);
      if (!t) {
        out += "---";
        continue;
      }
      out.push_back(static_cast<char>('0' + t->write));
      out.push_back(t->move == Move::Left ? 'L' : 'R');
      out.push_back(state_letter(t->next));
    }
  }
  return out;
}

std::string_view to_string(CorpusStatus s) {
  switch (s) {
    case CorpusStatus::Halts: return "halts";
    case CorpusStatus::CertifiedNonhalting: return "certified-nonhalting";
    case CorpusStatus::Holdout: return "holdout";
  }
  return "holdout";
}

std::optional<CorpusStatus> parse_corpus_status(std::string_view s) {
  if (s == "halts") return CorpusStatus::Halts;
  if (s == "certified-nonhalting") return CorpusStatus::CertifiedNonhalting;
  if (s == "holdout") return CorpusStatus::Holdout;
  return std::nullopt;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::uint64_t parse_count(std::string_view field, std::size_t line) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw FormatError("malformed count '" + std::string(field) + "'", 0, line);
  }
  return v;
}

}  // namespace

std::vector<CorpusEntry> parse_corpus(std::istream& in) {
  std::vector<CorpusEntry> entries;
  std::map<std::string, std::size_t, std::less<>> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() < 2 || fields.size() > 5) {
      throw FormatError("expected 2 to 5 tab-separated fields", 0, lineno);
    }
    CorpusEntry e;
    e.name = std::string(fields[0]);
    e.text = std::string(fields[1]);
    e.line = lineno;
    if (e.name.empty()) throw FormatError("empty entry name", 0, lineno);
    try {
      e.machine = parse_machine(e.text);
    } catch (const FormatError& err) {
      throw FormatError(std::string(err.what()) + " in '" + e.text + "'", err.offset(), lineno);
    }
    std::optional<std::string_view> status_field;
    if (fields.size() == 3) status_field = fields[2];
    if (fields.size() >= 4) e.expected = ExpectedCounts{parse_count(fields[2], lineno), parse_count(fields[3], lineno)};
    if (fields.size() == 5) status_field = fields[4];
    if (status_field) {
      const auto st = parse_corpus_status(*status_field);
      if (!st) throw FormatError("unknown status '" + std::string(*status_field) + "'", 0, lineno);
      e.status = *st;
    } else {
      e.status = e.expected ? CorpusStatus::Halts : CorpusStatus::Holdout;
    }
    if (e.expected && e.status != CorpusStatus::Halts) {
      throw FormatError("expected counts given for a non-halting entry", 0, lineno);
    }
    if (const auto it = seen.find(e.text); it != seen.end()) {
      throw FormatError("duplicate machine text on lines " + std::to_string(it->second) + " and " +
                            std::to_string(lineno),
                        0, lineno);
    }
    seen.emplace(e.text, lineno);
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file " + path.string());
  return parse_corpus(in);
}

std::string format_corpus_line(const CorpusEntry& e) {
  std::ostringstream out;
  out << e.name << '\t' << e.text;
  if (e.expected) {
    out << '\t' << e.expected->steps << '\t' << e.expected->marks;
  } else {
    out << '\t' << to_string(e.status);
  }
  return out.str();
}

const CorpusEntry* find_entry(const std::vector<CorpusEntry>& corpus, std::string_view name) {
  for (const auto& e : corpus) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

}  // namespace tmlab
