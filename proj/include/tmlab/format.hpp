// Compact machine text ("1RB1LB_1LA1RZ") and the corpus TSV format.

#ifndef TMLAB_FORMAT_HPP_
#define TMLAB_FORMAT_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tmlab/machine.hpp"

namespace tmlab {

// Letters A..Y name states; Z is the halt state.
inline constexpr std::size_t kMaxTextStates = 25;

class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset, std::size_t line = 0)
      : std::runtime_error(what), offset_(offset), line_(line) {}

  // Character offset within the machine text, when the error is in one.
  std::size_t offset() const { return offset_; }
  // 1-based corpus line, or 0 when not parsing a corpus.
  std::size_t line() const { return line_; }

 private:
  std::size_t offset_;
  std::size_t line_;
};

Machine parse_machine(std::string_view text);
std::string serialize_machine(const Machine& m);

enum class CorpusStatus { Halts, CertifiedNonhalting, Holdout };

std::string_view to_string(CorpusStatus s);
std::optional<CorpusStatus> parse_corpus_status(std::string_view s);

struct ExpectedCounts {
  std::uint64_t steps = 0;
  std::uint64_t marks = 0;
  friend bool operator==(const ExpectedCounts&, const ExpectedCounts&) = default;
};

struct CorpusEntry {
  std::string name;
  std::string text;
  Machine machine;
  std::optional<ExpectedCounts> expected;  // present only when status is Halts
  CorpusStatus status = CorpusStatus::Holdout;
  std::size_t line = 0;
};

// Lines are "name<TAB>text[<TAB>steps<TAB>marks][<TAB>status]"; '#' starts a
// comment line. Duplicate machine texts are rejected.
std::vector<CorpusEntry> parse_corpus(std::istream& in);
std::vector<CorpusEntry> load_corpus(const std::filesystem::path& path);
std::string format_corpus_line(const CorpusEntry& e);

const CorpusEntry* find_entry(const std::vector<CorpusEntry>& corpus, std::string_view name);

}  // namespace tmlab

#endif  // TMLAB_FORMAT_HPP_
