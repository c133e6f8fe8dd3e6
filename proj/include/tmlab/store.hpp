// Append-only result store: one directory per record kind, JSONL files named
// <date>-<hash prefix>.jsonl, one record per line. Each append writes a new
// file (via a temporary name and rename, so readers never see partial
// lines); records already present are skipped.

#ifndef TMLAB_STORE_HPP_
#define TMLAB_STORE_HPP_

#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tmlab/records.hpp"

namespace tmlab {

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AppendResult {
  std::size_t appended = 0;
  std::size_t duplicates = 0;
  std::optional<std::filesystem::path> file;  // when anything was appended
  std::string note;
};

struct StoreFilter {
  std::optional<std::string> kind;
  std::optional<std::string> machine;
  std::optional<std::string> status;
  std::optional<std::size_t> states;  // payload "n", enumeration reports
};

struct StoreProblem {
  std::filesystem::path file;
  std::size_t line = 0;
  std::string what;
};

// Default root: $TMLAB_CORPUS, else ./results.
std::filesystem::path default_store_root();

class CorpusStore {
 public:
  explicit CorpusStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  // Throws StoreError when a record's hash does not match its content or on
  // I/O failure; nothing is written in either case.
  AppendResult append(const ResultRecord& r);
  AppendResult append(const std::vector<ResultRecord>& records);

  // Valid records matching the filter, deduplicated, in hash order. Lines
  // that fail to parse or verify are skipped and reported by problems().
  std::vector<ResultRecord> query(const StoreFilter& f = {}) const;
  std::vector<StoreProblem> problems() const;

 private:
  std::vector<ResultRecord> scan(std::vector<StoreProblem>* problems) const;

  std::filesystem::path root_;
  mutable std::mutex mu_;
};

}  // namespace tmlab

#endif  // TMLAB_STORE_HPP_
