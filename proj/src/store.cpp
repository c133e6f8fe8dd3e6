#include "tmlab/store.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>

namespace tmlab {

namespace fs = std::filesystem;

fs::path default_store_root() {
  if (const char* env = std::getenv("TMLAB_CORPUS"); env && *env) return env;
  return "results";
}

CorpusStore::CorpusStore(fs::path root) : root_(std::move(root)) {}

namespace {

bool valid_kind(const std::string& k) {
  return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) { return (c >= 'a' && c <= 'z') || c == '-'; });
}

std::string today() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[16];
  std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
  return buf;
}

bool matches(const ResultRecord& r, const StoreFilter& f) {
  if (f.kind && r.kind != *f.kind) return false;
  if (f.machine && r.machine != *f.machine) return false;
  if (f.status && r.status() != *f.status) return false;
  if (f.states) {
    const auto it = r.payload.find("n");
    if (it == r.payload.end() || !it->is_number_unsigned() || it->get<std::size_t>() != *f.states) return false;
  }
  return true;
}

}  // namespace

std::vector<ResultRecord> CorpusStore::scan(std::vector<StoreProblem>* problems) const {
  std::map<std::string, ResultRecord> by_hash;
  std::error_code ec;
  if (!fs::is_directory(root_, ec)) return {};
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root_, ec)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& file : files) {
    std::ifstream in(file);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (line.empty()) continue;
      try {
        ResultRecord r = parse_record_line(line);
        if (!verify(r)) throw RecordError("hash does not match content");
        by_hash.emplace(r.hash, std::move(r));
      } catch (const std::exception& e) {
        if (problems) problems->push_back({file, n, e.what()});
      }
    }
  }
  std::vector<ResultRecord> out;
  out.reserve(by_hash.size());
  for (auto& [h, r] : by_hash) out.push_back(std::move(r));
  return out;
}

AppendResult CorpusStore::append(const ResultRecord& r) { return append(std::vector<ResultRecord>{r}); }

AppendResult CorpusStore::append(const std::vector<ResultRecord>& records) {
  for (const ResultRecord& r : records) {
    if (!valid_kind(r.kind)) throw StoreError("record kind '" + r.kind + "' is not a lowercase name");
    if (!verify(r)) throw StoreError("rejected record: hash does not match content");
  }
  std::lock_guard lock(mu_);
  std::set<std::string> seen;
  for (const ResultRecord& r : scan(nullptr)) seen.insert(r.hash);

  AppendResult res;
  std::map<std::string, std::vector<const ResultRecord*>> fresh;  // by kind
  for (const ResultRecord& r : records) {
    if (!seen.insert(r.hash).second) {
      ++res.duplicates;
      continue;
    }
    fresh[r.kind].push_back(&r);
  }
  for (const auto& [kind, group] : fresh) {
    std::string hashes;
    std::string body;
    for (const ResultRecord* r : group) {
      hashes += r->hash;
      body += record_line(*r);
      body += '\n';
    }
    const fs::path dir = root_ / kind;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw StoreError("cannot create " + dir.string() + ": " + ec.message());
    const std::string stem = today() + "-" + sha256_hex(hashes).substr(0, 12);
    fs::path target = dir / (stem + ".jsonl");
    for (int k = 1; fs::exists(target); ++k) target = dir / (stem + "-" + std::to_string(k) + ".jsonl");
    const fs::path tmp = dir / ("." + target.filename().string() + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary);
      out << body;
      out.flush();
      if (!out) {
        fs::remove(tmp, ec);
        throw StoreError("cannot write " + tmp.string());
      }
    }
    fs::rename(tmp, target, ec);
    if (ec) {
      fs::remove(tmp, ec);
      throw StoreError("cannot rename into " + target.string());
    }
    res.appended += group.size();
    res.file = target;
  }
  if (res.duplicates) res.note = std::to_string(res.duplicates) + " duplicate record(s) skipped";
  return res;
}

std::vector<ResultRecord> CorpusStore::query(const StoreFilter& f) const {
  std::vector<ResultRecord> out;
  for (ResultRecord& r : scan(nullptr)) {
    if (matches(r, f)) out.push_back(std::move(r));
  }
  return out;
}

std::vector<StoreProblem> CorpusStore::problems() const {
  std::vector<StoreProblem> p;
  scan(&p);
  return p;
}

}  // namespace tmlab
