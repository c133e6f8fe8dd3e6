// Result records and the corpus store.

#include "doctest.h"

#include <fstream>
#include <random>

#include <unistd.h>

#include "support.hpp"
#include "tmlab/enumerate.hpp"
#include "tmlab/format.hpp"
#include "tmlab/records.hpp"
#include "tmlab/store.hpp"

using namespace tmlab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("tmlab-store-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ResultRecord enumeration_record(std::size_t n) {
  EnumerationOptions o;
  ResultRecord r;
  r.kind = "enumeration";
  r.budget = limits_to_json(o.budget);
  r.payload = report_to_json(enumerate(n, o));
  return seal(std::move(r));
}

ResultRecord run_record(const char* text, const char* input = "") {
  const InputWord w = InputWord::from_string(input);
  const RunLimits lim = RunLimits::steps(100'000'000);
  return outcome_record(text, w, lim, run_direct(parse_machine(text), w, lim), std::chrono::milliseconds(3));
}

std::vector<fs::path> files_under(const fs::path& root) {
  std::vector<fs::path> out;
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.push_back(e.path());
  }
  return out;
}

}  // namespace

TEST_CASE("hash covers content and ignores meta") {
  ResultRecord a = run_record("1RB1LB_1LA1RZ");
  CHECK(verify(a));
  CHECK(a.hash.size() == 64);
  ResultRecord b = a;
  b.meta["elapsed_ms"] = 999;
  CHECK(verify(b));
  b.payload["marks"] = 5;
  CHECK_FALSE(verify(b));
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("identical runs give identical hashes") {
  const ResultRecord a = run_record("1RB1LC_1RC1RB_1RD0LE_1LA1LD_1RZ0LA");
  const ResultRecord b = run_record("1RB1LC_1RC1RB_1RD0LE_1LA1LD_1RZ0LA");
  CHECK(a.hash == b.hash);
  CHECK(a.payload["steps"] == "47176870");
  CHECK(a.payload["marks"] == 4098);
  CHECK(a.status() == "Halted");
  CHECK(enumeration_record(2).hash == enumeration_record(2).hash);
}

TEST_CASE("record lines round-trip") {
  const ResultRecord a = run_record("1RZ---", "101");
  const ResultRecord back = parse_record_line(record_line(a));
  CHECK(back.hash == a.hash);
  CHECK(back.machine == "1RZ---");
  CHECK(back.input == "101");
  CHECK(verify(back));
  CHECK(record_line(a).find('\n') == std::string::npos);
  CHECK_THROWS_AS(parse_record_line("{"), RecordError);
  CHECK_THROWS_AS(parse_record_line("{\"kind\": 3}"), RecordError);
}

TEST_CASE("certificates and verdicts round-trip through JSON") {
  EnumerationOptions o;
  o.keep_leaves = true;
  const auto rep = enumerate(3, o);
  std::size_t n = 0;
  for (const Leaf& l : rep.leaves) {
    const Verdict back = verdict_from_json(Json::parse(verdict_to_json(l.verdict).dump()));
    REQUIRE(back.kind == l.verdict.kind);
    if (l.verdict.kind == VerdictKind::Halts) {
      REQUIRE(back.steps == l.verdict.steps);
      REQUIRE(back.marks == l.verdict.marks);
    }
    if (l.verdict.certificate) {
      REQUIRE(back.certificate == l.verdict.certificate);
      REQUIRE(validate_certificate(l.machine, {}, *back.certificate));
      ++n;
    }
  }
  CHECK(n == rep.nonhalting);
  CHECK_THROWS_AS(certificate_from_json(Json{{"type", "nope"}}), RecordError);
}

TEST_CASE("empty store") {
  TempDir d;
  const CorpusStore s(d.path);
  CHECK(s.query().empty());
  CHECK(s.problems().empty());
}

TEST_CASE("append, dedupe and query") {
  TempDir d;
  CorpusStore s(d.path);
  const ResultRecord e2 = enumeration_record(2);
  const ResultRecord e3 = enumeration_record(3);
  const ResultRecord c4 = run_record("1RB1LB_1LA0LC_1RZ1LD_1RD0RA");
  const ResultRecord loop = run_record("1RA1RA");

  const AppendResult first = s.append(std::vector<ResultRecord>{e2, c4});
  CHECK(first.appended == 2);
  REQUIRE(first.file);
  CHECK(first.file->extension() == ".jsonl");
  // One file per kind in a batch.
  CHECK(files_under(d.path).size() == 2);
  CHECK(fs::exists(d.path / "enumeration"));

  const AppendResult again = s.append(std::vector<ResultRecord>{e2, c4, e3, loop, loop});
  CHECK(again.appended == 2);
  CHECK(again.duplicates == 3);
  CHECK_FALSE(again.note.empty());
  const AppendResult none = s.append(e2);
  CHECK(none.appended == 0);
  CHECK_FALSE(none.file);

  CHECK(s.query().size() == 4);
  const auto n2 = s.query(StoreFilter{"enumeration", std::nullopt, std::nullopt, 2});
  REQUIRE(n2.size() == 1);
  CHECK(n2[0].payload["sigma"] == 4);
  CHECK(n2[0].payload["s"] == 6);
  const auto champ = s.query(StoreFilter{"outcome", "1RB1LB_1LA0LC_1RZ1LD_1RD0RA", std::nullopt, std::nullopt});
  REQUIRE(champ.size() == 1);
  CHECK(champ[0].payload["steps"] == "107");
  CHECK(champ[0].payload["marks"] == 13);
  CHECK(s.query(StoreFilter{"outcome", std::nullopt, "SpaceLimit", std::nullopt}).size() == 1);

  const auto all = s.query();
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].hash < all[i].hash);
}

TEST_CASE("corrupted records are rejected") {
  TempDir d;
  CorpusStore s(d.path);
  ResultRecord bad = run_record("1RZ---");
  bad.payload["marks"] = 7;
  CHECK_THROWS_AS(s.append(bad), StoreError);
  CHECK(files_under(d.path).empty());

  s.append(std::vector<ResultRecord>{run_record("1RZ---"), run_record("1RB1LB_1LA1RZ")});
  const auto files = files_under(d.path);
  REQUIRE(files.size() == 1);
  std::string text;
  {
    std::ifstream in(files[0]);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  const auto pos = text.find("\"marks\":1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 9, "\"marks\":2");
  text += "not json\n";
  {
    std::ofstream out(files[0], std::ios::trunc);
    out << text;
  }
  CHECK(s.query().size() == 1);
  CHECK(s.problems().size() == 2);
}
