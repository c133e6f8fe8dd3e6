// JSON forms of outcomes, verdicts, certificates, reports and answers, and
// the ResultRecord envelope shared by --json output and the corpus store.
//
// A record is one JSON object:
//
//   {"kind", "machine", "input", "budget", "payload", "tool_version", "hash", "meta"}
//
// hash is the SHA-256 (hex) of the canonical dump (sorted keys, no
// whitespace) of every field except hash and meta. meta holds whatever may
// differ between identical runs, such as elapsed time.

#ifndef TMLAB_RECORDS_HPP_
#define TMLAB_RECORDS_HPP_

#include <chrono>
#include <string>
#include <string_view>

#include "json.hpp"
#include "tmlab/containment.hpp"
#include "tmlab/enumerate.hpp"
#include "tmlab/rice.hpp"

namespace tmlab {

using Json = nlohmann::json;

inline constexpr std::string_view kToolVersion = "tmlab 1.0.0";

class RecordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json limits_to_json(const RunLimits& lim);

Json outcome_to_json(const RunOutcome& o);
Json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const Json& j);  // throws RecordError
Json verdict_to_json(const Verdict& v);
Verdict verdict_from_json(const Json& j);  // throws RecordError
Json threshold_to_json(const ThresholdAnswer& a, std::uint64_t k);
Json report_to_json(const EnumerationReport& r);
Json rice_to_json(const RiceVerdict& v);
Json answer_to_json(const OracleAnswer& a);
Json scorecard_to_json(const Scorecard& s);

struct ResultRecord {
  std::string kind;  // outcome, verdict, threshold, enumeration, rice, harm, scorecard, utm
  std::string machine;
  std::string input;
  Json budget = Json::object();
  Json payload = Json::object();
  std::string tool_version{kToolVersion};
  std::string hash;
  Json meta = Json::object();

  // payload["status"] when present, else "".
  std::string status() const;
};

std::string sha256_hex(std::string_view data);
std::string content_hash(const ResultRecord& r);
// Fills in hash.
ResultRecord seal(ResultRecord r);
bool verify(const ResultRecord& r);

Json record_to_json(const ResultRecord& r);
ResultRecord record_from_json(const Json& j);  // throws RecordError
std::string record_line(const ResultRecord& r);  // one line, no newline
ResultRecord parse_record_line(std::string_view line);  // throws RecordError

ResultRecord outcome_record(std::string machine, const InputWord& w, const RunLimits& lim, const RunOutcome& o,
                            std::chrono::milliseconds elapsed = {});
ResultRecord verdict_record(std::string machine, const InputWord& w, const RunLimits& lim, const Verdict& v);

}  // namespace tmlab

#endif  // TMLAB_RECORDS_HPP_
