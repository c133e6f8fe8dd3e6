#include "tmlab/records.hpp"

#include <openssl/evp.h>

#include <cstdio>

#include "tmlab/format.hpp"

namespace tmlab {

namespace {

std::string dec(const BigNat& n) { return to_decimal(n); }

BigNat big(const Json& j) {
  if (!j.is_string()) throw RecordError("expected a decimal string");
  try {
    return parse_count(j.get<std::string>());
  } catch (const std::exception& e) {
    throw RecordError(std::string("bad count: ") + e.what());
  }
}

std::string_view to_string(HaltForm f) {
  switch (f) {
    case HaltForm::None: return "none";
    case HaltForm::ViaZ: return "Z";
    case HaltForm::ViaUndefined: return "undefined";
  }
  return "none";
}

std::string state_name(StateIndex q) { return q == kHaltState ? std::string("Z") : std::string(1, state_letter(q)); }

}  // namespace

Json limits_to_json(const RunLimits& lim) {
  Json j = {{"max_steps", dec(lim.max_steps)}, {"max_cells", lim.max_cells}};
  if (lim.wall_clock) j["wall_clock_ms"] = lim.wall_clock->count();
  return j;
}

Json outcome_to_json(const RunOutcome& o) {
  Json j = {{"status", std::string(to_string(o.kind))},
            {"steps", dec(o.steps)},
            {"marks", o.marks},
            {"head", o.head},
            {"halt_form", std::string(to_string(o.halt_form))}};
  if (o.halted()) j["halting_state"] = o.halting_state ? state_name(*o.halting_state) : "";
  j["final_state"] = o.final_state < kMaxTextStates || o.final_state == kHaltState
                         ? Json(state_name(o.final_state))
                         : Json(o.final_state);
  if (o.halted_via_gadget) j["via_gadget"] = true;
  if (!o.visited.empty()) j["visited"] = {o.visited.lo, o.visited.hi};
  return j;
}

Json certificate_to_json(const Certificate& c) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ExactCycle>) {
          return {{"type", "ExactCycle"}, {"start", x.start}, {"period", x.period}};
        } else if constexpr (std::is_same_v<T, TranslatedCycle>) {
          return {{"type", "TranslatedCycle"}, {"start", x.start}, {"period", x.period}, {"offset", x.offset}};
        } else if constexpr (std::is_same_v<T, BackwardRefutation>) {
          return {{"type", "BackwardRefutation"}, {"depth", x.depth}};
        } else {
          Json configs = Json::array();
          for (const LocalConfig& lc : x.configs) {
            configs.push_back({lc.state, lc.left, std::string(1, lc.head), lc.right});
          }
          return {{"type", "ClosedPositionSet"}, {"gram", x.gram},          {"modulus", x.modulus},
                  {"configs", configs},         {"left_grams", x.left_grams}, {"right_grams", x.right_grams}};
        }
      },
      c);
}

Certificate certificate_from_json(const Json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "ExactCycle") {
      return ExactCycle{j.at("start").get<std::uint64_t>(), j.at("period").get<std::uint64_t>()};
    }
    if (type == "TranslatedCycle") {
      return TranslatedCycle{j.at("start").get<std::uint64_t>(), j.at("period").get<std::uint64_t>(),
                             j.at("offset").get<std::int64_t>()};
    }
    if (type == "BackwardRefutation") return BackwardRefutation{j.at("depth").get<std::uint64_t>()};
    if (type == "ClosedPositionSet") {
      ClosedPositionSet c;
      c.gram = j.at("gram").get<std::uint32_t>();
      c.modulus = j.at("modulus").get<std::uint32_t>();
      for (const Json& e : j.at("configs")) {
        const std::string head = e.at(2).get<std::string>();
        if (head.size() != 1) throw RecordError("bad head cell");
        c.configs.push_back(LocalConfig{e.at(0).get<StateIndex>(), e.at(1).get<std::string>(), head[0],
                                        e.at(3).get<std::string>()});
      }
      c.left_grams = j.at("left_grams").get<std::vector<std::string>>();
      c.right_grams = j.at("right_grams").get<std::vector<std::string>>();
      return c;
    }
    throw RecordError("unknown certificate type " + type);
  } catch (const Json::exception& e) {
    throw RecordError(std::string("malformed certificate: ") + e.what());
  }
}

Json verdict_to_json(const Verdict& v) {
  Json j = {{"status", std::string(to_string(v.kind))}};
  switch (v.kind) {
    case VerdictKind::Halts:
      j["steps"] = dec(v.steps);
      j["marks"] = v.marks;
      break;
    case VerdictKind::NeverHalts:
      j["certificate"] = certificate_to_json(*v.certificate);
      j["evidence"] = describe(*v.certificate);
      break;
    case VerdictKind::Unknown:
      j["budget_spent"] = dec(v.budget_spent);
      break;
  }
  return j;
}

Verdict verdict_from_json(const Json& j) {
  try {
    const std::string s = j.at("status").get<std::string>();
    if (s == "Halts") return Verdict::halts(big(j.at("steps")), j.at("marks").get<std::uint64_t>());
    if (s == "NeverHalts") return Verdict::never_halts(certificate_from_json(j.at("certificate")));
    if (s == "Unknown") return Verdict::unknown(big(j.at("budget_spent")));
    throw RecordError("unknown verdict " + s);
  } catch (const Json::exception& e) {
    throw RecordError(std::string("malformed verdict: ") + e.what());
  }
}

Json threshold_to_json(const ThresholdAnswer& a, std::uint64_t k) {
  return {{"status", std::string(to_string(a.kind))}, {"threshold", k}, {"evidence", verdict_to_json(a.evidence)}};
}

Json report_to_json(const EnumerationReport& r) {
  return {{"status", r.closed() ? "closed" : "open"},
          {"n", r.states},
          {"sigma", r.sigma},
          {"s", r.s},
          {"champions", r.champions},
          {"step_champions", r.step_champions},
          {"holdouts", r.holdouts},
          {"halting", r.halting},
          {"nonhalting", r.nonhalting},
          {"budget", dec(r.budget)}};
}

Json rice_to_json(const RiceVerdict& v) {
  Json ws = Json::array();
  for (const RiceWitness& w : v.witnesses) {
    Json x = {{"word", w.word.to_string()}, {"machine", w.machine + 1}};
    if (w.halt_steps) x["halt_steps"] = dec(*w.halt_steps);
    if (w.certificate) x["certificate"] = certificate_to_json(*w.certificate);
    ws.push_back(std::move(x));
  }
  return {{"problem", std::string(to_string(v.problem))},
          {"status", std::string(to_string(v.kind))},
          {"witnesses", ws},
          {"word_length", v.word_length},
          {"words_tried", v.words_tried},
          {"steps", dec(v.steps)},
          {"note", v.note}};
}

Json answer_to_json(const OracleAnswer& a) {
  Json j = {{"status", std::string(to_string(a.kind))}, {"justification", a.justification}};
  if (a.steps) j["steps"] = dec(*a.steps);
  if (a.certificate) j["certificate"] = certificate_to_json(*a.certificate);
  return j;
}

Json scorecard_to_json(const Scorecard& s) {
  Json items = Json::array();
  for (const ScoreItem& i : s.items) {
    items.push_back({{"name", i.name}, {"truth", std::string(to_string(i.truth))},
                     {"answer", std::string(to_string(i.answer))}});
  }
  return {{"oracle", s.oracle},
          {"correct_harmful", s.correct_harmful},
          {"correct_safe", s.correct_safe},
          {"false_harmful", s.false_harmful},
          {"false_safe", s.false_safe},
          {"unknown_on_harmful", s.unknown_on_harmful},
          {"unknown_on_safe", s.unknown_on_safe},
          {"unknown_on_unknown", s.unknown_on_unknown},
          {"harmful_on_unknown", s.harmful_on_unknown},
          {"safe_on_unknown", s.safe_on_unknown},
          {"errors", s.errors()},
          {"items", items}};
}

std::string ResultRecord::status() const {
  const auto it = payload.find("status");
  return it != payload.end() && it->is_string() ? it->get<std::string>() : std::string();
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw RecordError("SHA-256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

namespace {

Json semantic(const ResultRecord& r) {
  return {{"kind", r.kind},     {"machine", r.machine},           {"input", r.input},
          {"budget", r.budget}, {"payload", r.payload}, {"tool_version", r.tool_version}};
}

}  // namespace

std::string content_hash(const ResultRecord& r) { return sha256_hex(semantic(r).dump()); }

ResultRecord seal(ResultRecord r) {
  r.hash = content_hash(r);
  return r;
}

bool verify(const ResultRecord& r) { return r.hash == content_hash(r); }

Json record_to_json(const ResultRecord& r) {
  Json j = semantic(r);
  j["hash"] = r.hash;
  j["meta"] = r.meta;
  return j;
}

ResultRecord record_from_json(const Json& j) {
  try {
    ResultRecord r;
    r.kind = j.at("kind").get<std::string>();
    r.machine = j.at("machine").get<std::string>();
    r.input = j.at("input").get<std::string>();
    r.budget = j.at("budget");
    r.payload = j.at("payload");
    r.tool_version = j.at("tool_version").get<std::string>();
    r.hash = j.at("hash").get<std::string>();
    r.meta = j.value("meta", Json::object());
    return r;
  } catch (const Json::exception& e) {
    throw RecordError(std::string("malformed record: ") + e.what());
  }
}

std::string record_line(const ResultRecord& r) { return record_to_json(r).dump(); }

ResultRecord parse_record_line(std::string_view line) {
  Json j = Json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw RecordError("record line is not a JSON object");
  return record_from_json(j);
}

ResultRecord outcome_record(std::string machine, const InputWord& w, const RunLimits& lim, const RunOutcome& o,
                            std::chrono::milliseconds elapsed) {
  ResultRecord r;
  r.kind = "outcome";
  r.machine = std::move(machine);
  r.input = w.to_string();
  r.budget = limits_to_json(lim);
  r.payload = outcome_to_json(o);
  r.meta = {{"elapsed_ms", elapsed.count()}, {"iterations", o.iterations}};
  return seal(std::move(r));
}

ResultRecord verdict_record(std::string machine, const InputWord& w, const RunLimits& lim, const Verdict& v) {
  ResultRecord r;
  r.kind = "verdict";
  r.machine = std::move(machine);
  r.input = w.to_string();
  r.budget = limits_to_json(lim);
  r.payload = verdict_to_json(v);
  return seal(std::move(r));
}

}  // namespace tmlab
