#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "invlab/bits.hpp"
#include "invlab/reduction.hpp"

namespace invlab {

/// JSON-lines transcript export: one message object per line, then a summary
/// record with the outputs, the exact bit total, and the per-round ceiling.
inline void write_transcript_jsonl(const Transcript& tr, std::ostream& os) {
  for (std::size_t i = 0; i < tr.messages.size(); ++i) {
    const Message& m = tr.messages[i];
    nlohmann::ordered_json j;
    j["step"] = i;
    j["sender"] = m.sender == Party::A ? "A" : "B";
    j["tag"] = tag_name(m.tag);
    j["bits"] = m.bit_count;
    j["payload_hex"] = m.payload.to_hex();
    os << j.dump() << "\n";
  }
  nlohmann::ordered_json s;
  s["type"] = "summary";
  s["n"] = tr.n;
  s["s"] = tr.s;
  s["q"] = tr.q;
  s["rounds"] = tr.rounds;
  s["out_a"] = tr.out_a;
  s["out_b"] = tr.out_b;
  s["total_bits"] = tr.total_bits;
  s["cc_bound"] = cc_bound(tr.s, tr.q, tr.n);
  os << s.dump() << "\n";
}

struct AuditResult {
  bool ok = false;
  std::string error;
  std::uint64_t messages = 0;
  std::uint64_t total_bits = 0;
};

/// Re-verifies a stored transcript: every payload must decode to exactly its
/// declared bit count (zero padding), the bit sum must match the summary,
/// and the total must respect rounds * cc_bound(s, q, n).
inline AuditResult audit_transcript_jsonl(std::istream& is) {
  AuditResult res;
  std::uint64_t sum = 0;
  bool saw_summary = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      res.error = "line " + std::to_string(lineno) + ": " + e.what();
      return res;
    }
    if (saw_summary) {
      res.error = "line " + std::to_string(lineno) + ": data after summary";
      return res;
    }
    if (j.contains("type") && j["type"] == "summary") {
      saw_summary = true;
      std::uint64_t total = j.at("total_bits").get<std::uint64_t>();
      if (total != sum) {
        res.error = "summary total_bits " + std::to_string(total) +
                    " != recomputed " + std::to_string(sum);
        return res;
      }
      std::uint64_t rounds = j.at("rounds").get<std::uint64_t>();
      std::uint64_t bound = cc_bound(j.at("s").get<std::uint64_t>(),
                                     j.at("q").get<std::uint64_t>(),
                                     j.at("n").get<std::uint64_t>());
      if (j.at("cc_bound").get<std::uint64_t>() != bound) {
        res.error = "summary cc_bound does not match recomputation";
        return res;
      }
      if (total > rounds * bound) {
        res.error = "total_bits " + std::to_string(total) + " exceeds " +
                    std::to_string(rounds) + " * cc_bound " + std::to_string(bound);
        return res;
      }
      continue;
    }
    std::uint64_t bits = j.at("bits").get<std::uint64_t>();
    std::string hex = j.at("payload_hex").get<std::string>();
    try {
      BitString payload = BitString::from_hex(hex, bits);
      if (payload.size() != bits) throw DomainError("bit count mismatch");
    } catch (const std::exception& e) {
      res.error = "line " + std::to_string(lineno) + ": bad payload: " + e.what();
      return res;
    }
    std::string tag = j.at("tag").get<std::string>();
    if (tag != "advice" && tag != "query" && tag != "answer" && tag != "final") {
      res.error = "line " + std::to_string(lineno) + ": unknown tag " + tag;
      return res;
    }
    sum += bits;
    ++res.messages;
  }
  if (!saw_summary) {
    res.error = "missing summary record";
    return res;
  }
  res.total_bits = sum;
  res.ok = true;
  return res;
}

}  // namespace invlab
