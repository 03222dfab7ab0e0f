#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "invlab/claims.hpp"
#include "invlab/inverters.hpp"
#include "invlab/reduction.hpp"
#include "invlab/transcript_io.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "invlab 0.1.0";

/// Fixed 17-significant-digit rendering for every CSV number, so repeated
/// runs compare byte for byte.
std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

std::string csv_bool(bool b) { return b ? "1" : "0"; }

json make_record(const std::string& command, json config) {
  json rec;
  rec["version"] = kVersion;
  rec["command"] = command;
  rec["config"] = std::move(config);
  rec["results"] = json::array();
  return rec;
}

/// Writes the chosen rendering to --out or stdout. Wall time never goes
/// here; it is reported on stderr only.
int emit(const json& record, const std::string& format,
         const std::string& out_path,
         const std::function<std::string(const json&)>& to_csv) {
  std::string body =
      format == "csv" ? to_csv(record) : record.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << body;
    return 0;
  }
  std::ofstream os(out_path);
  if (!os) {
    std::cerr << "cannot open output file " << out_path << "\n";
    return 2;
  }
  os << body;
  return 0;
}

// ---------------------------------------------------------------------------
// verify-claims
// ---------------------------------------------------------------------------

struct ClaimOptions {
  std::string claim = "all";
  std::uint64_t n = 17;
  std::uint64_t trials = 10000;
  std::uint64_t chain_steps = 2;
  double mu = 0.25;
  double gamma = 0.25;
  double tau = 0.25;
  double delta = 0.25;
  std::vector<std::uint64_t> p_list{2, 3, 5};
  std::uint64_t seed = 0;
};

json claim_row(const std::string& id, json params, double estimate, double ci,
               double bound, invlab::Verdict v, std::uint64_t trials,
               std::uint64_t seed) {
  json r;
  r["claim_id"] = id;
  r["params"] = std::move(params);
  r["estimate"] = estimate;
  r["ci"] = ci;
  r["bound"] = bound;
  r["verdict"] = invlab::verdict_name(v);
  r["trials"] = trials;
  r["seed"] = seed;
  return r;
}

json run_known_unit_vectors(const ClaimOptions& o) {
  invlab::ExhaustiveReport rep =
      invlab::verify_known_unit_vectors(o.p_list, 2, 3);
  json params;
  params["p"] = o.p_list;
  params["max_rows"] = 2;
  params["max_cols"] = 3;
  if (!rep.ok()) params["first_counterexample"] = rep.first_counterexample;
  double miss = rep.cases == 0
                    ? 0.0
                    : static_cast<double>(rep.counterexamples) /
                          static_cast<double>(rep.cases);
  return claim_row("known-unit-vectors", std::move(params), miss, 0.0, 0.0,
                   rep.ok() ? invlab::Verdict::PASS : invlab::Verdict::FAIL,
                   rep.cases, o.seed);
}

json run_good_indices(const ClaimOptions& o) {
  invlab::Rng rng(o.seed, 11);
  invlab::McReport m = invlab::verify_not_many_good_indices(
      o.n, invlab::singleton_sets(o.n), o.mu, o.trials, rng);
  json params;
  params["n"] = o.n;
  params["c"] = 1;
  params["mu"] = o.mu;
  return claim_row("good-indices", std::move(params), m.estimate, m.half_width,
                   m.bound, m.verdict, m.trials, o.seed);
}

json run_conditioned(const ClaimOptions& o) {
  invlab::Rng rng(o.seed, 12);
  const std::uint64_t n = o.n;
  invlab::McReport m = invlab::verify_conditioned_claim(
      n, invlab::singleton_sets(n), o.gamma,
      [n](invlab::Rng& r) {
        invlab::FnTable f = invlab::sample_function(n, r);
        return std::make_pair(f, f(invlab::DomainPoint{1}) ==
                                     invlab::DomainPoint{1});
      },
      1.0 / static_cast<double>(n), o.trials, rng);
  json params;
  params["n"] = n;
  params["c"] = 1;
  params["gamma"] = o.gamma;
  params["event"] = "f(1) = 1";
  params["p_lower"] = 1.0 / static_cast<double>(n);
  return claim_row("conditioned-good-indices", std::move(params), m.estimate,
                   m.half_width, m.bound, m.verdict, m.trials, o.seed);
}

json run_tau_delta(const ClaimOptions& o) {
  invlab::Rng rng(o.seed, 13);
  invlab::McReport m =
      invlab::verify_tau_delta(o.n, o.tau, o.delta, o.trials, rng);
  json params;
  params["n"] = o.n;
  params["tau"] = o.tau;
  params["delta"] = o.delta;
  return claim_row("tau-delta-tail", std::move(params), m.estimate,
                   m.half_width, m.bound, m.verdict, m.trials, o.seed);
}

json run_correct_preimage(const ClaimOptions& o) {
  invlab::AdaptiveInverter inv = invlab::full_table_inverter(o.n);
  json params;
  params["n"] = o.n;
  params["inverter"] = "full-table";
  double nn = std::pow(static_cast<double>(o.n), static_cast<double>(o.n));
  if (nn <= 2e6) {
    invlab::PreimageReport rep = invlab::verify_correct_preimage_exact(inv);
    params["mode"] = "exhaustive";
    return claim_row("correct-preimage", std::move(params),
                     invlab::to_double(rep.target), 0.0, rep.bound,
                     rep.pass ? invlab::Verdict::PASS : invlab::Verdict::FAIL,
                     rep.pairs, o.seed);
  }
  invlab::Rng rng(o.seed, 14);
  invlab::PreimageReportMc rep =
      invlab::verify_correct_preimage_mc(inv, o.trials, rng);
  params["mode"] = "sampled";
  return claim_row("correct-preimage", std::move(params), rep.target,
                   invlab::hoeffding_half_width(rep.trials), rep.bound,
                   rep.pass ? invlab::Verdict::PASS : invlab::Verdict::FAIL,
                   rep.trials, o.seed);
}

invlab::FnTable identity_table(std::uint64_t n) {
  std::vector<std::uint64_t> v(n);
  for (std::uint64_t i = 0; i < n; ++i) v[i] = i + 1;
  return invlab::FnTable::from_indices(std::move(v));
}

void run_chain_success(const ClaimOptions& o, json& results) {
  invlab::NonAdaptiveInverter inv =
      invlab::zero_advice_affine_inverter(identity_table(o.n));
  for (std::uint64_t i = 1; i <= o.chain_steps; ++i) {
    invlab::LemmaBound b = invlab::eval_affine_lemma_bound(o.n, i, o.mu);
    invlab::Rng rng(o.seed, 20 + i);
    invlab::McReport m =
        invlab::estimate_chain_success(inv, i, o.trials, rng, b.value);
    json params;
    params["n"] = o.n;
    params["probe"] = "identity";
    params["i"] = i;
    params["mu"] = o.mu;
    results.push_back(claim_row("chain-success", std::move(params), m.estimate,
                                m.half_width, m.bound, m.verdict, m.trials,
                                o.seed));
  }
}

json run_span_claim(const ClaimOptions& o) {
  invlab::PrimeField field(o.n);
  invlab::Mat empty(0, o.n, field);
  std::vector<invlab::Mat> blocks;
  for (std::uint64_t y = 1; y <= o.n; ++y) {
    invlab::Mat b(1, o.n, field);
    b.at(0, y - 1) = 1;
    blocks.push_back(b);
  }
  invlab::Rng rng(o.seed, 15);
  invlab::McReport m = invlab::verify_advanced_span_claim(
      empty, {}, blocks, o.mu, o.trials, rng);
  json params;
  params["n"] = o.n;
  params["ell"] = 0;
  params["t"] = 1;
  params["blocks"] = "unit rows";
  params["mu"] = o.mu;
  return claim_row("span-membership", std::move(params), m.estimate,
                   m.half_width, m.bound, m.verdict, m.trials, o.seed);
}

json run_entropy_facts(const ClaimOptions& o) {
  invlab::FactReport rep = invlab::verify_entropy_facts();
  json params;
  params["grids"] = "binomial<=entropy, log2 lower, entropy upper";
  if (!rep.ok) params["first_failure"] = rep.first_failure;
  return claim_row("entropy-facts", std::move(params), rep.ok ? 0.0 : 1.0, 0.0,
                   0.0, rep.ok ? invlab::Verdict::PASS : invlab::Verdict::FAIL,
                   rep.checks, o.seed);
}

std::string claims_csv(const json& record) {
  std::string s = "claim_id,estimate,ci,bound,verdict,trials,seed\n";
  for (const json& r : record["results"]) {
    s += r["claim_id"].get<std::string>();
    s += "," + fmt17(r["estimate"].get<double>());
    s += "," + fmt17(r["ci"].get<double>());
    s += "," + fmt17(r["bound"].get<double>());
    s += "," + r["verdict"].get<std::string>();
    s += "," + std::to_string(r["trials"].get<std::uint64_t>());
    s += "," + std::to_string(r["seed"].get<std::uint64_t>());
    s += "\n";
  }
  return s;
}

int cmd_verify_claims(const ClaimOptions& o, const std::string& format,
                      const std::string& out_path) {
  json config;
  config["claim"] = o.claim;
  config["n"] = o.n;
  config["trials"] = o.trials;
  config["chain_steps"] = o.chain_steps;
  config["mu"] = o.mu;
  config["gamma"] = o.gamma;
  config["tau"] = o.tau;
  config["delta"] = o.delta;
  config["p"] = o.p_list;
  config["seed"] = o.seed;
  json rec = make_record("verify-claims", std::move(config));

  bool all = o.claim == "all";
  if (all || o.claim == "known-unit-vectors")
    rec["results"].push_back(run_known_unit_vectors(o));
  if (all || o.claim == "good-indices")
    rec["results"].push_back(run_good_indices(o));
  if (all || o.claim == "conditioned")
    rec["results"].push_back(run_conditioned(o));
  if (all || o.claim == "tau-delta")
    rec["results"].push_back(run_tau_delta(o));
  if (all || o.claim == "correct-preimage")
    rec["results"].push_back(run_correct_preimage(o));
  if (all || o.claim == "chain-success") run_chain_success(o, rec["results"]);
  if (all || o.claim == "span-claim")
    rec["results"].push_back(run_span_claim(o));
  if (all || o.claim == "entropy-facts")
    rec["results"].push_back(run_entropy_facts(o));
  if (rec["results"].empty()) {
    std::cerr << "unknown claim " << o.claim << "\n";
    return 2;
  }

  bool any_fail = false;
  for (const json& r : rec["results"]) {
    if (r["verdict"] == "FAIL") any_fail = true;
  }
  int rc = emit(rec, format, out_path, claims_csv);
  if (rc != 0) return rc;
  return any_fail ? 1 : 0;
}

// ---------------------------------------------------------------------------
// protocol
// ---------------------------------------------------------------------------

struct ProtocolOptions {
  std::uint64_t n = 8;
  std::string family = "q0";
  std::uint64_t runs = 1000;
  std::uint64_t t = 1;
  std::string inverter = "full-table";
  std::string transcript_path;
  std::string audit_path;
  std::uint64_t seed = 0;
};

std::string protocol_csv(const json& record) {
  std::string s =
      "family,n,runs,t,accepts,accept_rate,mean_bits,max_bits,"
      "per_round_bound,bound_ok\n";
  for (const json& r : record["results"]) {
    if (!r.contains("family")) continue;
    s += r["family"].get<std::string>();
    s += "," + std::to_string(r["n"].get<std::uint64_t>());
    s += "," + std::to_string(r["runs"].get<std::uint64_t>());
    s += "," + std::to_string(r["t"].get<std::uint64_t>());
    s += "," + std::to_string(r["accepts"].get<std::uint64_t>());
    s += "," + fmt17(r["accept_rate"].get<double>());
    s += "," + fmt17(r["mean_bits"].get<double>());
    s += "," + std::to_string(r["max_bits"].get<std::uint64_t>());
    s += "," + std::to_string(r["per_round_bound"].get<std::uint64_t>());
    s += "," + csv_bool(r["bound_ok"].get<bool>());
    s += "\n";
  }
  return s;
}

int cmd_protocol(const ProtocolOptions& o, const std::string& format,
                 const std::string& out_path) {
  if (!o.audit_path.empty()) {
    std::ifstream is(o.audit_path);
    if (!is) {
      std::cerr << "cannot open transcript " << o.audit_path << "\n";
      return 2;
    }
    invlab::AuditResult res = invlab::audit_transcript_jsonl(is);
    json config;
    config["audit"] = o.audit_path;
    json rec = make_record("protocol", std::move(config));
    json r;
    r["audit_ok"] = res.ok;
    r["messages"] = res.messages;
    r["total_bits"] = res.total_bits;
    if (!res.ok) r["error"] = res.error;
    rec["results"].push_back(std::move(r));
    int rc = emit(rec, format, out_path, protocol_csv);
    if (rc != 0) return rc;
    return res.ok ? 0 : 1;
  }

  if (o.inverter != "full-table") {
    std::cerr << "unknown inverter " << o.inverter << "\n";
    return 2;
  }
  if (o.family != "q0" && o.family != "q1") {
    std::cerr << "unknown family " << o.family << "\n";
    return 2;
  }

  invlab::AdaptiveInverter inv = invlab::full_table_inverter(o.n);
  invlab::Rng cert_rng(o.seed, 1000);
  invlab::LinearityCheck cert =
      invlab::check_linear_preprocessing(inv, 16, cert_rng);
  if (!cert.linear) {
    std::cerr << "inverter failed linearity certification\n";
    return 2;
  }

  invlab::Rng rng(o.seed, 0);
  std::uint64_t accepts = 0, max_bits = 0, bits_sum = 0;
  bool bound_ok = true;
  std::uint64_t per_round = invlab::cc_bound(inv.s, inv.q, o.n);
  std::optional<invlab::Transcript> last;
  for (std::uint64_t k = 0; k < o.runs; ++k) {
    invlab::DisjointnessInput in = o.family == "q0"
                                       ? invlab::sample_q0(o.n, rng)
                                       : invlab::sample_q1(o.n, rng);
    invlab::Transcript tr = invlab::run_repeated(o.t, inv, in, rng, cert);
    if (tr.out_a) ++accepts;
    bits_sum += tr.total_bits;
    max_bits = std::max(max_bits, tr.total_bits);
    if (tr.total_bits > tr.rounds * per_round) bound_ok = false;
    last = std::move(tr);
  }

  if (!o.transcript_path.empty() && last.has_value()) {
    std::ofstream ts(o.transcript_path);
    if (!ts) {
      std::cerr << "cannot open transcript file " << o.transcript_path << "\n";
      return 2;
    }
    invlab::write_transcript_jsonl(*last, ts);
  }

  json config;
  config["n"] = o.n;
  config["family"] = o.family;
  config["runs"] = o.runs;
  config["t"] = o.t;
  config["inverter"] = o.inverter;
  config["seed"] = o.seed;
  if (!o.transcript_path.empty()) config["transcript"] = o.transcript_path;
  json rec = make_record("protocol", std::move(config));
  json r;
  r["family"] = o.family;
  r["n"] = o.n;
  r["runs"] = o.runs;
  r["t"] = o.t;
  r["accepts"] = accepts;
  r["accept_rate"] =
      o.runs == 0 ? 0.0
                  : static_cast<double>(accepts) / static_cast<double>(o.runs);
  r["mean_bits"] =
      o.runs == 0 ? 0.0
                  : static_cast<double>(bits_sum) / static_cast<double>(o.runs);
  r["max_bits"] = max_bits;
  r["per_round_bound"] = per_round;
  r["bound_ok"] = bound_ok;
  rec["results"].push_back(std::move(r));

  int rc = emit(rec, format, out_path, protocol_csv);
  if (rc != 0) return rc;
  return bound_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

struct BoundsOptions {
  std::string formula;
  std::uint64_t n = 0;  // 0: per-formula default
  double mu = 0.25;
  double tau = 0.125;
  double delta = 1.0 / 64.0;
  std::uint64_t d = 4;
  std::uint64_t q = 1;
  std::uint64_t m = 1000;
  std::uint64_t i_min = 1;
  std::uint64_t i_max = 8;
  std::uint64_t s_min = 0;
  std::uint64_t s_max = 4000;
  std::uint64_t s_step = 50;
  double threshold = 0.5;
  std::uint64_t seed = 0;
};

std::string bounds_csv(const json& record) {
  std::string formula = record["config"]["formula"].get<std::string>();
  bool lemma = formula == "affine-lemma" || formula == "tree-lemma";
  std::string s = lemma ? "i,value,tail_log2,vacuous\n"
                        : "s,value,alpha_term_log2,product_term_log2,vacuous\n";
  for (const json& r : record["results"]) {
    if (lemma) {
      s += std::to_string(r["i"].get<std::uint64_t>());
      s += "," + fmt17(r["value"].get<double>());
      s += "," + fmt17(r["tail_log2"].get<double>());
    } else {
      s += std::to_string(r["s"].get<std::uint64_t>());
      s += "," + fmt17(r["value"].get<double>());
      s += "," + fmt17(r["alpha_term_log2"].get<double>());
      s += "," + fmt17(r["product_term_log2"].get<double>());
    }
    s += "," + csv_bool(r["vacuous"].get<bool>());
    s += "\n";
  }
  return s;
}

int cmd_bounds(const BoundsOptions& opt, const std::string& format,
               const std::string& out_path) {
  BoundsOptions o = opt;
  bool lemma = o.formula == "affine-lemma" || o.formula == "tree-lemma";
  bool tree = o.formula == "tree-lemma" || o.formula == "tree-theorem";
  if (!lemma && o.formula != "affine-theorem" && o.formula != "tree-theorem") {
    std::cerr << "unknown formula " << o.formula << "\n";
    return 2;
  }
  if (o.n == 0) o.n = lemma ? 101 : (1ull << 32);

  json config;
  config["formula"] = o.formula;
  config["n"] = o.n;
  config["mu"] = o.mu;
  config["tau"] = o.tau;
  config["delta"] = o.delta;
  config["d"] = o.d;
  config["q"] = o.q;
  config["m"] = o.m;
  config["i_min"] = o.i_min;
  config["i_max"] = o.i_max;
  config["s_min"] = o.s_min;
  config["s_max"] = o.s_max;
  config["s_step"] = o.s_step;
  config["threshold"] = o.threshold;
  config["seed"] = o.seed;
  json rec = make_record("bounds", std::move(config));

  if (lemma) {
    for (std::uint64_t i = o.i_min; i <= o.i_max; ++i) {
      invlab::LemmaBound b =
          tree ? invlab::eval_tree_lemma_bound(o.n, i, o.d, o.q, o.mu)
               : invlab::eval_affine_lemma_bound(o.n, i, o.mu);
      json r;
      r["i"] = i;
      r["value"] = b.value;
      r["tail_log2"] = b.tail_log2;
      r["vacuous"] = b.vacuous;
      rec["results"].push_back(std::move(r));
    }
  } else {
    invlab::BoundParams p;
    p.n = o.n;
    p.tau = o.tau;
    p.delta = o.delta;
    p.d = o.d;
    p.q = o.q;
    p.m = o.m;
    auto eval_at = [&](std::uint64_t s) {
      invlab::BoundParams ps = p;
      ps.s = s;
      return tree ? invlab::eval_tree_theorem_bound(ps)
                  : invlab::eval_affine_theorem_bound(ps);
    };
    for (std::uint64_t s = o.s_min; s <= o.s_max; s += o.s_step) {
      invlab::TheoremBound b = eval_at(s);
      json r;
      r["s"] = s;
      r["value"] = b.value;
      r["alpha_term_log2"] = b.alpha_term_log2;
      r["product_term_log2"] = b.product_term_log2;
      r["vacuous"] = b.vacuous;
      rec["results"].push_back(std::move(r));
      if (o.s_step == 0) break;
    }
    if (o.s_min <= o.s_max) {
      std::optional<std::uint64_t> cross = invlab::crossing_s(
          [&](std::uint64_t s) { return eval_at(s).value; }, o.threshold,
          o.s_max);
      if (cross.has_value()) {
        rec["crossing_s"] = *cross;
      } else {
        rec["crossing_s"] = nullptr;
      }
    }
  }

  return emit(rec, format, out_path, bounds_csv);
}

// ---------------------------------------------------------------------------
// invert-bench
// ---------------------------------------------------------------------------

struct BenchOptions {
  std::string inverter = "full-table";
  std::uint64_t n = 0;  // 0: per-kind default
  std::uint64_t trials = 10000;
  std::uint64_t m_min = 10, m_max = 10;
  std::uint64_t t_min = 10, t_max = 10;
  double mu = 0.25;
  std::uint64_t seed = 0;
};

std::string bench_csv(const json& record) {
  std::string s = "kind,n,s,q,m_tables,t_chain,trials,success\n";
  for (const json& r : record["results"]) {
    s += r["kind"].get<std::string>();
    s += "," + std::to_string(r["n"].get<std::uint64_t>());
    s += "," + std::to_string(r["s"].get<std::uint64_t>());
    s += "," + std::to_string(r["q"].get<std::uint64_t>());
    s += "," + std::to_string(r["m_tables"].get<std::uint64_t>());
    s += "," + std::to_string(r["t_chain"].get<std::uint64_t>());
    s += "," + std::to_string(r["trials"].get<std::uint64_t>());
    s += "," + fmt17(r["success"].get<double>());
    s += "\n";
  }
  return s;
}

int cmd_invert_bench(const BenchOptions& opt, const std::string& format,
                     const std::string& out_path) {
  BenchOptions o = opt;
  json config;
  if (o.inverter == "full-table") {
    if (o.n == 0) o.n = 257;
    config["inverter"] = o.inverter;
    config["n"] = o.n;
    config["seed"] = o.seed;
    json rec = make_record("invert-bench", std::move(config));
    invlab::AdaptiveInverter inv = invlab::full_table_inverter(o.n);
    invlab::Rng rng(o.seed, 30);
    invlab::FnTable f = invlab::sample_function(o.n, rng);
    double success = invlab::to_double(invlab::success_probability_exact(inv, f));
    json r;
    r["kind"] = "full-table";
    r["n"] = o.n;
    r["s"] = inv.s;
    r["q"] = inv.q;
    r["m_tables"] = 0;
    r["t_chain"] = 0;
    r["trials"] = o.n;  // exact enumeration over all challenges
    r["success"] = success;
    rec["results"].push_back(std::move(r));
    return emit(rec, format, out_path, bench_csv);
  }

  if (o.inverter == "zero-advice") {
    if (o.n == 0) o.n = 101;
    config["inverter"] = o.inverter;
    config["n"] = o.n;
    config["trials"] = o.trials;
    config["mu"] = o.mu;
    config["seed"] = o.seed;
    json rec = make_record("invert-bench", std::move(config));
    invlab::NonAdaptiveInverter inv =
        invlab::zero_advice_affine_inverter(identity_table(o.n));
    // uniform challenges, matching the 2/n - 1/n^2 analytic rate
    invlab::LemmaBound b = invlab::eval_affine_lemma_bound(o.n, 1, o.mu);
    invlab::Rng rng(o.seed, 31);
    invlab::McReport m =
        invlab::estimate_chain_success(inv, 1, o.trials, rng, b.value);
    json r;
    r["kind"] = "zero-advice";
    r["n"] = o.n;
    r["s"] = 0;
    r["q"] = 1;
    r["m_tables"] = 0;
    r["t_chain"] = 0;
    r["trials"] = m.trials;
    r["success"] = m.estimate;
    r["bound"] = m.bound;
    r["verdict"] = invlab::verdict_name(m.verdict);
    rec["results"].push_back(std::move(r));
    int rc = emit(rec, format, out_path, bench_csv);
    if (rc != 0) return rc;
    return m.verdict == invlab::Verdict::FAIL ? 1 : 0;
  }

  if (o.inverter != "hellman") {
    std::cerr << "unknown inverter " << o.inverter << "\n";
    return 2;
  }
  if (o.n == 0) o.n = 1009;
  config["inverter"] = o.inverter;
  config["n"] = o.n;
  config["trials"] = o.trials;
  config["m_min"] = o.m_min;
  config["m_max"] = o.m_max;
  config["t_min"] = o.t_min;
  config["t_max"] = o.t_max;
  config["seed"] = o.seed;
  json rec = make_record("invert-bench", std::move(config));
  for (std::uint64_t m = o.m_min; m <= o.m_max; ++m) {
    for (std::uint64_t t = o.t_min; t <= o.t_max; ++t) {
      invlab::Rng build_rng(o.seed, 1000 + m * 64 + t);
      invlab::AdaptiveInverter inv =
          invlab::hellman_inverter(o.n, m, t, build_rng);
      invlab::Rng run_rng(o.seed, 2000 + m * 64 + t);
      invlab::FnTable f = invlab::sample_function(o.n, run_rng);
      double success =
          invlab::success_probability_mc(inv, f, o.trials, run_rng);
      json r;
      r["kind"] = "hellman";
      r["n"] = o.n;
      r["s"] = inv.s;
      r["q"] = inv.q;
      r["m_tables"] = m;
      r["t_chain"] = t;
      r["trials"] = o.trials;
      r["success"] = success;
      rec["results"].push_back(std::move(r));
    }
  }
  return emit(rec, format, out_path, bench_csv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"laboratory for function inversion with preprocessing"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string format = "json";
  std::string out_path;
  app.add_option("--format", format, "output format (json | csv)")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_option("--out", out_path, "write the report to a file");

  ClaimOptions co;
  CLI::App* claims = app.add_subcommand(
      "verify-claims", "run oracle-backed checks of the probability claims");
  claims->fallthrough();
  claims->add_option("--claim", co.claim,
                     "known-unit-vectors | good-indices | conditioned | "
                     "tau-delta | correct-preimage | chain-success | "
                     "span-claim | entropy-facts | all")
      ->capture_default_str();
  claims->add_option("--n", co.n, "domain size")->capture_default_str();
  claims->add_option("--trials", co.trials, "Monte-Carlo trials")
      ->capture_default_str();
  claims->add_option("--chain-steps", co.chain_steps,
                     "largest chain step i to estimate")
      ->capture_default_str();
  claims->add_option("--mu", co.mu, "tail parameter mu")->capture_default_str();
  claims->add_option("--gamma", co.gamma, "conditioned tail parameter")
      ->capture_default_str();
  claims->add_option("--tau", co.tau, "compression tau")->capture_default_str();
  claims->add_option("--delta", co.delta, "compression delta")
      ->capture_default_str();
  claims->add_option("--p", co.p_list, "field sizes for the exhaustive checks")
      ->delimiter(',')
      ->capture_default_str();
  claims->add_option("--seed", co.seed, "master seed")->required();

  ProtocolOptions po;
  CLI::App* proto = app.add_subcommand(
      "protocol", "run the disjointness reduction or audit a transcript");
  proto->fallthrough();
  proto->add_option("--n", po.n, "universe size")->capture_default_str();
  proto->add_option("--family", po.family, "input family (q0 | q1)")
      ->capture_default_str();
  proto->add_option("--runs", po.runs, "number of sampled inputs")
      ->capture_default_str();
  proto->add_option("--t", po.t, "repetitions per input")
      ->capture_default_str();
  proto->add_option("--inverter", po.inverter, "inverter kind")
      ->capture_default_str();
  proto->add_option("--transcript", po.transcript_path,
                    "write the last run's transcript (JSON lines)");
  proto->add_option("--audit", po.audit_path,
                    "audit a stored transcript instead of running");
  CLI::Option* proto_seed =
      proto->add_option("--seed", po.seed, "master seed");

  BoundsOptions bo;
  CLI::App* bounds = app.add_subcommand(
      "bounds", "tabulate the closed-form lower-bound formulas");
  bounds->fallthrough();
  bounds
      ->add_option("--formula", bo.formula,
                   "affine-lemma | tree-lemma | affine-theorem | tree-theorem")
      ->required();
  bounds->add_option("--n", bo.n, "domain size (0 = per-formula default)")
      ->capture_default_str();
  bounds->add_option("--mu", bo.mu, "lemma tail parameter")
      ->capture_default_str();
  bounds->add_option("--tau", bo.tau, "compression tau")->capture_default_str();
  bounds->add_option("--delta", bo.delta, "compression delta")
      ->capture_default_str();
  bounds->add_option("--d", bo.d, "tree depth")->capture_default_str();
  bounds->add_option("--q", bo.q, "queries per node")->capture_default_str();
  bounds->add_option("--m", bo.m, "challenge count")->capture_default_str();
  bounds->add_option("--i-min", bo.i_min, "first chain step")
      ->capture_default_str();
  bounds->add_option("--i-max", bo.i_max, "last chain step")
      ->capture_default_str();
  bounds->add_option("--s-min", bo.s_min, "first advice length")
      ->capture_default_str();
  bounds->add_option("--s-max", bo.s_max, "last advice length")
      ->capture_default_str();
  bounds->add_option("--s-step", bo.s_step, "advice length stride")
      ->capture_default_str();
  bounds->add_option("--threshold", bo.threshold, "crossing threshold")
      ->capture_default_str();
  bounds->add_option("--seed", bo.seed, "master seed (echoed)")->required();

  BenchOptions eo;
  CLI::App* bench = app.add_subcommand(
      "invert-bench", "measure inverter success rates and advice budgets");
  bench->fallthrough();
  bench->add_option("--inverter", eo.inverter,
                    "full-table | hellman | zero-advice")
      ->capture_default_str();
  bench->add_option("--n", eo.n, "domain size (0 = per-kind default)")
      ->capture_default_str();
  bench->add_option("--trials", eo.trials, "challenges per cell")
      ->capture_default_str();
  bench->add_option("--m-min", eo.m_min, "smallest table count")
      ->capture_default_str();
  bench->add_option("--m-max", eo.m_max, "largest table count")
      ->capture_default_str();
  bench->add_option("--t-min", eo.t_min, "shortest chain length")
      ->capture_default_str();
  bench->add_option("--t-max", eo.t_max, "longest chain length")
      ->capture_default_str();
  bench->add_option("--mu", eo.mu, "tail parameter for the zero-advice bound")
      ->capture_default_str();
  bench->add_option("--seed", eo.seed, "master seed")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  auto start = std::chrono::steady_clock::now();
  int rc = 2;
  try {
    if (claims->parsed()) {
      rc = cmd_verify_claims(co, format, out_path);
    } else if (proto->parsed()) {
      if (po.audit_path.empty() && proto_seed->count() == 0) {
        std::cerr << "--seed is required to run the protocol\n";
        return 2;
      }
      rc = cmd_protocol(po, format, out_path);
    } else if (bounds->parsed()) {
      rc = cmd_bounds(bo, format, out_path);
    } else if (bench->parsed()) {
      rc = cmd_invert_bench(eo, format, out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  auto end = std::chrono::steady_clock::now();
  double ms = std::chrono::duration<double, std::milli>(end - start).count();
  std::fprintf(stderr, "elapsed_ms %.3f\n", ms);
  return rc;
}
