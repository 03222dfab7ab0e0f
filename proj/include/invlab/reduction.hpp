#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "invlab/bits.hpp"
#include "invlab/errors.hpp"
#include "invlab/field.hpp"
#include "invlab/inverters.hpp"
#include "invlab/rng.hpp"

namespace invlab {

/// Two-party disjointness instance: characteristic vectors of X (party A)
/// and Y (party B). The benchmark families promise |X intersect Y| <= 1;
/// general inputs are accepted but flagged by promise_ok().
struct DisjointnessInput {
  std::vector<std::uint8_t> a;
  std::vector<std::uint8_t> b;

  std::uint64_t n() const { return a.size(); }

  std::uint64_t intersection_size() const {
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < a.size(); ++i) c += (a[i] & b[i]) ? 1 : 0;
    return c;
  }

  bool promise_ok() const {
    return a.size() == b.size() && intersection_size() <= 1;
  }
};

inline bool brute_disjoint(const DisjointnessInput& in) {
  if (in.a.size() != in.b.size()) throw SizeMismatch("set vectors differ in length");
  return in.intersection_size() == 0;
}

/// Uniform disjoint pair: each index independently lands in A only, B only,
/// or neither.
inline DisjointnessInput sample_q0(std::uint64_t n, Rng& rng) {
  DisjointnessInput in;
  in.a.resize(n, 0);
  in.b.resize(n, 0);
  for (std::uint64_t i = 0; i < n; ++i) {
    switch (rng.uniform_below(3)) {
      case 1: in.a[i] = 1; break;
      case 2: in.b[i] = 1; break;
      default: break;
    }
  }
  return in;
}

/// Uniform pair with exactly one common index: a disjoint sample with a
/// planted intersection at a uniform position.
inline DisjointnessInput sample_q1(std::uint64_t n, Rng& rng) {
  DisjointnessInput in = sample_q0(n, rng);
  std::uint64_t w = rng.uniform_below(n);
  in.a[w] = 1;
  in.b[w] = 1;
  return in;
}

/// 1-based cyclic shift by d on [n].
inline DomainPoint shift(DomainPoint i, std::int64_t d, std::uint64_t n) {
  std::int64_t r = (static_cast<std::int64_t>(i.index) - 1 + d) %
                   static_cast<std::int64_t>(n);
  if (r < 0) r += static_cast<std::int64_t>(n);
  return DomainPoint{static_cast<std::uint64_t>(r) + 1};
}

/// Party A's table: the zero label at the shifted positions of its set,
/// uniform labels elsewhere.
inline FnTable build_fa(const std::vector<std::uint8_t>& a, std::uint64_t d,
                        Rng& rng) {
  std::uint64_t n = a.size();
  if (n < 2) throw DomainError("n must be >= 2");
  std::vector<DomainPoint> v(n, zero_label());
  std::vector<bool> forced(n, false);
  for (std::uint64_t i = 1; i <= n; ++i) {
    if (a[i - 1]) forced[shift(DomainPoint{i}, static_cast<std::int64_t>(d), n).index - 1] = true;
  }
  for (std::uint64_t j = 0; j < n; ++j) {
    v[j] = forced[j] ? zero_label() : uniform_point(n, rng);
  }
  return FnTable(n, std::move(v));
}

/// Party B's table: the challenge y at the shifted positions of its set,
/// uniform labels elsewhere. At a common index w the pointwise sum therefore
/// satisfies (f_A + f_B)(shift(w, d)) = 0 + y = y.
inline FnTable build_fb(const std::vector<std::uint8_t>& b, std::uint64_t d,
                        DomainPoint y, Rng& rng) {
  std::uint64_t n = b.size();
  if (n < 2) throw DomainError("n must be >= 2");
  if (y.index < 1 || y.index > n) throw DomainError("y outside [n]");
  std::vector<DomainPoint> v(n);
  std::vector<bool> forced(n, false);
  for (std::uint64_t i = 1; i <= n; ++i) {
    if (b[i - 1]) forced[shift(DomainPoint{i}, static_cast<std::int64_t>(d), n).index - 1] = true;
  }
  for (std::uint64_t j = 0; j < n; ++j) {
    v[j] = forced[j] ? y : uniform_point(n, rng);
  }
  return FnTable(n, std::move(v));
}

enum class Party : std::uint8_t { A, B };

enum class MsgTag : std::uint8_t { advice, query, answer, final_step };

inline const char* tag_name(MsgTag t) {
  switch (t) {
    case MsgTag::advice: return "advice";
    case MsgTag::query: return "query";
    case MsgTag::answer: return "answer";
    default: return "final";
  }
}

struct Message {
  Party sender = Party::A;
  MsgTag tag = MsgTag::advice;
  BitString payload;
  std::uint64_t bit_count = 0;  // always equals payload.size()
};

/// Full record of one (or several repeated) protocol run(s): the ordered
/// message list, both parties' outputs (true = "the sets are disjoint"),
/// and the exact bit total.
struct Transcript {
  std::vector<Message> messages;
  bool out_a = false;
  bool out_b = false;
  std::uint64_t total_bits = 0;
  // run metadata, used by exports and audits
  std::uint64_t n = 0, s = 0, q = 0;
  std::uint64_t rounds = 1;
  std::vector<std::uint8_t> round_accepts;
};

/// Claim-level ceiling on protocol communication:
/// s + 2q(ceil(log2 n) + 1) + ceil(log2 n) + 3.
inline std::uint64_t cc_bound(std::uint64_t s, std::uint64_t q, std::uint64_t n) {
  if (n < 2) throw DomainError("n must be >= 2");
  std::uint64_t w = label_bits(n);
  return s + 2 * q * (w + 1) + w + 3;
}

namespace detail {

inline void push_message(Transcript& tr, Party sender, MsgTag tag,
                         BitString payload) {
  Message m;
  m.sender = sender;
  m.tag = tag;
  m.bit_count = payload.size();
  m.payload = std::move(payload);
  tr.total_bits += m.bit_count;
  tr.messages.push_back(std::move(m));
}

/// Steps shared by the plain and additive-advice variants: B emulates the
/// decoder on f = f_A + f_B with queries forwarded to A, then the parties
/// settle membership of the decoded index.
///
/// Per-message costs (w = ceil(log2 n)): each query w bits from B, each
/// answer w + 1 bits from A (value plus a framing bit), B's final (i, b_i)
/// in w + 1 bits, A's verdict in 2 bits. Together with the s advice bits
/// this stays within cc_bound(s, q, n).
inline bool emulate_and_settle(Transcript& tr, const AdaptiveInverter& inv,
                               const DisjointnessInput& in, std::uint64_t d,
                               DomainPoint y, const FnTable& fa,
                               const FnTable& fb, const BitString& c,
                               bool decoder_ran) {
  const std::uint64_t n = in.n();
  const unsigned w = label_bits(n);

  DomainPoint x = y;  // decoder abandoned: sentinel challenge echo
  if (decoder_ran) {
    QueryChannel oracle(
        [&](DomainPoint r) {
          BitString qbits;
          qbits.append_uint(r.index - 1, w);
          push_message(tr, Party::B, MsgTag::query, std::move(qbits));
          DomainPoint ans_a = fa(r);
          BitString abits;
          abits.append_uint(ans_a.index - 1, w);
          abits.append_bit(false);
          push_message(tr, Party::A, MsgTag::answer, std::move(abits));
          return add_labels(ans_a, fb(r), n);
        },
        inv.q);
    x = inv.decode(y, c, oracle);
  }

  DomainPoint i = shift(x, -static_cast<std::int64_t>(d), n);
  bool b_i = decoder_ran && in.b[i.index - 1] != 0;
  BitString fin;
  fin.append_uint(i.index - 1, w);
  fin.append_bit(b_i);
  push_message(tr, Party::B, MsgTag::final_step, std::move(fin));

  bool hit = b_i && in.a[i.index - 1] != 0;
  BitString verdict;
  verdict.append_bit(hit);
  verdict.append_bit(false);
  push_message(tr, Party::A, MsgTag::final_step, std::move(verdict));
  return !hit;  // true = report disjoint
}

}  // namespace detail

/// One run of the reduction protocol with a linear-preprocessing inverter.
///
/// B samples a challenge y; both parties build their tables over the public
/// shift d; A ships P(f_A); B forms advice for f_A + f_B by adding its own
/// advice in the group; B emulates the decoder with queries forwarded to A;
/// the decoded position is translated back and membership settled. A pair
/// that is really disjoint is always accepted.
inline Transcript run_protocol(const AdaptiveInverter& inv,
                               const DisjointnessInput& in, Rng& rng,
                               const LinearityCheck& cert) {
  if (!cert.linear) {
    throw LinearityViolation("inverter failed linear-preprocessing certification");
  }
  if (!inv.advice_add) throw LinearityViolation("inverter declares no advice group");
  const std::uint64_t n = in.n();
  if (n < 2 || in.b.size() != n) throw SizeMismatch("bad input vectors");
  if (inv.n != n) throw SizeMismatch("inverter n != input n");

  std::uint64_t d = rng.uniform_below(n) + 1;  // public shift, shared stream
  Rng rng_a = rng.substream(1);
  Rng rng_b = rng.substream(2);

  DomainPoint y = uniform_point(n, rng_b);
  FnTable fa = build_fa(in.a, d, rng_a);
  FnTable fb = build_fb(in.b, d, y, rng_b);

  Transcript tr;
  tr.n = n;
  tr.s = inv.s;
  tr.q = inv.q;

  BitString adv_a = inv.preprocess(fa);
  if (adv_a.size() != inv.s) throw SizeMismatch("advice length != declared s");
  BitString c = inv.advice_add(adv_a, inv.preprocess(fb));
  detail::push_message(tr, Party::A, MsgTag::advice, std::move(adv_a));

  bool accept = detail::emulate_and_settle(tr, inv, in, d, y, fa, fb, c,
                                           /*decoder_ran=*/true);
  tr.out_a = tr.out_b = accept;
  tr.round_accepts.assign(1, accept ? 1 : 0);
  return tr;
}

/// t-fold repetition: accept only if every round accepts. Rejection of a
/// truly disjoint pair is impossible in any round, so the repetition has
/// one-sided error.
inline Transcript run_repeated(std::uint64_t t, const AdaptiveInverter& inv,
                               const DisjointnessInput& in, Rng& rng,
                               const LinearityCheck& cert) {
  if (t < 1) throw DomainError("t must be >= 1");
  Transcript all;
  all.n = in.n();
  all.s = inv.s;
  all.q = inv.q;
  all.rounds = t;
  all.out_a = all.out_b = true;
  for (std::uint64_t r = 0; r < t; ++r) {
    Transcript one = run_protocol(inv, in, rng, cert);
    all.round_accepts.push_back(one.round_accepts[0]);
    all.total_bits += one.total_bits;
    for (Message& m : one.messages) all.messages.push_back(std::move(m));
    all.out_a = all.out_a && one.out_a;
    all.out_b = all.out_b && one.out_b;
  }
  return all;
}

/// Result of an advice sub-protocol: on success, `advice` is the combined
/// advice it computed for f_A + f_B; `wire` is everything it put on the wire
/// (at most the declared budget; the transcript charges the full budget).
struct SubProtocolResult {
  bool ok = false;
  BitString advice;
  BitString wire;
};

using AdviceSubProtocol =
    std::function<SubProtocolResult(const FnTable&, const FnTable&, Rng&)>;

/// Generalized run where steps 4-5 (ship and add advice) are replaced by an
/// arbitrary two-party sub-protocol computing the combined advice within
/// k_budget bits. When the sub-protocol fails, B aborts the round by
/// reporting a non-member index (the round then never detects an
/// intersection, and one-sided acceptance of disjoint pairs is preserved).
inline Transcript run_additive(const AdviceSubProtocol& sub,
                               std::uint64_t k_budget,
                               const AdaptiveInverter& inv,
                               const DisjointnessInput& in, Rng& rng,
                               const LinearityCheck& cert) {
  if (!cert.linear) {
    throw LinearityViolation("inverter failed linear-preprocessing certification");
  }
  const std::uint64_t n = in.n();
  if (n < 2 || in.b.size() != n) throw SizeMismatch("bad input vectors");
  if (inv.n != n) throw SizeMismatch("inverter n != input n");

  std::uint64_t d = rng.uniform_below(n) + 1;
  Rng rng_a = rng.substream(1);
  Rng rng_b = rng.substream(2);
  Rng rng_sub = rng.substream(3);

  DomainPoint y = uniform_point(n, rng_b);
  FnTable fa = build_fa(in.a, d, rng_a);
  FnTable fb = build_fb(in.b, d, y, rng_b);

  Transcript tr;
  tr.n = n;
  tr.s = inv.s;
  tr.q = inv.q;

  SubProtocolResult sr = sub(fa, fb, rng_sub);
  if (sr.wire.size() > k_budget) {
    throw SubProtocolBudget("sub-protocol exceeded its declared budget");
  }
  BitString charged = sr.wire;  // flat charge: pad to the declared budget
  while (charged.size() < k_budget) charged.append_bit(false);
  detail::push_message(tr, Party::A, MsgTag::advice, std::move(charged));

  bool accept = detail::emulate_and_settle(tr, inv, in, d, y, fa, fb,
                                           sr.advice, /*decoder_ran=*/sr.ok);
  tr.out_a = tr.out_b = accept;
  tr.round_accepts.assign(1, accept ? 1 : 0);
  return tr;
}

}  // namespace invlab
