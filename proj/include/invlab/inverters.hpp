#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "invlab/bits.hpp"
#include "invlab/errors.hpp"
#include "invlab/field.hpp"
#include "invlab/linalg.hpp"
#include "invlab/rng.hpp"

namespace invlab {

/// Counted oracle handle for decoders. The counter lives inside the handle,
/// so a decoder cannot under-report its own query usage.
class QueryChannel {
 public:
  QueryChannel(std::function<DomainPoint(DomainPoint)> backend,
               std::uint64_t budget)
      : backend_(std::move(backend)), budget_(budget) {}

  DomainPoint query(DomainPoint x) {
    if (used_ >= budget_) throw BudgetExceeded("query budget exhausted");
    ++used_;
    return backend_(x);
  }

  std::uint64_t used() const { return used_; }
  std::uint64_t budget() const { return budget_; }
  std::uint64_t remaining() const { return budget_ - used_; }

 private:
  std::function<DomainPoint(DomainPoint)> backend_;
  std::uint64_t budget_;
  std::uint64_t used_ = 0;
};

/// Adaptive (preprocess, decode) pair. decode sees the challenge, the advice
/// string, and a counted oracle; it may choose queries based on answers.
/// advice_add, when present, is the group operation on advice strings that
/// makes preprocess a group homomorphism (linear preprocessing).
struct AdaptiveInverter {
  std::uint64_t n = 0;
  std::uint64_t s = 0;  // advice bits
  std::uint64_t q = 0;  // query budget
  std::function<BitString(const FnTable&)> preprocess;
  std::function<DomainPoint(DomainPoint, const BitString&, QueryChannel&)> decode;
  std::function<BitString(const BitString&, const BitString&)> advice_add;
};

/// Non-adaptive triple: all q query positions are fixed by (y, advice)
/// before any answer is seen. decoder_spec, when present, exposes the
/// decoder as an affine form over the answer vector.
struct AffineDecoderSpec {
  std::vector<std::pair<std::uint64_t, Felt>> alpha;  // (1-based coord, coeff)
  Felt beta = 0;
};

struct NonAdaptiveInverter {
  std::uint64_t n = 0;
  std::uint64_t s = 0;
  std::uint64_t q = 0;
  std::function<BitString(const FnTable&)> preprocess;
  std::function<std::vector<DomainPoint>(DomainPoint, const BitString&)> queries;
  std::function<DomainPoint(DomainPoint, const BitString&,
                            const std::vector<DomainPoint>&)> decode;
  std::function<AffineDecoderSpec(DomainPoint, const BitString&)> decoder_spec;
  std::function<BitString(const BitString&, const BitString&)> advice_add;
};

/// Adapter: runs the fixed query list through a counted channel, then decodes.
inline AdaptiveInverter to_adaptive(const NonAdaptiveInverter& na) {
  AdaptiveInverter inv;
  inv.n = na.n;
  inv.s = na.s;
  inv.q = na.q;
  inv.preprocess = na.preprocess;
  inv.advice_add = na.advice_add;
  inv.decode = [na](DomainPoint y, const BitString& advice, QueryChannel& oracle) {
    std::vector<DomainPoint> qs = na.queries(y, advice);
    if (qs.size() != na.q) {
      throw ParameterError("query selector emitted wrong count");
    }
    std::vector<DomainPoint> answers;
    answers.reserve(qs.size());
    for (DomainPoint x : qs) answers.push_back(oracle.query(x));
    return na.decode(y, advice, answers);
  };
  return inv;
}

/// Perfect inverter with s = n ceil(log2 n) and q = 0: the advice is f itself
/// written label-by-label, which makes preprocessing linear under pointwise
/// Z_n addition of the chunks. decode returns the smallest preimage, or y
/// itself when the fiber is empty (the sentinel is never accidentally right).
inline AdaptiveInverter full_table_inverter(std::uint64_t n) {
  if (n < 1) throw ParameterError("n must be >= 1");
  unsigned w = label_bits(n);
  AdaptiveInverter inv;
  inv.n = n;
  inv.s = n * w;
  inv.q = 0;
  inv.preprocess = [n, w](const FnTable& f) {
    if (f.n() != n) throw SizeMismatch("table size != inverter n");
    BitString adv;
    for (std::uint64_t i = 1; i <= n; ++i) {
      adv.append_uint(f.values()[i - 1].index - 1, w);
    }
    return adv;
  };
  inv.advice_add = [n, w](const BitString& x, const BitString& y) {
    if (x.size() != n * w || y.size() != n * w) {
      throw SizeMismatch("advice length mismatch");
    }
    BitString out;
    for (std::uint64_t i = 0; i < n; ++i) {
      std::uint64_t a = x.read_uint(i * w, w);
      std::uint64_t b = y.read_uint(i * w, w);
      out.append_uint((a + b) % n, w);
    }
    return out;
  };
  inv.decode = [n, w](DomainPoint y, const BitString& advice, QueryChannel&) {
    std::uint64_t want = y.index - 1;
    for (std::uint64_t i = 0; i < n; ++i) {
      if (advice.read_uint(i * w, w) == want) return DomainPoint{i + 1};
    }
    return y;  // empty fiber
  };
  return inv;
}

/// Outcome of a randomized linearity certification. Evaluates truthy when no
/// counterexample was found; a failing pair is kept as the witness.
struct LinearityCheck {
  bool linear = false;
  std::uint64_t trials = 0;
  std::optional<std::pair<FnTable, FnTable>> witness;
  explicit operator bool() const { return linear; }
};

/// Samples (f1, f2) pairs and checks P(f1 + f2) = P(f1) + P(f2) in the
/// declared advice group. trials = 0 certifies vacuously.
inline LinearityCheck check_linear_preprocessing(const AdaptiveInverter& inv,
                                                 std::uint64_t trials,
                                                 Rng& rng) {
  if (!inv.preprocess || !inv.advice_add) {
    throw ParameterError("inverter declares no advice group");
  }
  LinearityCheck res;
  res.trials = trials;
  for (std::uint64_t t = 0; t < trials; ++t) {
    FnTable f1 = sample_function(inv.n, rng);
    FnTable f2 = sample_function(inv.n, rng);
    BitString lhs = inv.preprocess(add_pointwise(f1, f2));
    BitString rhs = inv.advice_add(inv.preprocess(f1), inv.preprocess(f2));
    if (!(lhs == rhs)) {
      res.witness = std::make_pair(std::move(f1), std::move(f2));
      return res;
    }
  }
  res.linear = true;
  return res;
}

/// <alpha, f> + beta over the field of size n, mapped back to [n].
inline DomainPoint eval_affine_decoder(const AffineDecoderSpec& spec,
                                       const FnTable& f,
                                       const PrimeField& field,
                                       std::uint64_t q) {
  if (field.modulus() != f.n()) throw SizeMismatch("field size != n");
  std::uint64_t nonzeros = 0;
  for (const auto& [pos, coeff] : spec.alpha) {
    if (coeff != 0) ++nonzeros;
  }
  if (nonzeros > q) throw SparsityViolation("alpha has more than q nonzeros");
  Felt acc = spec.beta;
  if (!field.canonical(acc)) throw DomainError("beta not canonical");
  for (const auto& [pos, coeff] : spec.alpha) {
    if (pos < 1 || pos > f.n()) throw DomainError("alpha position outside [n]");
    if (!field.canonical(coeff)) throw DomainError("alpha entry not canonical");
    acc = field.add(acc, field.mul(coeff, to_field(f(DomainPoint{pos}), field)));
  }
  return from_field(acc, field);
}

/// Affine decision tree over the field of size n: internal nodes branch on
/// the value of an affine form of the input table, leaves carry outputs.
struct TreeNode {
  bool is_leaf = false;
  Felt output = 0;                                     // leaves only
  std::vector<std::pair<std::uint64_t, Felt>> alpha;   // internal only
  std::vector<std::pair<Felt, std::size_t>> edges;     // value -> child index
};

struct AffineDecisionTree {
  PrimeField field;   // field size equals the domain size n
  std::size_t depth = 0;
  std::size_t root = 0;
  std::vector<TreeNode> nodes;
};

struct TreeEval {
  std::vector<std::size_t> node_path;  // visited node indices, root first
  std::vector<Felt> edge_path;         // successive inner-product values
  DomainPoint output{1};
};

inline TreeEval eval_decision_tree(const AffineDecisionTree& tree,
                                   const FnTable& w) {
  if (tree.field.modulus() != w.n()) throw SizeMismatch("field size != n");
  TreeEval ev;
  std::size_t cur = tree.root;
  for (;;) {
    if (cur >= tree.nodes.size()) throw MalformedTree("child index out of range");
    ev.node_path.push_back(cur);
    const TreeNode& node = tree.nodes[cur];
    if (node.is_leaf) {
      ev.output = from_field(node.output, tree.field);
      return ev;
    }
    if (ev.edge_path.size() >= tree.depth) {
      throw MalformedTree("path exceeds declared depth");
    }
    Felt ip = 0;
    for (const auto& [pos, coeff] : node.alpha) {
      if (pos < 1 || pos > w.n()) throw MalformedTree("alpha position outside [n]");
      ip = tree.field.add(ip,
                          tree.field.mul(coeff, to_field(w(DomainPoint{pos}),
                                                         tree.field)));
    }
    ev.edge_path.push_back(ip);
    auto it = std::find_if(node.edges.begin(), node.edges.end(),
                           [&](const auto& e) { return e.first == ip; });
    if (it == node.edges.end()) {
      throw MalformedTree("no edge for branch value");
    }
    cur = it->second;
  }
}

/// The q = 1, s = 0 family: query position g(y), answer passed through.
inline NonAdaptiveInverter zero_advice_affine_inverter(const FnTable& g) {
  NonAdaptiveInverter inv;
  inv.n = g.n();
  inv.s = 0;
  inv.q = 1;
  inv.preprocess = [](const FnTable&) { return BitString{}; };
  inv.advice_add = [](const BitString&, const BitString&) { return BitString{}; };
  inv.queries = [g](DomainPoint y, const BitString&) {
    return std::vector<DomainPoint>{g(y)};
  };
  inv.decode = [](DomainPoint, const BitString&,
                  const std::vector<DomainPoint>& answers) {
    return answers.at(0);
  };
  inv.decoder_spec = [g](DomainPoint y, const BitString&) {
    return AffineDecoderSpec{{{g(y).index, 1}}, 0};
  };
  return inv;
}

/// Classic time/memory tradeoff tables. Each of the m_tables tables walks
/// ceil(n / t_chain) chains of length t_chain under its own re-randomized
/// step g_k(x) = h_k(f(x)) with affine h_k(u) = a_k u + b_k over GF(n).
///
/// Advice layout (exact; s is its total length): per table, a_k and b_k in
/// ceil(log2 n) bits each, then the chain list sorted by (endpoint, start),
/// each pair stored as two ceil(log2 n)-bit labels. decode answers within
/// q = m_tables * t_chain oracle queries and abandons lookups the remaining
/// budget cannot pay for.
inline AdaptiveInverter hellman_inverter(std::uint64_t n,
                                         std::uint64_t m_tables,
                                         std::uint64_t t_chain, Rng& rng) {
  PrimeField field(n);  // rejects composite n
  if (m_tables < 1 || t_chain < 1) throw ParameterError("m_tables and t_chain must be >= 1");
  unsigned __int128 cost =
      static_cast<unsigned __int128>(m_tables) * t_chain * t_chain;
  unsigned __int128 cube = static_cast<unsigned __int128>(n) * n * n;
  if (cost > cube) throw ParameterError("m_tables * t_chain^2 exceeds n^3");

  const unsigned w = label_bits(n);
  const std::uint64_t m_chains = (n + t_chain - 1) / t_chain;
  const std::uint64_t table_bits = 2 * w + m_chains * 2 * w;

  // The re-randomization maps are fixed at construction, so the same seed
  // always yields the same advice bytes.
  std::vector<std::uint64_t> ak(m_tables), bk(m_tables);
  for (std::uint64_t k = 0; k < m_tables; ++k) {
    ak[k] = rng.uniform_below(n - 1) + 1;
    bk[k] = rng.uniform_below(n);
  }

  AdaptiveInverter inv;
  inv.n = n;
  inv.s = m_tables * table_bits;
  inv.q = m_tables * t_chain;

  inv.preprocess = [n, m_tables, t_chain, m_chains, w, field, ak,
                    bk](const FnTable& f) {
    if (f.n() != n) throw SizeMismatch("table size != inverter n");
    BitString adv;
    for (std::uint64_t k = 0; k < m_tables; ++k) {
      adv.append_uint(ak[k], w);
      adv.append_uint(bk[k], w);
      std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
      pairs.reserve(m_chains);
      for (std::uint64_t j = 1; j <= m_chains; ++j) {
        DomainPoint x{j};
        for (std::uint64_t step = 0; step < t_chain; ++step) {
          Felt u = field.add(field.mul(ak[k], to_field(f(x), field)), bk[k]);
          x = from_field(u, field);
        }
        pairs.emplace_back(to_field(x, field), j - 1);
      }
      std::sort(pairs.begin(), pairs.end());
      for (const auto& [endpoint, start] : pairs) {
        adv.append_uint(endpoint, w);
        adv.append_uint(start, w);
      }
    }
    return adv;
  };

  inv.decode = [n, m_tables, t_chain, m_chains, w, table_bits,
                field](DomainPoint y, const BitString& advice,
                       QueryChannel& oracle) {
    if (advice.size() != m_tables * table_bits) {
      throw SizeMismatch("advice length mismatch");
    }
    Felt yf = to_field(y, field);
    for (std::uint64_t k = 0; k < m_tables; ++k) {
      std::size_t off = k * table_bits;
      Felt a = advice.read_uint(off, w);
      Felt b = advice.read_uint(off + w, w);
      std::size_t pairs_off = off + 2 * w;
      auto endpoint_at = [&](std::uint64_t idx) {
        return advice.read_uint(pairs_off + idx * 2 * w, w);
      };
      auto start_at = [&](std::uint64_t idx) {
        return advice.read_uint(pairs_off + idx * 2 * w + w, w);
      };
      // u is where the hidden preimage's chain would be after `m` steps.
      Felt u = field.add(field.mul(a, yf), b);
      for (std::uint64_t m = 1; m <= t_chain; ++m) {
        // All stored chains ending at u (list is sorted by endpoint).
        std::uint64_t lo = 0, hi = m_chains;
        while (lo < hi) {
          std::uint64_t mid = (lo + hi) / 2;
          if (endpoint_at(mid) < u) lo = mid + 1; else hi = mid;
        }
        for (std::uint64_t idx = lo; idx < m_chains && endpoint_at(idx) == u;
             ++idx) {
          std::uint64_t walk = t_chain - m;
          if (oracle.remaining() < walk + 1) continue;  // cannot afford lookup
          DomainPoint x = from_field(start_at(idx), field);
          for (std::uint64_t step = 0; step < walk; ++step) {
            Felt v = field.add(field.mul(a, to_field(oracle.query(x), field)), b);
            x = from_field(v, field);
          }
          if (oracle.query(x) == y) return x;
        }
        if (m < t_chain) {
          if (oracle.remaining() == 0) return y;  // budget gone, give up
          u = field.add(field.mul(a, to_field(oracle.query(from_field(u, field)),
                                              field)),
                        b);
        }
      }
    }
    return y;  // sentinel: nothing verified
  };
  return inv;
}

/// Pr over uniform x of Dec(f(x)) landing in the fiber f^{-1}(f(x)),
/// enumerated exactly.
inline Rational success_probability_exact(const AdaptiveInverter& inv,
                                          const FnTable& f) {
  if (inv.n != f.n()) throw SizeMismatch("table size != inverter n");
  BitString advice = inv.preprocess(f);
  std::uint64_t hits = 0;
  for (std::uint64_t x = 1; x <= f.n(); ++x) {
    DomainPoint y = f(DomainPoint{x});
    QueryChannel oracle([&f](DomainPoint r) { return f(r); }, inv.q);
    DomainPoint got = inv.decode(y, advice, oracle);
    if (f(got) == y) ++hits;
  }
  return make_rational(hits, f.n());
}

inline Rational success_probability_exact(const NonAdaptiveInverter& inv,
                                          const FnTable& f) {
  return success_probability_exact(to_adaptive(inv), f);
}

/// Monte-Carlo variant: challenges y = f(x) for uniform sampled x.
inline double success_probability_mc(const AdaptiveInverter& inv,
                                     const FnTable& f, std::uint64_t trials,
                                     Rng& rng) {
  if (inv.n != f.n()) throw SizeMismatch("table size != inverter n");
  BitString advice = inv.preprocess(f);
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    DomainPoint y = f(uniform_point(f.n(), rng));
    QueryChannel oracle([&f](DomainPoint r) { return f(r); }, inv.q);
    if (f(inv.decode(y, advice, oracle)) == y) ++hits;
  }
  return trials == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(trials);
}

/// Success rate averaged over uniform f as well as uniform x (one challenge
/// per sampled function). This is the alpha measured by the soundness and
/// tradeoff experiments.
inline double average_success_mc(const AdaptiveInverter& inv,
                                 std::uint64_t trials, Rng& rng) {
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    FnTable f = sample_function(inv.n, rng);
    BitString advice = inv.preprocess(f);
    DomainPoint y = f(uniform_point(inv.n, rng));
    QueryChannel oracle([&f](DomainPoint r) { return f(r); }, inv.q);
    if (f(inv.decode(y, advice, oracle)) == y) ++hits;
  }
  return trials == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(trials);
}

/// Realized multi-challenge run of a zero-advice inverter: X_j = Inv(Y_j; f)
/// and the prefix flags Z_j ("all of the first j challenges inverted").
struct ChainState {
  std::vector<DomainPoint> challenges;
  std::vector<DomainPoint> answers;
  std::vector<bool> prefix_ok;
};

inline ChainState run_chain(const NonAdaptiveInverter& inv, const FnTable& f,
                            const std::vector<DomainPoint>& challenges) {
  if (inv.s != 0) throw ParameterError("run_chain needs a zero-advice inverter");
  if (inv.n != f.n()) throw SizeMismatch("table size != inverter n");
  AdaptiveInverter ad = to_adaptive(inv);
  BitString advice;  // s = 0
  ChainState st;
  st.challenges = challenges;
  bool ok = true;
  for (DomainPoint y : challenges) {
    QueryChannel oracle([&f](DomainPoint r) { return f(r); }, ad.q);
    DomainPoint x = ad.decode(y, advice, oracle);
    st.answers.push_back(x);
    ok = ok && f(x) == y;
    st.prefix_ok.push_back(ok);
  }
  return st;
}

}  // namespace invlab
