#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "invlab/errors.hpp"
#include "invlab/field.hpp"
#include "invlab/inverters.hpp"
#include "invlab/linalg.hpp"
#include "invlab/rng.hpp"

namespace invlab {

/// Every scalar knob used by the implemented bound formulas, in one bundle.
struct BoundParams {
  std::uint64_t n = 2;
  std::uint64_t s = 0;
  std::uint64_t q = 1;
  std::uint64_t d = 1;    // decision-tree depth
  std::uint64_t m = 0;    // challenge count in the theorem products
  std::uint64_t i = 1;    // chain step index
  std::uint64_t t = 1;    // repetition count / rows per block
  std::uint64_t ell = 0;  // conditioning rows
  std::uint64_t c = 1;    // per-index set size
  double tau = 0.0;
  double delta = 0.0;
  double mu = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;
};

enum class Verdict : std::uint8_t { PASS, FAIL, VACUOUS, INCONCLUSIVE };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::PASS: return "PASS";
    case Verdict::FAIL: return "FAIL";
    case Verdict::VACUOUS: return "VACUOUS";
    default: return "INCONCLUSIVE";
  }
}

/// Fixed 95% Hoeffding radius sqrt(ln(40) / (2 trials)).
inline double hoeffding_half_width(std::uint64_t trials) {
  if (trials == 0) return std::numeric_limits<double>::infinity();
  return std::sqrt(std::log(40.0) / (2.0 * static_cast<double>(trials)));
}

/// One-sided verdict against an upper bound. VACUOUS when the bound carries
/// no information at this scale (>= 1). FAIL only when even the optimistic
/// edge of the interval sits above the bound. PASS when the point estimate
/// is within the bound; the band in between is INCONCLUSIVE (the data are
/// consistent with the bound but do not confirm it; re-run with more trials).
inline Verdict verdict_against(double estimate, double half_width, double bound) {
  if (!(bound < 1.0)) return Verdict::VACUOUS;
  if (estimate - half_width > bound) return Verdict::FAIL;
  if (estimate <= bound) return Verdict::PASS;
  return Verdict::INCONCLUSIVE;
}

/// Monte-Carlo estimate compared against a stated bound.
struct McReport {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double estimate = 0.0;
  double half_width = std::numeric_limits<double>::infinity();
  double bound = 0.0;
  Verdict verdict = Verdict::INCONCLUSIVE;
};

inline McReport make_mc_report(std::uint64_t trials, std::uint64_t successes,
                               double bound) {
  McReport r;
  r.trials = trials;
  r.successes = successes;
  r.estimate = trials ? static_cast<double>(successes) / static_cast<double>(trials)
                      : 0.0;
  r.half_width = hoeffding_half_width(trials);
  r.bound = bound;
  r.verdict = verdict_against(r.estimate, r.half_width, bound);
  return r;
}

// ---------------------------------------------------------------------------
// Exhaustive linear-algebra verifiers
// ---------------------------------------------------------------------------

struct ExhaustiveReport {
  std::uint64_t cases = 0;
  std::uint64_t counterexamples = 0;
  std::string first_counterexample;
  bool ok() const { return counterexamples == 0; }
};

/// For every matrix A (up to the given shape), every consistent right-hand
/// side v and every coordinate j outside E(A), the conditional distribution
/// of coordinate j over the solution set must be exactly uniform. Full
/// enumeration; exact rational comparison.
inline ExhaustiveReport verify_known_unit_vectors(
    const std::vector<std::uint64_t>& p_list, std::size_t max_rows,
    std::size_t max_cols) {
  ExhaustiveReport rep;
  for (std::uint64_t p : p_list) {
    PrimeField field(p);
    Rational uniform = make_rational(1, p);
    for (std::size_t rows = 0; rows <= max_rows; ++rows) {
      for (std::size_t cols = 1; cols <= max_cols; ++cols) {
        std::uint64_t cells = rows * cols;
        // odometer over all p^(rows*cols) matrices
        std::vector<Felt> entries(cells, 0);
        for (;;) {
          Mat a(rows, cols, field);
          for (std::size_t i = 0; i < cells; ++i) a.at(i / cols, i % cols) = entries[i];
          std::set<std::size_t> pinned = spanned_units(a);
          // all consistent v, via the image of the solution cube
          std::set<std::vector<Felt>> images;
          std::vector<Felt> x(cols, 0);
          for (;;) {
            images.insert(mat_vec(a, x));
            std::size_t k = 0;
            while (k < cols && ++x[k] == p) x[k++] = 0;
            if (k == cols) break;
          }
          for (const std::vector<Felt>& v : images) {
            for (std::size_t j = 1; j <= cols; ++j) {
              if (pinned.count(j)) continue;
              ++rep.cases;
              std::vector<Rational> dist = conditional_coord_dist(a, v, j);
              bool uniform_ok = std::all_of(
                  dist.begin(), dist.end(),
                  [&](const Rational& r) { return r == uniform; });
              if (!uniform_ok) {
                ++rep.counterexamples;
                if (rep.first_counterexample.empty()) {
                  rep.first_counterexample =
                      "p=" + std::to_string(p) + " rows=" + std::to_string(rows) +
                      " cols=" + std::to_string(cols) + " j=" + std::to_string(j);
                }
              }
            }
          }
          std::size_t k = 0;
          while (k < cells && ++entries[k] == p) entries[k++] = 0;
          if (k == cells) break;
          if (cells == 0) break;
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Random-function claims
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t ceil_frac(double x) {
  return static_cast<std::uint64_t>(std::ceil(x));
}

}  // namespace detail

/// log2 of the tail bound 2^{2 ceil(mu n) log2(1/mu) + ceil(mu n) log2(c/n)}.
inline double good_indices_bound_log2(std::uint64_t n, std::uint64_t c,
                                      double mu) {
  double mu_ceil = static_cast<double>(detail::ceil_frac(mu * static_cast<double>(n)));
  return 2.0 * mu_ceil * std::log2(1.0 / mu) +
         mu_ceil * std::log2(static_cast<double>(c) / static_cast<double>(n));
}

/// Pr over uniform f of |{y : y in f(S_y)}| >= mu n, versus the closed-form
/// tail bound. sets[y-1] is S_y; all sets share size c.
inline McReport verify_not_many_good_indices(
    std::uint64_t n, const std::vector<std::vector<DomainPoint>>& sets,
    double mu, std::uint64_t trials, Rng& rng) {
  if (!(mu >= 0.0 && mu <= 0.5)) throw ParamError("mu outside [0, 1/2]");
  if (sets.size() != n || n == 0) throw SizeMismatch("need one set per index");
  std::size_t c = sets[0].size();
  for (const auto& s : sets) {
    if (s.size() != c) throw SizeMismatch("sets must share size c");
  }
  double bound = mu == 0.0 ? std::numeric_limits<double>::infinity()
                           : std::exp2(good_indices_bound_log2(n, c, mu));
  std::uint64_t successes = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    FnTable f = sample_function(n, rng);
    std::uint64_t good = 0;
    for (std::uint64_t y = 1; y <= n; ++y) {
      for (DomainPoint u : sets[y - 1]) {
        if (f(u).index == y) {
          ++good;
          break;
        }
      }
    }
    if (static_cast<double>(good) >= mu * static_cast<double>(n)) ++successes;
  }
  return make_mc_report(trials, successes, bound);
}

inline std::vector<std::vector<DomainPoint>> singleton_sets(std::uint64_t n) {
  std::vector<std::vector<DomainPoint>> sets(n);
  for (std::uint64_t y = 1; y <= n; ++y) sets[y - 1] = {DomainPoint{y}};
  return sets;
}

/// Conditioned variant: the sampler supplies (f, W-indicator) pairs with
/// Pr[W] >= p_lower; challenges Y are uniform and independent. The bound
/// gains a log2(1/p) term over the unconditioned one. Fewer than 100
/// conditioned samples is an error, not a verdict.
inline McReport verify_conditioned_claim(
    std::uint64_t n, const std::vector<std::vector<DomainPoint>>& sets,
    double gamma, const std::function<std::pair<FnTable, bool>(Rng&)>& sampler,
    double p_lower, std::uint64_t trials, Rng& rng) {
  if (!(gamma >= 0.0 && gamma <= 0.5)) throw ParamError("gamma outside [0, 1/2]");
  if (!(p_lower > 0.0 && p_lower <= 1.0)) throw ParamError("p outside (0, 1]");
  if (sets.size() != n || n == 0) throw SizeMismatch("need one set per index");
  std::size_t c = sets[0].size();
  double bound =
      gamma == 0.0
          ? std::numeric_limits<double>::infinity()
          : gamma + std::exp2(good_indices_bound_log2(n, c, gamma) +
                              std::log2(1.0 / p_lower));
  std::uint64_t conditioned = 0, successes = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    auto [f, w] = sampler(rng);
    if (!w) continue;
    ++conditioned;
    DomainPoint y = uniform_point(n, rng);
    for (DomainPoint u : sets[y.index - 1]) {
      if (f(u) == y) {
        ++successes;
        break;
      }
    }
  }
  if (conditioned < 100) {
    throw TooFewConditionedSamples("only " + std::to_string(conditioned) +
                                   " conditioned samples");
  }
  return make_mc_report(conditioned, successes, bound);
}

/// True iff some tau n inputs map into delta n outputs; computed exactly by
/// summing the floor(delta n) heaviest fibers.
inline bool tau_delta_predicate(const FnTable& f, double tau, double delta) {
  if (!(tau >= 0.0 && tau <= 1.0) || !(delta >= 0.0 && delta <= 1.0)) {
    throw DomainError("tau and delta must lie in [0, 1]");
  }
  std::uint64_t n = f.n();
  std::vector<std::uint64_t> fiber(n, 0);
  for (DomainPoint v : f.values()) ++fiber[v.index - 1];
  std::sort(fiber.begin(), fiber.end(), std::greater<>());
  std::uint64_t k = static_cast<std::uint64_t>(
      std::floor(delta * static_cast<double>(n)));
  k = std::min<std::uint64_t>(k, n);
  std::uint64_t heaviest = 0;
  for (std::uint64_t idx = 0; idx < k; ++idx) heaviest += fiber[idx];
  std::uint64_t need = static_cast<std::uint64_t>(
      std::ceil(tau * static_cast<double>(n)));
  return heaviest >= need;
}

/// Reference oracle for the predicate: enumerate every candidate image set Y
/// of size floor(delta n) and ask whether its fibers hold ceil(tau n) points.
inline bool tau_delta_naive(const FnTable& f, double tau, double delta) {
  std::uint64_t n = f.n();
  if (n > 24) throw ScaleLimit("subset enumeration beyond n = 24");
  std::uint64_t k = std::min<std::uint64_t>(
      static_cast<std::uint64_t>(std::floor(delta * static_cast<double>(n))), n);
  std::uint64_t need = static_cast<std::uint64_t>(
      std::ceil(tau * static_cast<double>(n)));
  std::vector<std::uint64_t> fiber(n, 0);
  for (DomainPoint v : f.values()) ++fiber[v.index - 1];
  // walk all n-choose-k index subsets
  std::vector<std::uint64_t> pick(k);
  for (std::uint64_t idx = 0; idx < k; ++idx) pick[idx] = idx;
  if (k == 0) return 0 >= need;
  for (;;) {
    std::uint64_t total = 0;
    for (std::uint64_t idx : pick) total += fiber[idx];
    if (total >= need) return true;
    std::size_t pos = k;
    while (pos-- > 0) {
      if (pick[pos] != n - k + pos) {
        ++pick[pos];
        for (std::size_t r = pos + 1; r < k; ++r) pick[r] = pick[r - 1] + 1;
        break;
      }
      if (pos == 0) return false;
    }
  }
}

/// log2 of the compression bound 2^{n(h(tau)+h(delta)) + floor(tau n) log2 delta}.
inline double tau_delta_bound_log2(std::uint64_t n, double tau, double delta) {
  double fl = std::floor(tau * static_cast<double>(n));
  double tail = fl == 0.0 ? 0.0 : fl * std::log2(delta);
  return static_cast<double>(n) * (binary_entropy(tau) + binary_entropy(delta)) +
         tail;
}

inline McReport verify_tau_delta(std::uint64_t n, double tau, double delta,
                                 std::uint64_t trials, Rng& rng) {
  if (!(tau >= 0.0 && tau <= 0.5) || !(delta >= 0.0 && delta <= 0.5)) {
    throw ParamError("bound needs tau, delta in [0, 1/2]");
  }
  double bound = std::exp2(tau_delta_bound_log2(n, tau, delta));
  std::uint64_t successes = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    if (tau_delta_predicate(sample_function(n, rng), tau, delta)) ++successes;
  }
  return make_mc_report(trials, successes, bound);
}

/// Exact exhaustive comparison of the inverter's exact-preimage rate
/// Pr[Inv(f, f(x)) = x] against alpha^2 / 8, where alpha is its fiber-hit
/// rate, both averaged over every (f, x) pair.
struct PreimageReport {
  Rational alpha;   // Pr[decoded point lands in the fiber]
  Rational target;  // Pr[decoded point is x itself]
  double bound = 0.0;
  bool pass = false;
  std::uint64_t pairs = 0;
};

inline PreimageReport verify_correct_preimage_exact(const AdaptiveInverter& inv) {
  std::uint64_t n = inv.n;
  double total_d = std::pow(static_cast<double>(n), static_cast<double>(n));
  if (total_d > 2e6) throw ScaleLimit("n^n enumeration too large");
  std::uint64_t fiber_hits = 0, exact_hits = 0, pairs = 0;
  std::vector<std::uint64_t> idx(n, 1);
  for (;;) {
    FnTable f = FnTable::from_indices(idx);
    BitString advice = inv.preprocess(f);
    for (std::uint64_t x = 1; x <= n; ++x) {
      DomainPoint y = f(DomainPoint{x});
      QueryChannel oracle([&f](DomainPoint r) { return f(r); }, inv.q);
      DomainPoint got = inv.decode(y, advice, oracle);
      ++pairs;
      if (f(got) == y) ++fiber_hits;
      if (got.index == x) ++exact_hits;
    }
    std::size_t k = 0;
    while (k < n && ++idx[k] > n) idx[k++] = 1;
    if (k == n) break;
  }
  PreimageReport rep;
  rep.pairs = pairs;
  rep.alpha = make_rational(fiber_hits, pairs);
  rep.target = make_rational(exact_hits, pairs);
  double a = to_double(rep.alpha);
  rep.bound = a * a / 8.0;
  rep.pass = to_double(rep.target) >= rep.bound;
  return rep;
}

struct PreimageReportMc {
  double alpha = 0.0;
  double target = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::uint64_t trials = 0;
};

inline PreimageReportMc verify_correct_preimage_mc(const AdaptiveInverter& inv,
                                                   std::uint64_t trials,
                                                   Rng& rng) {
  std::uint64_t fiber_hits = 0, exact_hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    FnTable f = sample_function(inv.n, rng);
    BitString advice = inv.preprocess(f);
    DomainPoint x = uniform_point(inv.n, rng);
    DomainPoint y = f(x);
    QueryChannel oracle([&f](DomainPoint r) { return f(r); }, inv.q);
    DomainPoint got = inv.decode(y, advice, oracle);
    if (f(got) == y) ++fiber_hits;
    if (got == x) ++exact_hits;
  }
  PreimageReportMc rep;
  rep.trials = trials;
  rep.alpha = trials ? static_cast<double>(fiber_hits) / trials : 0.0;
  rep.target = trials ? static_cast<double>(exact_hits) / trials : 0.0;
  rep.bound = rep.alpha * rep.alpha / 8.0;
  rep.pass = rep.target >= rep.bound;
  return rep;
}

/// Rejection-sampled estimate of Pr[Z_i | Z_{i-1}] for a zero-advice
/// inverter on fresh uniform challenges: sample (f, Y_1..Y_i), keep the
/// trials whose first i-1 inversions all landed, and measure step i among
/// them. Needs at least 100 conditioned samples.
inline McReport estimate_chain_success(const NonAdaptiveInverter& inv,
                                       std::uint64_t i, std::uint64_t trials,
                                       Rng& rng, double bound) {
  if (i < 1) throw DomainError("i must be >= 1");
  std::uint64_t n = inv.n;
  std::uint64_t conditioned = 0, successes = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    FnTable f = sample_function(n, rng);
    std::vector<DomainPoint> ys;
    ys.reserve(i);
    for (std::uint64_t j = 0; j < i; ++j) ys.push_back(uniform_point(n, rng));
    ChainState st = run_chain(inv, f, ys);
    if (i >= 2 && !st.prefix_ok[i - 2]) continue;
    ++conditioned;
    if (st.prefix_ok[i - 1]) ++successes;
  }
  if (conditioned < 100) {
    throw TooFewConditionedSamples("only " + std::to_string(conditioned) +
                                   " conditioned samples");
  }
  return make_mc_report(conditioned, successes, bound);
}

// ---------------------------------------------------------------------------
// Closed-form bound evaluation
// ---------------------------------------------------------------------------

struct LemmaBound {
  double value = 0.0;
  bool vacuous = false;
  double tail_log2 = 0.0;  // exponent of the 2^{...} term
};

/// (2i-1)/n + mu + 2^{2 ceil(mu n) log2(1/mu) - ceil(mu n) log2 n + (2i-2) log2 n}
inline LemmaBound eval_affine_lemma_bound(std::uint64_t n, std::uint64_t i,
                                          double mu) {
  if (n < 2 || i < 1) throw DomainError("need n >= 2 and i >= 1");
  if (!(mu > 0.0 && mu <= 0.5)) throw DomainError("mu outside (0, 1/2]");
  double mu_ceil = static_cast<double>(detail::ceil_frac(mu * static_cast<double>(n)));
  double lg = std::log2(static_cast<double>(n));
  LemmaBound b;
  b.tail_log2 = 2.0 * mu_ceil * std::log2(1.0 / mu) - mu_ceil * lg +
                (2.0 * static_cast<double>(i) - 2.0) * lg;
  b.value = (2.0 * static_cast<double>(i) - 1.0) / static_cast<double>(n) + mu +
            std::exp2(b.tail_log2);
  b.vacuous = !(b.value < 1.0);
  return b;
}

/// ((d+1)i-1)/n + mu + 2^{2 ceil(mu n) log2(1/mu) + ceil(mu n) log2(q/n) + (i-1)(d+1) log2 n}
inline LemmaBound eval_tree_lemma_bound(std::uint64_t n, std::uint64_t i,
                                        std::uint64_t d, std::uint64_t q,
                                        double mu) {
  if (n < 2 || i < 1 || d < 1 || q < 1) throw DomainError("need n >= 2, i, d, q >= 1");
  if (!(mu > 0.0 && mu <= 0.5)) throw DomainError("mu outside (0, 1/2]");
  double mu_ceil = static_cast<double>(detail::ceil_frac(mu * static_cast<double>(n)));
  double lg = std::log2(static_cast<double>(n));
  LemmaBound b;
  b.tail_log2 =
      2.0 * mu_ceil * std::log2(1.0 / mu) +
      mu_ceil * std::log2(static_cast<double>(q) / static_cast<double>(n)) +
      static_cast<double>(i - 1) * static_cast<double>(d + 1) * lg;
  b.value = (static_cast<double>(d + 1) * static_cast<double>(i) - 1.0) /
                static_cast<double>(n) +
            mu + std::exp2(b.tail_log2);
  b.vacuous = !(b.value < 1.0);
  return b;
}

struct TheoremBound {
  double value = 0.0;
  bool vacuous = false;
  double alpha_term_log2 = 0.0;    // compression term, as log2
  double product_term_log2 = 0.0;  // 2^s delta^{-m} prod(...), as log2
};

namespace detail {

inline void check_tau_delta_range(double tau, double delta, std::uint64_t m) {
  if (!(tau >= 0.0 && tau <= 0.5) || !(delta >= 0.0 && delta <= 0.5)) {
    throw ParamError("bound needs tau, delta in [0, 1/2]");
  }
  if (delta == 0.0 && m > 0) throw ParamError("delta must be positive when m > 0");
}

}  // namespace detail

/// alpha_{tau,delta} + 2^s delta^{-m} prod_{j=1..m} (2j/n + max{n^{-1/4}, 4j/n}).
/// The compression term uses its closed-form upper bound, so the whole
/// evaluation is deterministic.
inline TheoremBound eval_affine_theorem_bound(const BoundParams& p) {
  if (p.n < 2) throw ParamError("n must be >= 2");
  if (16 * p.m > p.n) throw ParamError("m exceeds n / 16");
  detail::check_tau_delta_range(p.tau, p.delta, p.m);
  if (p.m > 100000000ULL) throw ScaleLimit("m too large to accumulate");
  double n = static_cast<double>(p.n);
  TheoremBound b;
  b.alpha_term_log2 = tau_delta_bound_log2(p.n, p.tau, p.delta);
  double acc = static_cast<double>(p.s);
  if (p.m > 0) acc += static_cast<double>(p.m) * std::log2(1.0 / p.delta);
  double root = std::pow(1.0 / n, 0.25);
  for (std::uint64_t j = 1; j <= p.m; ++j) {
    double jj = static_cast<double>(j);
    acc += std::log2(2.0 * jj / n + std::max(root, 4.0 * jj / n));
  }
  b.product_term_log2 = acc;
  b.value = std::exp2(b.alpha_term_log2) + std::exp2(b.product_term_log2);
  b.vacuous = !(b.value < 1.0);
  return b;
}

/// Tree analogue with factors
/// ((d+1)j/n + max{(q/n)^{1/4}, 2(d+1)j log2 n / (n log2(n/q))}),
/// valid for q <= n/16 and m <= n log2(n/q) / (4(d+1) log2 n).
inline TheoremBound eval_tree_theorem_bound(const BoundParams& p) {
  if (p.n < 2 || p.d < 1 || p.q < 1) throw ParamError("need n >= 2, d >= 1, q >= 1");
  if (16 * p.q > p.n) throw ParamError("q exceeds n / 16");
  double n = static_cast<double>(p.n);
  double lg_n = std::log2(n);
  double lg_nq = std::log2(n / static_cast<double>(p.q));
  double m_cap = n * lg_nq / (4.0 * static_cast<double>(p.d + 1) * lg_n);
  if (static_cast<double>(p.m) > m_cap) throw ParamError("m exceeds the tree regime cap");
  detail::check_tau_delta_range(p.tau, p.delta, p.m);
  if (p.m > 100000000ULL) throw ScaleLimit("m too large to accumulate");
  TheoremBound b;
  b.alpha_term_log2 = tau_delta_bound_log2(p.n, p.tau, p.delta);
  double acc = static_cast<double>(p.s);
  if (p.m > 0) acc += static_cast<double>(p.m) * std::log2(1.0 / p.delta);
  double root = std::pow(static_cast<double>(p.q) / n, 0.25);
  double dd = static_cast<double>(p.d + 1);
  for (std::uint64_t j = 1; j <= p.m; ++j) {
    double jj = static_cast<double>(j);
    acc += std::log2(dd * jj / n + std::max(root, 2.0 * dd * jj * lg_n / (n * lg_nq)));
  }
  b.product_term_log2 = acc;
  b.value = std::exp2(b.alpha_term_log2) + std::exp2(b.product_term_log2);
  b.vacuous = !(b.value < 1.0);
  return b;
}

/// Smallest s in [0, s_max] with eval(s) >= threshold, for evaluations that
/// are monotone nondecreasing in s; nullopt when even s_max stays below.
inline std::optional<std::uint64_t> crossing_s(
    const std::function<double(std::uint64_t)>& eval, double threshold,
    std::uint64_t s_max) {
  if (!(eval(s_max) >= threshold)) return std::nullopt;
  std::uint64_t lo = 0, hi = s_max;
  while (lo < hi) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    if (eval(mid) >= threshold) hi = mid; else lo = mid + 1;
  }
  return lo;
}

/// Conditional span-membership experiment: draw F uniformly from the affine
/// solution set of A F = v, draw Y uniformly, and test whether Y lands in
/// F(E(stack(A, B^Y))). blocks[y-1] is the per-challenge row block B^y.
inline McReport verify_advanced_span_claim(const Mat& a,
                                           const std::vector<Felt>& v,
                                           const std::vector<Mat>& blocks,
                                           double mu, std::uint64_t trials,
                                           Rng& rng) {
  std::uint64_t n = a.cols();
  if (a.field().modulus() != n) throw SizeMismatch("field size must equal n");
  if (blocks.size() != n) throw SizeMismatch("need one row block per challenge");
  std::size_t t_rows = blocks[0].rows();
  for (const Mat& b : blocks) {
    if (b.cols() != n || b.rows() != t_rows || !(b.field() == a.field())) {
      throw SizeMismatch("blocks must be t x n over the same field");
    }
  }
  if (!(mu >= 0.0 && mu <= 0.5)) throw ParamError("mu outside [0, 1/2]");
  std::uint64_t ell = a.rows();
  double bound;
  if (mu == 0.0) {
    bound = std::numeric_limits<double>::infinity();
  } else {
    double mu_ceil = static_cast<double>(detail::ceil_frac(mu * static_cast<double>(n)));
    double tail_log2 =
        2.0 * mu_ceil * std::log2(1.0 / mu) +
        mu_ceil * std::log2(static_cast<double>(t_rows) / static_cast<double>(n)) +
        static_cast<double>(ell) * std::log2(static_cast<double>(n));
    bound = (static_cast<double>(ell) / static_cast<double>(n) + mu) +
            std::exp2(tail_log2);
  }
  // E(stack(A, B^y)) depends only on y; precompute all n of them.
  std::vector<std::vector<std::size_t>> pinned(n);
  for (std::uint64_t y = 1; y <= n; ++y) {
    std::set<std::size_t> e = spanned_units(vstack(a, blocks[y - 1]));
    pinned[y - 1].assign(e.begin(), e.end());
  }
  std::uint64_t successes = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::vector<Felt> f = sample_solution(a, v, rng);  // throws if infeasible
    DomainPoint y = uniform_point(n, rng);
    for (std::size_t u : pinned[y.index - 1]) {
      if (f[u - 1] == y.index - 1) {
        ++successes;
        break;
      }
    }
  }
  return make_mc_report(trials, successes, bound);
}

// ---------------------------------------------------------------------------
// Inequality grid checks
// ---------------------------------------------------------------------------

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;  // exact: the running value is itself binomial
  }
  if (c > std::numeric_limits<std::uint64_t>::max()) throw ScaleLimit("binomial overflow");
  return static_cast<std::uint64_t>(c);
}

struct FactReport {
  bool ok = true;
  std::uint64_t checks = 0;
  std::string first_failure;
};

/// Grid verification of the utility inequalities: binom(n,k) <= 2^{n h(k/n)}
/// for all n <= 64, log2 x >= 1 - 1/x on [1, 100], and h(x) <= -2 x log2 x
/// on (0, 1/2].
inline FactReport verify_entropy_facts() {
  FactReport rep;
  auto fail = [&rep](const std::string& what) {
    rep.ok = false;
    if (rep.first_failure.empty()) rep.first_failure = what;
  };
  for (std::uint64_t n = 1; n <= 64; ++n) {
    for (std::uint64_t k = 0; k <= n; ++k) {
      ++rep.checks;
      long double lhs = static_cast<long double>(binomial(n, k));
      long double rhs = std::exp2l(static_cast<long double>(n) *
                                   static_cast<long double>(binary_entropy(
                                       static_cast<double>(k) / static_cast<double>(n))));
      if (lhs > rhs * (1.0L + 1e-12L)) {
        fail("binomial bound at n=" + std::to_string(n) + " k=" + std::to_string(k));
      }
    }
  }
  for (int step = 0; step <= 1000; ++step) {
    ++rep.checks;
    double x = 1.0 + 99.0 * static_cast<double>(step) / 1000.0;
    if (std::log2(x) < 1.0 - 1.0 / x - 1e-12) {
      fail("log bound at x=" + std::to_string(x));
    }
  }
  for (int step = 1; step <= 1000; ++step) {
    ++rep.checks;
    double x = 0.5 * static_cast<double>(step) / 1000.0;
    if (binary_entropy(x) > -2.0 * x * std::log2(x) + 1e-12) {
      fail("entropy bound at x=" + std::to_string(x));
    }
  }
  return rep;
}

}  // namespace invlab
