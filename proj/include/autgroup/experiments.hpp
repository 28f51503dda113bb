#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "autgroup/bigint.hpp"
#include "autgroup/errors.hpp"
#include "autgroup/groups.hpp"
#include "autgroup/mealy.hpp"
#include "autgroup/perm.hpp"
#include "autgroup/rng.hpp"
#include "autgroup/theory.hpp"

// Seeded Monte Carlo and exhaustive studies over random cyclic automata.
// Trial i always draws from trial_rng(seed, i), so results do not depend on
// how trials are scheduled across threads.

namespace autgroup {

/// Runs fn(i) for i in [0, count) on `jobs` threads. If any call throws, the
/// exception of the smallest failing index is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn &&fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i)
      fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = count;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      std::size_t const i = next.fetch_add(1);
      if (i >= count)
        return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t)
    pool.emplace_back(worker);
  for (auto &t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
}

inline std::string format_double(double x, int precision = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << x;
  return os.str();
}

// ---------------------------------------------------------------------------
// Reference values

constexpr double conjectured_band_lo = 4.26340;
constexpr double conjectured_band_hi = 12.0;

/// Truncated asymptotic series for the probability that two random
/// permutations generate S_k or A_k.
inline double dixon_reference(std::size_t k) {
  if (k < 2)
    throw PreconditionError("dixon_reference needs k >= 2");
  double const x = 1.0 / static_cast<double>(k);
  static constexpr double coeff[] = {1, 1, 4, 23, 171};
  double s = 1.0, p = 1.0;
  for (double c : coeff) {
    p *= x;
    s -= c * p;
  }
  return s;
}

/// Outcome key: "Trivial" for the trivial group, "<shape>:<rank>" when the
/// verified group equals the prediction, "Other" otherwise.
inline std::string outcome_key(ClassificationReport const &r) {
  if (r.verified_order == 1)
    return "Trivial";
  if (r.match && r.prediction)
    return std::string(to_string(r.prediction->shape_tag)) + ":" +
           std::to_string(r.prediction->sign_rank);
  return "Other";
}

/// Large-k limit of each outcome for n states: the share of the 2^n parity
/// vectors whose rotation span has the given shape and rank.
inline std::map<std::string, double> limit_references(std::size_t n) {
  std::map<std::string, double> ref;
  if (n == 0 || n > 20)
    return ref;
  std::uint64_t const total = std::uint64_t{1} << n;
  std::map<std::string, std::uint64_t> counts;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    SignVector v;
    for (std::size_t i = 0; i < n; ++i)
      v.bits.push_back(static_cast<std::uint8_t>(mask >> i & 1));
    auto const r = circulant_rank(v);
    ++counts[std::string(to_string(shape_for_rank(r, n))) + ":" + std::to_string(r)];
  }
  for (auto const &[key, c] : counts)
    ref[key] = static_cast<double>(c) / static_cast<double>(total);
  ref["Trivial"] = 0.0;
  ref["Other"] = 0.0;
  return ref;
}

// ---------------------------------------------------------------------------
// Cyclic automaton distribution

enum class TrialMode { Sample, Enumerate };

struct TrialConfig {
  std::size_t n = 2;
  std::size_t k = 6;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  TrialMode mode = TrialMode::Sample;
  unsigned jobs = 1;
};

struct TrialRecord {
  std::size_t trial = 0;
  SignVector sign_vector;
  std::size_t sign_rank = 0;
  ShapeTag shape = ShapeTag::GeneralSemidirect;
  BigInt predicted_order;
  BigInt verified_order;
  bool match = false;
  bool hypotheses_ok = false;
  std::string outcome;
};

inline constexpr std::size_t exact_same_order_max_k = 40;

/// k^2 * sum_m P(o(s) = m)^2, summed over cycle types with weight 1/z.
inline double same_order_exact(std::size_t k) {
  if (k == 0)
    throw PreconditionError("need k >= 1");
  if (k > exact_same_order_max_k)
    throw SizeGuard("exact same-order probability limited to k <= " +
                    std::to_string(exact_same_order_max_k));
  std::map<std::uint64_t, long double> by_order;
  // Parts are chosen in decreasing length; weight is prod 1 / (l^a a!).
  std::function<void(std::size_t, std::size_t, std::uint64_t, long double)> walk =
      [&](std::size_t rest, std::size_t max_len, std::uint64_t ord, long double w) {
        if (rest == 0) {
          by_order[ord] += w;
          return;
        }
        for (std::size_t l = std::min(rest, max_len); l >= 1; --l) {
          long double wl = w;
          for (std::size_t a = 1; a * l <= rest; ++a) {
            wl /= static_cast<long double>(l) * static_cast<long double>(a);
            walk(rest - a * l, l - 1, std::lcm(ord, std::uint64_t{l}), wl);
          }
        }
      };
  walk(k, k, 1, 1.0L);
  long double sum = 0;
  for (auto const &[m, p] : by_order)
    sum += p * p;
  return static_cast<double>(sum * static_cast<long double>(k) * static_cast<long double>(k));
}

struct DistributionReport {
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  TrialMode mode = TrialMode::Sample;
  std::uint64_t total = 0;
  std::map<std::string, std::uint64_t> counts;
  std::map<std::string, double> reference; // outcomes with a known limit
  std::vector<TrialRecord> records;        // per trial, ordered by index
  std::uint64_t exactness_violations = 0;  // match false with hypotheses true
  std::vector<std::string> notes;

  double probability(std::string const &key) const {
    auto it = counts.find(key);
    return it == counts.end() || total == 0
               ? 0.0
               : static_cast<double>(it->second) / static_cast<double>(total);
  }
  /// Binomial standard error of probability(key).
  double standard_error(std::string const &key) const {
    if (total == 0)
      return 0.0;
    double const p = probability(key);
    return std::sqrt(p * (1 - p) / static_cast<double>(total));
  }
  std::vector<std::string> outcomes() const {
    std::vector<std::string> keys;
    for (auto const &[key, c] : counts)
      keys.push_back(key);
    for (auto const &[key, r] : reference)
      if (!counts.count(key) && r > 0)
        keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    return keys;
  }
};

inline TrialRecord run_cyclic_trial(std::vector<Permutation> perms, std::size_t index) {
  auto const rep = classify(MealyAutomaton::cyclic(std::move(perms)));
  TrialRecord t;
  t.trial = index;
  t.sign_vector = rep.prediction->sign_vector;
  t.sign_rank = rep.prediction->sign_rank;
  t.shape = rep.prediction->shape_tag;
  t.predicted_order = rep.prediction->predicted_order;
  t.verified_order = rep.verified_order;
  t.match = rep.match;
  t.hypotheses_ok = rep.prediction->hypotheses_ok;
  t.outcome = outcome_key(rep);
  return t;
}

namespace detail {

inline void tally(DistributionReport &rep) {
  rep.total = rep.records.size();
  for (auto const &t : rep.records) {
    ++rep.counts[t.outcome];
    if (!t.match && t.hypotheses_ok)
      ++rep.exactness_violations;
  }
  rep.reference = limit_references(rep.n);
  if (rep.k >= 2) {
    double const dixon_bias = 1.0 - dixon_reference(rep.k);
    double const collision_bias =
        (rep.k <= exact_same_order_max_k ? same_order_exact(rep.k) : conjectured_band_hi) /
        static_cast<double>(rep.k * rep.k);
    rep.notes.push_back("finite-k bias: O(1/k) generation failure ~ " +
                        format_double(dixon_bias) + ", O(1/k^2) same-order collisions ~ " +
                        format_double(collision_bias));
  }
  rep.notes.push_back("reference values are large-k limits; finite-k tolerances are "
                      "engineering choices");
  if (rep.exactness_violations)
    rep.notes.push_back("exactness violations: " + std::to_string(rep.exactness_violations));
}

} // namespace detail

/// Random n-state k-letter cyclic automata, classified one by one.
inline DistributionReport sample_cyclic_distribution(TrialConfig const &cfg) {
  if (cfg.n == 0 || cfg.k == 0)
    throw PreconditionError("need n >= 1 and k >= 1");
  DistributionReport rep;
  rep.n = cfg.n;
  rep.k = cfg.k;
  rep.seed = cfg.seed;
  rep.mode = TrialMode::Sample;
  rep.records.resize(cfg.trials);
  parallel_for(cfg.trials, cfg.jobs, [&](std::size_t i) {
    auto rng = trial_rng(cfg.seed, i);
    std::vector<Permutation> perms;
    for (std::size_t q = 0; q < cfg.n; ++q)
      perms.push_back(random_permutation(cfg.k, rng));
    rep.records[i] = run_cyclic_trial(std::move(perms), i);
  });
  detail::tally(rep);
  return rep;
}

constexpr std::size_t enumeration_max_letters = 6;

/// Every ordered pair of permutations of k <= 6 letters.
inline DistributionReport exact_enumeration_2(std::size_t k, unsigned jobs = 1) {
  if (k == 0)
    throw PreconditionError("need k >= 1");
  if (k > enumeration_max_letters)
    throw SizeGuard("exact enumeration is limited to k <= 6");
  std::vector<Permutation> all;
  std::vector<Point> images(k);
  std::iota(images.begin(), images.end(), Point{0});
  do
    all.push_back(Permutation::from_images(images));
  while (std::next_permutation(images.begin(), images.end()));

  DistributionReport rep;
  rep.n = 2;
  rep.k = k;
  rep.mode = TrialMode::Enumerate;
  std::size_t const m = all.size();
  rep.records.resize(m * m);
  parallel_for(m * m, jobs, [&](std::size_t i) {
    rep.records[i] = run_cyclic_trial({all[i / m], all[i % m]}, i);
  });
  detail::tally(rep);
  return rep;
}

inline DistributionReport run_distribution(TrialConfig const &cfg) {
  if (cfg.mode == TrialMode::Enumerate) {
    if (cfg.n != 2)
      throw SizeGuard("exact enumeration is limited to n = 2");
    return exact_enumeration_2(cfg.k, cfg.jobs);
  }
  return sample_cyclic_distribution(cfg);
}

inline std::string sample_csv_header() {
  return "trial,sign_vector,sign_rank,shape,predicted_order,verified_order,match,hypotheses_ok";
}

inline std::string sample_csv(DistributionReport const &rep) {
  std::ostringstream os;
  os << sample_csv_header() << '\n';
  for (auto const &t : rep.records)
    os << t.trial << ',' << t.sign_vector.str() << ',' << t.sign_rank << ','
       << to_string(t.shape) << ',' << t.predicted_order << ',' << t.verified_order << ','
       << (t.match ? "true" : "false") << ',' << (t.hypotheses_ok ? "true" : "false") << '\n';
  return os.str();
}

inline std::string summary_csv_header() { return "outcome,count,probability,reference,abs_dev"; }

inline std::string summary_csv(DistributionReport const &rep) {
  std::ostringstream os;
  os << summary_csv_header() << '\n';
  for (auto const &key : rep.outcomes()) {
    auto const it = rep.counts.find(key);
    std::uint64_t const c = it == rep.counts.end() ? 0 : it->second;
    double const p = rep.probability(key);
    os << key << ',' << c << ',' << format_double(p) << ',';
    if (auto r = rep.reference.find(key); r != rep.reference.end())
      os << format_double(r->second) << ',' << format_double(std::abs(p - r->second));
    else
      os << ',';
    os << '\n';
  }
  return os.str();
}

inline std::string distribution_text(DistributionReport const &rep) {
  std::ostringstream os;
  os << "mode: " << (rep.mode == TrialMode::Sample ? "sample" : "enumerate") << '\n'
     << "states: " << rep.n << '\n'
     << "letters: " << rep.k << '\n';
  if (rep.mode == TrialMode::Sample)
    os << "seed: " << rep.seed << '\n';
  os << "trials: " << rep.total << '\n';
  for (auto const &key : rep.outcomes()) {
    double const p = rep.probability(key);
    os << "outcome " << key << ": count " << (rep.counts.count(key) ? rep.counts.at(key) : 0)
       << ", probability " << format_double(p) << " +- "
       << format_double(rep.standard_error(key));
    if (auto r = rep.reference.find(key); r != rep.reference.end())
      os << ", reference " << format_double(r->second) << ", abs_dev "
         << format_double(std::abs(p - r->second));
    os << '\n';
  }
  for (auto const &n : rep.notes)
    os << "note: " << n << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Same-order probability

struct OrderStatsReport {
  std::size_t k = 0;
  std::uint64_t trials = 0;
  std::uint64_t same_order_count = 0;
  double estimate = 0.0; // k^2 * same_order_count / trials
  double standard_error = 0.0;
  double band_lo = conjectured_band_lo;
  double band_hi = conjectured_band_hi;
  std::optional<double> exact; // k^2 * P(o(s) = o(t)), for k <= exact_same_order_max_k
};

inline OrderStatsReport same_order_probability(std::size_t k, std::uint64_t trials,
                                               std::uint64_t seed, unsigned jobs = 1) {
  if (k == 0)
    throw PreconditionError("need k >= 1");
  if (trials == 0)
    throw PreconditionError("need at least one trial");
  std::vector<std::uint8_t> same(trials, 0);
  parallel_for(trials, jobs, [&](std::size_t i) {
    auto rng = trial_rng(seed, i);
    auto const s = random_permutation(k, rng);
    auto const t = random_permutation(k, rng);
    same[i] = order(s) == order(t);
  });
  OrderStatsReport r;
  r.k = k;
  r.trials = trials;
  r.same_order_count = static_cast<std::uint64_t>(std::count(same.begin(), same.end(), 1));
  double const k2 = static_cast<double>(k) * static_cast<double>(k);
  double const p = static_cast<double>(r.same_order_count) / static_cast<double>(trials);
  r.estimate = k2 * p;
  r.standard_error = k2 * std::sqrt(p * (1 - p) / static_cast<double>(trials));
  if (k <= exact_same_order_max_k)
    r.exact = same_order_exact(k);
  return r;
}

inline std::string order_stats_csv_header() {
  return "k,trials,same_order_count,k2_estimate,stderr,band_lo,band_hi";
}

inline std::string order_stats_csv(OrderStatsReport const &r) {
  std::ostringstream os;
  os << order_stats_csv_header() << '\n'
     << r.k << ',' << r.trials << ',' << r.same_order_count << ',' << format_double(r.estimate)
     << ',' << format_double(r.standard_error) << ',' << format_double(r.band_lo, 5) << ','
     << format_double(r.band_hi, 5) << '\n';
  return os.str();
}

inline std::string order_stats_text(OrderStatsReport const &r) {
  std::ostringstream os;
  os << "letters: " << r.k << '\n'
     << "trials: " << r.trials << '\n'
     << "same_order_count: " << r.same_order_count << '\n'
     << "k2_estimate: " << format_double(r.estimate) << " +- " << format_double(r.standard_error)
     << '\n'
     << "conjectured_band: [" << format_double(r.band_lo, 5) << ", "
     << format_double(r.band_hi, 5) << "]\n";
  if (r.exact)
    os << "exact_k2_probability: " << format_double(*r.exact) << '\n';
  os << "note: conjecture probe, not a theorem check\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Generation frequency against the truncated series

struct DixonReport {
  std::size_t k = 0;
  std::uint64_t trials = 0;
  std::uint64_t generating = 0;
  double frequency = 0.0;
  double reference = 0.0;
};

/// Share of random pairs generating S_k or A_k.
inline DixonReport dixon_frequency(std::size_t k, std::uint64_t trials, std::uint64_t seed,
                                   unsigned jobs = 1) {
  if (trials == 0)
    throw PreconditionError("need at least one trial");
  DixonReport r;
  r.k = k;
  r.trials = trials;
  r.reference = dixon_reference(k);
  std::vector<std::uint8_t> hit(trials, 0);
  parallel_for(trials, jobs, [&](std::size_t i) {
    auto rng = trial_rng(seed, i);
    auto const s = random_permutation(k, rng);
    auto const t = random_permutation(k, rng);
    hit[i] = recognize_sym_alt(PermGroup(k, {s, t})) != SymAlt::Other;
  });
  r.generating = static_cast<std::uint64_t>(std::count(hit.begin(), hit.end(), 1));
  r.frequency = static_cast<double>(r.generating) / static_cast<double>(trials);
  return r;
}

// ---------------------------------------------------------------------------
// Union of the two inverse pairs

struct InversePairOptions {
  bool force_even = false;          // replace odd draws by their product with (1,2)
  bool include_identity_pair = false; // trial 0 is (e, e)
};

struct InversePairReport {
  DistributionReport distribution; // keys "<parities>:<outcome>"
  std::uint64_t generating = 0;    // trials with <s,t> in {S_k, A_k}
  std::uint64_t generating_matches = 0;
  double conditional_match_rate() const {
    return generating == 0 ? 1.0
                           : static_cast<double>(generating_matches) /
                                 static_cast<double>(generating);
  }
};

inline InversePairReport inverse_pair_experiment(std::size_t k, std::uint64_t trials,
                                                 std::uint64_t seed, unsigned jobs = 1,
                                                 InversePairOptions opts = {}) {
  if (k < 5)
    throw PreconditionError("inverse_pair_experiment needs k >= 5");
  InversePairReport out;
  auto &rep = out.distribution;
  rep.n = 4;
  rep.k = k;
  rep.seed = seed;
  rep.records.resize(trials);
  std::vector<std::uint8_t> generating(trials, 0);
  Permutation const swap12 = Permutation::from_cycles(k, {{1, 2}});
  parallel_for(trials, jobs, [&](std::size_t i) {
    auto rng = trial_rng(seed, i);
    auto s = random_permutation(k, rng);
    auto t = random_permutation(k, rng);
    if (opts.force_even) {
      if (signature(s) == -1)
        s = s * swap12;
      if (signature(t) == -1)
        t = t * swap12;
    }
    if (opts.include_identity_pair && i == 0)
      s = t = Permutation(k);
    bool const gen = recognize_sym_alt(PermGroup(k, {s, t})) != SymAlt::Other;
    bool const odd = signature(s) == -1 || signature(t) == -1;
    auto const cr = inverse_pair_group(s, t);
    TrialRecord r;
    r.trial = i;
    r.sign_vector = cr.prediction->sign_vector;
    r.sign_rank = cr.prediction->sign_rank;
    r.shape = cr.prediction->shape_tag;
    r.predicted_order = cr.prediction->predicted_order;
    r.verified_order = cr.verified_order;
    r.match = cr.match;
    r.hypotheses_ok = gen;
    r.outcome = std::string(odd ? "some_odd:" : "all_even:") + outcome_key(cr);
    rep.records[i] = std::move(r);
    generating[i] = gen;
  });
  rep.total = trials;
  for (std::size_t i = 0; i < trials; ++i) {
    auto const &r = rep.records[i];
    ++rep.counts[r.outcome];
    if (generating[i]) {
      ++out.generating;
      out.generating_matches += r.match;
    }
  }
  rep.notes.push_back("conditional match rate (generating pairs): " +
                      format_double(out.conditional_match_rate()));
  return out;
}

} // namespace autgroup
