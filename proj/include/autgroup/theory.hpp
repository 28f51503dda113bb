#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "autgroup/bigint.hpp"
#include "autgroup/errors.hpp"
#include "autgroup/groups.hpp"
#include "autgroup/mealy.hpp"
#include "autgroup/perm.hpp"

/**
 * @file theory.hpp
 * @brief Classification of the groups generated by cyclic automata and
 * their relatives.
 *
 * A cyclic automaton with productions (s_0, ..., s_{n-1}) generates the
 * group circularly generated by that tuple. It always lies in
 * A_k^n x| E, where E is the elementary abelian 2-group spanned by the
 * rotations of the parity vector of the tuple. Generically it is all of
 * it. "Verified" orders below always come from a stabilizer chain of the
 * embedded group; predictions come from parity data only.
 */

namespace autgroup {

// ---------------------------------------------------------------------------
// GF(2)

namespace gf2 {

using Row = std::vector<std::uint64_t>;

inline Row pack(std::vector<std::uint8_t> const &bits) {
  Row r((bits.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i])
      r[i / 64] |= std::uint64_t{1} << (i % 64);
  return r;
}

/// Rank by elimination; rows may be consumed.
inline std::size_t rank(std::vector<Row> rows) {
  std::size_t r = 0;
  std::size_t const words = rows.empty() ? 0 : rows.front().size();
  for (std::size_t bit = 0; bit < words * 64 && r < rows.size(); ++bit) {
    std::size_t const w = bit / 64;
    std::uint64_t const mask = std::uint64_t{1} << (bit % 64);
    std::size_t pivot = r;
    while (pivot < rows.size() && !(rows[pivot][w] & mask))
      ++pivot;
    if (pivot == rows.size())
      continue;
    std::swap(rows[pivot], rows[r]);
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (i != r && (rows[i][w] & mask))
        for (std::size_t x = 0; x < words; ++x)
          rows[i][x] ^= rows[r][x];
    ++r;
  }
  return r;
}

} // namespace gf2

// ---------------------------------------------------------------------------
// Parity vectors

/// bits[i] = 1 iff entry i is odd.
struct SignVector {
  std::vector<std::uint8_t> bits;

  std::size_t size() const noexcept { return bits.size(); }
  std::string str() const {
    std::string s;
    for (auto b : bits)
      s += b ? '1' : '0';
    return s;
  }
  friend bool operator==(SignVector const &, SignVector const &) = default;
};

inline SignVector signature_tuple(std::vector<Permutation> const &perms) {
  SignVector v;
  for (auto const &p : perms)
    v.bits.push_back(signature(p) == -1 ? 1 : 0);
  return v;
}

/// All cyclic rotations of v repeated periodically to length `length`.
inline std::vector<gf2::Row> rotation_rows(SignVector const &v, std::size_t length) {
  std::vector<gf2::Row> rows;
  std::size_t const n = v.size();
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<std::uint8_t> bits(length);
    for (std::size_t t = 0; t < length; ++t)
      bits[t] = v.bits[(t + r) % n];
    rows.push_back(gf2::pack(bits));
  }
  return rows;
}

/// Dimension of the span of the rotations of v.
inline std::size_t circulant_rank(SignVector const &v) {
  if (v.size() == 0)
    return 0;
  return gf2::rank(rotation_rows(v, v.size()));
}

inline BigInt sign_group_order(SignVector const &v) {
  return pow_big(2, static_cast<unsigned>(circulant_rank(v)));
}

// ---------------------------------------------------------------------------
// Predictions

enum class ShapeTag { SymTimesSym, AltSemidirect, AltTimesAlt, GeneralSemidirect };

inline char const *to_string(ShapeTag s) {
  switch (s) {
  case ShapeTag::SymTimesSym: return "SymTimesSym";
  case ShapeTag::AltSemidirect: return "AltSemidirect";
  case ShapeTag::AltTimesAlt: return "AltTimesAlt";
  case ShapeTag::GeneralSemidirect: return "GeneralSemidirect";
  }
  return "?";
}

/// Shape of A_k^length x| E for a parity span E of the given rank. A rank-1
/// rotation-closed span is necessarily {0, 11...1}.
inline ShapeTag shape_for_rank(std::size_t rank, std::size_t length) {
  if (rank == 0)
    return ShapeTag::AltTimesAlt;
  if (rank == length)
    return ShapeTag::SymTimesSym;
  if (rank == 1)
    return ShapeTag::AltSemidirect;
  return ShapeTag::GeneralSemidirect;
}

struct GroupPrediction {
  std::size_t k = 0;
  std::size_t period = 0; // number of coordinates
  SignVector sign_vector;
  std::size_t sign_rank = 0;
  BigInt predicted_order;
  ShapeTag shape_tag = ShapeTag::GeneralSemidirect;
  bool hypotheses_ok = false;
  std::vector<std::string> reasons; // failed hypotheses, or why it is heuristic
};

/// True iff the tuple of orders is not a repetition of a shorter tuple.
inline bool orders_tuple_primitive(std::vector<Permutation> const &perms) {
  std::size_t const n = perms.size();
  std::vector<BigInt> orders;
  for (auto const &p : perms)
    orders.push_back(order(p));
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d)
      continue;
    bool repeats = true;
    for (std::size_t i = d; i < n && repeats; ++i)
      repeats = orders[i] == orders[i - d];
    if (repeats)
      return false;
  }
  return true;
}

inline SymAlt recognize_generated(std::vector<Permutation> const &perms) {
  return recognize_sym_alt(PermGroup(perms.front().degree(), perms));
}

/// A_k^n x| <sgn(perms)>_c with its order; hypotheses are those under which
/// the generated group is known to be exactly this.
inline GroupPrediction predicted_group_cyclic(std::vector<Permutation> const &perms,
                                              std::optional<SymAlt> generated = {}) {
  if (perms.empty())
    throw PreconditionError("empty tuple");
  GroupPrediction g;
  g.k = perms.front().degree();
  g.period = perms.size();
  g.sign_vector = signature_tuple(perms);
  g.sign_rank = circulant_rank(g.sign_vector);
  g.predicted_order = pow_big(alternating_order(static_cast<unsigned>(g.k)),
                              static_cast<unsigned>(g.period)) *
                      pow_big(2, static_cast<unsigned>(g.sign_rank));
  g.shape_tag = shape_for_rank(g.sign_rank, g.period);

  if (!orders_tuple_primitive(perms))
    g.reasons.push_back("tuple of orders is periodic");
  SymAlt const sa = generated ? *generated : recognize_generated(perms);
  if (sa == SymAlt::Other)
    g.reasons.push_back("productions generate neither S_k nor A_k");
  if (g.k <= 5)
    g.reasons.push_back("k <= 5");
  g.hypotheses_ok = g.reasons.empty();
  return g;
}

// ---------------------------------------------------------------------------
// The circularly generated group as a concrete permutation group

/// <rotations of perms> on n blocks of k points, with its stabilizer chain.
struct CirculantGroup {
  std::vector<Permutation> perms;
  std::size_t k = 0;
  std::size_t n = 0;
  PermGroup group;
  StabilizerChain chain{1};

  explicit CirculantGroup(std::vector<Permutation> tuple)
      : perms(std::move(tuple)), k(perms.at(0).degree()), n(perms.size()) {
    std::vector<Permutation> gens;
    for (std::size_t r = 0; r < n; ++r)
      gens.push_back(tuple_to_permutation(rotated(perms, r)));
    group = PermGroup(n * k, std::move(gens));
    chain = StabilizerChain::build(group);
  }

  static std::vector<Permutation> rotated(std::vector<Permutation> const &t,
                                          std::size_t r) {
    std::vector<Permutation> out;
    for (std::size_t i = 0; i < t.size(); ++i)
      out.push_back(t[(i + r) % t.size()]);
    return out;
  }

  /// The element with z at coordinate c and the identity elsewhere.
  Permutation single(std::size_t c, Permutation const &z) const {
    std::vector<Permutation> t(n, Permutation(k));
    t[c] = z;
    return tuple_to_permutation(t);
  }

  bool contains_tuple(std::vector<Permutation> const &t) const {
    return chain.contains(tuple_to_permutation(t));
  }
};

// ---------------------------------------------------------------------------
// Coprime orders

struct Certificate {
  std::string label;
  Permutation element; // on 2k points
};

inline BigInt modular_inverse(BigInt a, BigInt const &m) {
  if (m == 1)
    return 0;
  BigInt t = 0, new_t = 1, r = m, new_r = a % m;
  while (new_r != 0) {
    BigInt const q = r / new_r;
    t = t - q * new_t;
    std::swap(t, new_t);
    r = r - q * new_r;
    std::swap(r, new_r);
  }
  if (t < 0)
    t += m;
  return t;
}

/// When gcd(o(s), o(t)) = 1: powers of (s,t) and (t,s) isolating each
/// coordinate, every one of them membership-checked.
inline std::optional<std::vector<Certificate>> coprime_split(Permutation const &sigma,
                                                             Permutation const &tau) {
  BigInt const os = order(sigma), ot = order(tau);
  if (boost::multiprecision::gcd(os, ot) != 1)
    return std::nullopt;
  CirculantGroup const cg({sigma, tau});
  auto const &g0 = cg.group.generators[0]; // (s, t)
  auto const &g1 = cg.group.generators[1]; // (t, s)
  BigInt const u = modular_inverse(os, ot); // u o(s) = 1 mod o(t)
  BigInt const v = modular_inverse(ot, os); // v o(t) = 1 mod o(s)
  std::vector<Certificate> out{
      {"(s,t)^o(s)", power(g0, os)},
      {"(e,t)", power(g0, u * os)},
      {"(e,s)", power(g1, v * ot)},
      {"(s,e)", power(g0, v * ot)},
      {"(t,e)", power(g1, u * os)},
  };
  std::size_t const k = sigma.degree();
  Permutation const e(k);
  std::vector<std::vector<Permutation>> const expected{
      {e, power(tau, os)}, {e, tau}, {e, sigma}, {sigma, e}, {tau, e}};
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (permutation_to_tuple(out[i].element, k) != expected[i])
      throw VerificationError("coprime certificate " + out[i].label + " has wrong value");
    if (!cg.chain.contains(out[i].element))
      throw VerificationError("coprime certificate " + out[i].label + " failed membership");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Prime-cycle witnesses

struct Witness {
  std::size_t coordinate = 0;
  unsigned prime = 0;
  Permutation cycle;   // degree k, a single cycle of length `prime`
  Permutation element; // on n*k points: `cycle` at `coordinate`, e elsewhere
  bool jordan_applicable = false; // prime <= k - 3
  std::string route;              // "constructive" or "kernel"
};

namespace detail {

inline std::vector<unsigned> prime_factors(BigInt x) {
  std::vector<unsigned> out;
  for (unsigned p = 2; BigInt(p) * p <= x; ++p) {
    if (x % p == 0) {
      out.push_back(p);
      while (x % p == 0)
        x /= p;
    }
  }
  if (x > 1)
    out.push_back(static_cast<unsigned>(x));
  return out;
}

inline unsigned valuation(BigInt x, unsigned p) {
  unsigned v = 0;
  while (x != 0 && x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

inline bool is_power_of(BigInt x, BigInt const &base) {
  if (base < 2 || x < base)
    return false;
  while (x % base == 0)
    x /= base;
  return x == 1;
}

inline bool is_prime(std::size_t x) {
  if (x < 2)
    return false;
  for (std::size_t d = 2; d * d <= x; ++d)
    if (x % d == 0)
      return false;
  return true;
}

inline Permutation transpositions_from(std::size_t k,
                                       std::vector<std::pair<Point, Point>> const &pairs) {
  std::vector<std::vector<Point>> cycles;
  for (auto [a, b] : pairs)
    cycles.push_back({a, b});
  return Permutation::from_cycles(k, cycles);
}

/// Turns x, a product of l > 1 disjoint q-cycles, into a single prime
/// cycle by multiplying with conjugates of x. `member(z)` decides whether z
/// sits at the working coordinate with the identity elsewhere; every
/// intermediate value is checked with it. Conjugators are forced even when
/// `even_conjugators` is set.
inline std::optional<std::pair<Permutation, unsigned>>
reduce_to_prime_cycle(Permutation x, unsigned q, bool even_conjugators,
                      std::function<bool(Permutation const &)> const &member) {
  std::size_t const k = x.degree();
  std::optional<int> const parity =
      even_conjugators ? std::optional<int>(1) : std::nullopt;
  auto require = [&](Permutation const &z) {
    if (!member(z))
      throw VerificationError("conjugate " + format_cycles(z) +
                              " expected in the group is missing");
  };
  auto require_conjugate = [&](Permutation const &from, Permutation const &to) {
    (void)conjugator_between(from, to, parity);
    require(to);
  };

  auto cycles = cycle_decomposition(x).cycles;
  if (cycles.size() == 1)
    return std::pair{x, q};

  if (q != 2) {
    // x' = c_1 * prod_{i>=2} c_i^-1 is conjugate to x, and x * x' = c_1^2.
    Permutation alt = from_decomposition(k, CycleDecomposition{{cycles[0]}, false});
    for (std::size_t i = 1; i < cycles.size(); ++i) {
      auto rev = cycles[i];
      std::reverse(rev.begin(), rev.end());
      alt = alt * from_decomposition(k, CycleDecomposition{{rev}, false});
    }
    require_conjugate(x, alt);
    Permutation z = x * alt;
    require(z);
    return std::pair{z, q};
  }

  std::size_t l = cycles.size();
  if (2 * l == k) {
    if (k <= 4)
      return std::nullopt;
    // (1,2)(3,4)... times (1,4)(2,3)(5,6)... is (1,3)(2,4).
    std::vector<std::pair<Point, Point>> a, b{{1, 4}, {2, 3}};
    for (std::size_t i = 0; i < l; ++i)
      a.emplace_back(2 * i + 1, 2 * i + 2);
    for (std::size_t i = 2; i < l; ++i)
      b.emplace_back(2 * i + 1, 2 * i + 2);
    auto const ta = transpositions_from(k, a), tb = transpositions_from(k, b);
    require_conjugate(x, ta);
    require_conjugate(x, tb);
    x = ta * tb;
    require(x);
    l = 2;
  }
  // (1,2)(3,4)... times (1,k)(3,4)... is the 3-cycle (1,2,k).
  std::vector<std::pair<Point, Point>> a, b{{1, static_cast<Point>(k)}};
  for (std::size_t i = 0; i < l; ++i)
    a.emplace_back(2 * i + 1, 2 * i + 2);
  for (std::size_t i = 1; i < l; ++i)
    b.emplace_back(2 * i + 1, 2 * i + 2);
  auto const ta = transpositions_from(k, a), tb = transpositions_from(k, b);
  require_conjugate(x, ta);
  require_conjugate(x, tb);
  Permutation z = ta * tb;
  require(z);
  return std::pair{z, 3u};
}

/// Order patterns under which every prime of the construction exceeds k-3.
inline bool is_exceptional_pattern(BigInt const &a, BigInt const &b, std::size_t k) {
  if (!is_prime(k) || k <= 5)
    return false;
  BigInt const k0(k), k1(k - 1), k2(k - 2);
  auto one_way = [&](BigInt const &x, BigInt const &y) {
    return (is_power_of(x, k2) && is_power_of(y, k1)) ||
           (is_power_of(x, k1) && is_power_of(y, k0)) ||
           (is_power_of(x, k2) && is_power_of(y, k0)) ||
           (x == 1 && (is_power_of(y, k2) || is_power_of(y, k1) || is_power_of(y, k0)));
  };
  return one_way(a, b) || one_way(b, a);
}

inline Witness make_witness(CirculantGroup const &cg, std::size_t c, Permutation cycle,
                            unsigned prime, std::string route) {
  Witness w;
  w.coordinate = c;
  w.prime = prime;
  w.element = cg.single(c, cycle);
  w.cycle = std::move(cycle);
  w.jordan_applicable = prime + 3 <= cg.k;
  w.route = std::move(route);
  std::size_t len = 0;
  if (!is_single_cycle(w.cycle, &len) || len != prime || !is_prime(len))
    throw VerificationError("witness is not a single prime cycle");
  if (!cg.chain.contains(w.element))
    throw VerificationError("witness failed membership");
  return w;
}

} // namespace detail

/// A prime cycle isolated in one coordinate, read off the kernel of the
/// projection that forgets `coordinate`. Used when the construction is not
/// available.
inline Witness kernel_witness(CirculantGroup const &cg, std::size_t coordinate) {
  std::size_t const k = cg.k, n = cg.n;
  if (n < 2)
    throw WitnessNotFound("kernel witness needs at least two coordinates");
  // Move `coordinate` to the last block so the kernel fixes blocks 0..n-2.
  std::vector<Permutation> gens;
  for (auto const &g : cg.group.generators) {
    auto t = permutation_to_tuple(g, k);
    std::rotate(t.begin(), t.begin() + static_cast<long>((coordinate + 1) % n), t.end());
    gens.push_back(tuple_to_permutation(t));
  }
  auto const kernel = projection_kernel(PermGroup(n * k, gens), k, n - 1);
  std::vector<Permutation> restricted;
  for (auto const &kg : kernel.generators)
    restricted.push_back(block_component(kg, k, n - 1));
  auto const hchain = StabilizerChain::build(PermGroup(k, restricted));
  auto member = [&](Permutation const &z) { return hchain.contains(z); };

  std::vector<std::pair<Permutation, unsigned>> candidates;
  if (k >= 3)
    candidates.emplace_back(Permutation::from_cycles(k, {{1, 2, 3}}), 3u);
  if (k >= 2)
    candidates.emplace_back(Permutation::from_cycles(k, {{1, 2}}), 2u);
  for (auto const &[z, p] : candidates)
    if (member(z))
      return detail::make_witness(cg, coordinate, z, p, "kernel");

  for (auto const &g : restricted) {
    BigInt const o = order(g);
    for (unsigned q : detail::prime_factors(o)) {
      auto const x = power(g, o / q);
      std::optional<std::pair<Permutation, unsigned>> r;
      try {
        r = detail::reduce_to_prime_cycle(x, q, false, member);
      } catch (VerificationError const &) {
        r.reset(); // a conjugate outside the kernel; try the next generator
      }
      if (r)
        return detail::make_witness(cg, coordinate, r->first, r->second, "kernel");
    }
  }
  throw WitnessNotFound("no prime cycle found in the projection kernel");
}

/// (e, pi) or (pi, e) with pi a prime cycle in <(s,t)>_c, following the
/// construction for different orders: power (s,t) so that one coordinate
/// has prime order p and the other is trivial, then merge the p-cycles.
/// Coordinate 1 (primes of o(t)) is tried before coordinate 0, primes in
/// increasing order; the first witness with p <= k - 3 is returned,
/// otherwise the first witness found. Throws EdgeCase when no construction
/// reaches p <= k - 3 and the orders follow one of the exceptional
/// patterns; callers then use kernel_witness.
inline Witness witness_prime_cycle_2(CirculantGroup const &cg, SymAlt generated) {
  if (cg.n != 2)
    throw PreconditionError("witness_prime_cycle_2 needs a pair");
  auto const &sigma = cg.perms[0];
  auto const &tau = cg.perms[1];
  BigInt const os = order(sigma), ot = order(tau);
  if (os == ot)
    throw SameOrders("o(s) = o(t) = " + os.str());
  if (generated == SymAlt::Other)
    throw HypothesisFailed("<s,t> is neither S_k nor A_k");
  BigInt const d = boost::multiprecision::gcd(os, ot);
  std::size_t const k = cg.k;
  Permutation const g0 = cg.group.generators[0]; // (s, t)

  std::optional<Witness> first;
  for (std::size_t c : {std::size_t{1}, std::size_t{0}}) {
    BigInt const target_order = (c == 1 ? ot : os) / d;
    for (unsigned p : detail::prime_factors(target_order)) {
      unsigned const a = detail::valuation(target_order, p);
      BigInt const shift = d * pow_big(p, a - 1);
      auto const hat = power(g0, shift);
      auto const hat_t = permutation_to_tuple(hat, k);
      BigInt const exponent = order(hat_t[0]) * order(hat_t[1]) / p;
      auto const check = permutation_to_tuple(power(hat, exponent), k);
      if (!check[1 - c].is_identity() || order(check[c]) != p)
        throw VerificationError("powering did not isolate a coordinate of order p");
      if (!cg.chain.contains(tuple_to_permutation(check)))
        throw VerificationError("powered element failed membership");
      auto member = [&](Permutation const &z) { return cg.chain.contains(cg.single(c, z)); };
      auto reduced = detail::reduce_to_prime_cycle(check[c], p,
                                                   generated == SymAlt::Alternating, member);
      if (!reduced)
        continue;
      auto w = detail::make_witness(cg, c, reduced->first, reduced->second, "constructive");
      if (w.jordan_applicable)
        return w;
      if (!first)
        first = std::move(w);
    }
  }
  if (detail::is_exceptional_pattern(os / d, ot / d, k))
    throw EdgeCase("orders (" + os.str() + ", " + ot.str() +
                   ") follow an exceptional pattern");
  if (!first)
    throw WitnessNotFound("construction produced no witness");
  return *first;
}

inline Witness witness_prime_cycle_2(Permutation const &sigma, Permutation const &tau) {
  if (sigma.degree() != tau.degree())
    throw DegreeMismatch("pair of different degrees");
  if (order(sigma) == order(tau))
    throw SameOrders("o(s) = o(t)");
  auto const generated = recognize_generated({sigma, tau});
  CirculantGroup const cg({sigma, tau});
  return witness_prime_cycle_2(cg, generated);
}

struct WitnessOptions {
  std::size_t step_budget = 200;
};

/// A tuple with a single prime cycle in one coordinate and the identity
/// elsewhere. Powers a generator down to a tuple whose nontrivial entries
/// have prime order, then shrinks its support with commutators against
/// rotated conjugates (the support of [x, y] lies in supp x and supp y),
/// and finally merges cycles inside the surviving coordinate. Falls back to
/// kernel_witness on the last coordinate if the support gets stuck or the
/// step budget runs out.
inline Witness witness_prime_cycle_n(CirculantGroup const &cg, SymAlt generated,
                                     WitnessOptions opts = {}) {
  std::size_t const n = cg.n, k = cg.k;
  if (!orders_tuple_primitive(cg.perms))
    throw NotPrimitiveTuple("tuple of orders is periodic");
  if (generated == SymAlt::Other)
    throw HypothesisFailed("productions generate neither S_k nor A_k");
  if (n == 2)
    try {
      return witness_prime_cycle_2(cg, generated);
    } catch (EdgeCase const &) {
      return kernel_witness(cg, 1);
    }

  using Tuple = std::vector<Permutation>;
  auto support = [](Tuple const &t) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (!t[i].is_identity())
        s.push_back(i);
    return s;
  };
  auto mul = [](Tuple const &a, Tuple const &b) {
    Tuple r;
    for (std::size_t i = 0; i < a.size(); ++i)
      r.push_back(a[i] * b[i]);
    return r;
  };
  auto inv = [](Tuple const &a) {
    Tuple r;
    for (auto const &x : a)
      r.push_back(inverse(x));
    return r;
  };
  auto conj = [&](Tuple const &a, Tuple const &h) { return mul(mul(inv(h), a), h); };
  auto tuple_order = [](Tuple const &a) {
    BigInt l = 1;
    for (auto const &x : a) {
      BigInt const o = order(x);
      l = l / boost::multiprecision::gcd(l, o) * o;
    }
    return l;
  };
  auto tuple_power = [](Tuple const &a, BigInt const &e) {
    Tuple r;
    for (auto const &x : a)
      r.push_back(power(x, e));
    return r;
  };

  // A power of the tuple with entries of order p or 1 on a proper support.
  Tuple gamma;
  BigInt const lcm_orders = tuple_order(cg.perms);
  for (unsigned p : detail::prime_factors(lcm_orders)) {
    auto candidate = tuple_power(cg.perms, lcm_orders / p);
    auto const s = support(candidate);
    if (!s.empty() && s.size() < n) {
      gamma = std::move(candidate);
      break;
    }
  }

  // Conjugators: the generators and their pairwise products.
  std::vector<Tuple> conjugators{Tuple(n, Permutation(k))};
  for (std::size_t r = 0; r < n; ++r)
    conjugators.push_back(CirculantGroup::rotated(cg.perms, r));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t r2 = 0; r2 < n; ++r2)
      conjugators.push_back(mul(CirculantGroup::rotated(cg.perms, r),
                                CirculantGroup::rotated(cg.perms, r2)));

  std::size_t steps = 0;
  while (!gamma.empty() && support(gamma).size() > 1 && steps < opts.step_budget) {
    auto const s = support(gamma);
    std::vector<bool> in_s(n, false);
    for (auto i : s)
      in_s[i] = true;
    bool progressed = false;
    for (std::size_t r = 1; r < n && !progressed; ++r) {
      std::size_t overlap = 0;
      for (auto i : s)
        overlap += in_s[(i + r) % n];
      if (overlap == 0 || overlap == s.size())
        continue;
      // rotated(gamma, r) at coordinate i is gamma at i + r.
      auto const delta = CirculantGroup::rotated(gamma, r);
      for (auto const &h : conjugators) {
        ++steps;
        auto const d2 = conj(delta, h);
        auto const comm = mul(mul(inv(gamma), inv(d2)), mul(gamma, d2));
        if (support(comm).empty())
          continue;
        BigInt const o = tuple_order(comm);
        unsigned const q = detail::prime_factors(o).front();
        gamma = tuple_power(comm, o / q);
        if (!cg.contains_tuple(gamma))
          throw VerificationError("reduced tuple failed membership");
        progressed = true;
        break;
      }
    }
    if (!progressed)
      break;
  }

  auto const s = gamma.empty() ? std::vector<std::size_t>{} : support(gamma);
  if (s.size() == 1) {
    std::size_t const c = s.front();
    BigInt const o = order(gamma[c]);
    unsigned const q = static_cast<unsigned>(o);
    auto member = [&](Permutation const &z) { return cg.chain.contains(cg.single(c, z)); };
    auto reduced = detail::reduce_to_prime_cycle(gamma[c], q,
                                                 generated == SymAlt::Alternating, member);
    if (reduced)
      return detail::make_witness(cg, c, reduced->first, reduced->second, "constructive");
  }
  return kernel_witness(cg, n - 1);
}

inline Witness witness_prime_cycle_n(std::vector<Permutation> const &perms,
                                     WitnessOptions opts = {}) {
  if (perms.empty())
    throw PreconditionError("empty tuple");
  if (!orders_tuple_primitive(perms))
    throw NotPrimitiveTuple("tuple of orders is periodic");
  auto const generated = recognize_generated(perms);
  CirculantGroup const cg(perms);
  return witness_prime_cycle_n(cg, generated, opts);
}

// ---------------------------------------------------------------------------
// Disjoint unions of cycles

/// Inclusion-exclusion over nonempty subsets of gcds of the sizes.
inline long long union_exponent(std::vector<std::size_t> const &sizes) {
  if (sizes.empty())
    throw PreconditionError("union_exponent needs at least one size");
  if (sizes.size() > 24)
    throw PreconditionError("too many components for inclusion-exclusion");
  long long u = 0;
  std::size_t const m = sizes.size();
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << m); ++mask) {
    std::size_t g = 0;
    int bits = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1) {
        g = std::gcd(g, sizes[i]);
        ++bits;
      }
    u += (bits % 2 ? 1 : -1) * static_cast<long long>(g);
  }
  return u;
}

/// Rank of all rotations of every component's parity vector, each repeated
/// to the lcm of the component sizes.
inline std::size_t union_sign_rank(std::vector<SignVector> const &components) {
  std::size_t length = 1;
  for (auto const &v : components)
    length = std::lcm(length, v.size());
  std::vector<gf2::Row> rows;
  for (auto const &v : components)
    for (auto &r : rotation_rows(v, length))
      rows.push_back(std::move(r));
  return gf2::rank(std::move(rows));
}

/// Productions of each cycle of a letter-independent automaton whose states
/// all lie on cycles, each listed along the cycle from its least state.
inline std::vector<std::vector<Permutation>> cycle_components(MealyAutomaton const &a) {
  FunctionalGraph const fg(a);
  std::vector<bool> seen(a.states(), false);
  std::vector<std::vector<Permutation>> out;
  for (State q = 0; q < a.states(); ++q) {
    if (seen[q])
      continue;
    if (!fg.on_cycle[q])
      throw PreconditionError("state " + std::to_string(q) + " is not on a cycle");
    std::vector<Permutation> comp;
    State x = q;
    do {
      seen[x] = true;
      comp.push_back(a.production(x));
      x = fg.next[x];
    } while (x != q);
    out.push_back(std::move(comp));
  }
  return out;
}

inline std::size_t union_sign_rank(std::vector<MealyAutomaton> const &components) {
  std::vector<SignVector> vs;
  for (auto const &c : components) {
    if (c.letters() != components.front().letters())
      throw AlphabetMismatch("components over different alphabets");
    if (!std::holds_alternative<Cyclic>(classify_structure(c)))
      throw PreconditionError("union_sign_rank needs cyclic components");
    vs.push_back(signature_tuple(cycle_components(c).front()));
  }
  return union_sign_rank(vs);
}

// ---------------------------------------------------------------------------
// Classification

struct ClassificationReport {
  StructureClass structure;
  std::size_t states = 0;
  std::size_t letters = 0;
  std::optional<GroupPrediction> prediction;
  BigInt verified_order;
  bool match = false;
  std::optional<Witness> witness;
  std::vector<std::string> notes;
};

namespace detail {

inline void attach_cyclic_witness(ClassificationReport &rep, CirculantGroup const &cg,
                                  SymAlt generated) {
  if (cg.n == 2) {
    try {
      rep.witness = witness_prime_cycle_2(cg, generated);
    } catch (EdgeCase const &e) {
      rep.notes.push_back(std::string("edge case, kernel fallback: ") + e.what());
      rep.witness = kernel_witness(cg, 1);
    }
  } else if (cg.n > 2) {
    rep.witness = witness_prime_cycle_n(cg, generated);
  }
}

/// Path or tree into a looping root r. With m coordinates, every element has
/// a power of rho_r in the last one; the map to (parities of coordinates
/// 0..m-2, last coordinate) has kernel inside A_k^{m-1} x {e}, and equals it
/// once A_k^{m-1} x {e} is contained. Hence |G| divides
/// |A_k|^{m-1} * o(rho_r) * 2^r with r computed from the generator images,
/// with equality under containment.
inline GroupPrediction predict_rooted(MealyAutomaton const &a, EmbeddedGroup const &eg,
                                      StabilizerChain const &chain) {
  FunctionalGraph const fg(a);
  State root = 0;
  while (!fg.on_cycle[root])
    ++root;
  std::size_t const k = a.letters(), m = eg.blocks;
  auto const emb = faithful_embedding(a);
  BigInt const o = order(a.production(root));

  std::vector<std::vector<std::uint8_t>> images;
  for (auto const &t : emb.tuples) {
    std::vector<std::uint8_t> bits;
    for (std::size_t i = 0; i + 1 < m; ++i)
      bits.push_back(signature(t[i]) == -1);
    images.push_back(std::move(bits));
  }
  std::vector<gf2::Row> rows;
  for (auto const &bits : images) {
    auto b = bits;
    if (o % 2 == 0)
      for (std::size_t i = 0; i < b.size(); ++i)
        b[i] ^= images.front()[i];
    rows.push_back(gf2::pack(b));
  }
  std::size_t const r = m > 1 ? gf2::rank(rows) : 0;

  GroupPrediction g;
  g.k = k;
  g.period = m;
  std::vector<Permutation> prods;
  for (State q = 0; q < a.states(); ++q)
    prods.push_back(a.production(q));
  g.sign_vector = signature_tuple(prods);
  g.sign_rank = r;
  g.predicted_order = pow_big(alternating_order(static_cast<unsigned>(k)),
                              static_cast<unsigned>(m - 1)) *
                      o * pow_big(2, static_cast<unsigned>(r));
  g.shape_tag = ShapeTag::GeneralSemidirect;

  // Containment of A_k in each coordinate but the last, via 3-cycles (1,2,j).
  for (std::size_t t = 0; t + 1 < m; ++t) {
    for (Point j = 3; j <= k; ++j) {
      std::vector<Permutation> tuple(m, Permutation(k));
      tuple[t] = Permutation::from_cycles(k, {{1, 2, j}});
      if (!chain.contains(tuple_to_permutation(tuple))) {
        g.reasons.push_back("A_k not contained in coordinate " + std::to_string(t));
        break;
      }
    }
  }
  g.hypotheses_ok = g.reasons.empty();
  return g;
}

} // namespace detail

/// Structure, prediction where one exists, and the order from a stabilizer
/// chain of the embedded group.
inline ClassificationReport classify(MealyAutomaton const &a) {
  require_group_semantics(a);
  ClassificationReport rep;
  rep.structure = classify_structure(a);
  rep.states = a.states();
  rep.letters = a.letters();

  if (std::holds_alternative<Cyclic>(rep.structure)) {
    auto const perms = cycle_components(a).front();
    auto const generated = recognize_generated(perms);
    CirculantGroup const cg(perms);
    rep.verified_order = cg.chain.order();
    rep.prediction = predicted_group_cyclic(perms, generated);
    rep.match = rep.verified_order == rep.prediction->predicted_order;
    if (rep.prediction->hypotheses_ok)
      detail::attach_cyclic_witness(rep, cg, generated);
    return rep;
  }

  auto const eg = generated_group(a);
  auto const chain = build_chain(eg.group);
  rep.verified_order = chain.order();

  if (auto const *dc = std::get_if<DisjointCycles>(&rep.structure)) {
    auto const comps = cycle_components(a);
    std::vector<SignVector> vs;
    GroupPrediction g;
    g.k = a.letters();
    g.period = eg.blocks;
    for (auto const &c : comps) {
      vs.push_back(signature_tuple(c));
      for (auto b : vs.back().bits)
        g.sign_vector.bits.push_back(b);
    }
    g.sign_rank = union_sign_rank(vs);
    g.predicted_order = pow_big(alternating_order(static_cast<unsigned>(g.k)),
                                static_cast<unsigned>(g.period)) *
                        pow_big(2, static_cast<unsigned>(g.sign_rank));
    g.shape_tag = shape_for_rank(g.sign_rank, g.period);
    g.reasons.push_back("upper bound for unions of cycles, not an exactness theorem");
    rep.notes.push_back("union_exponent " + std::to_string(union_exponent(dc->sizes)));
    rep.prediction = std::move(g);
    rep.match = rep.verified_order == rep.prediction->predicted_order;
    return rep;
  }

  if (std::holds_alternative<Path>(rep.structure) ||
      std::holds_alternative<ConvergingTree>(rep.structure)) {
    rep.prediction = detail::predict_rooted(a, eg, chain);
    if (rep.prediction->predicted_order % rep.verified_order != 0)
      throw VerificationError("verified order does not divide the rooted bound");
    rep.match = rep.prediction->hypotheses_ok;
    return rep;
  }

  rep.notes.push_back("no prediction for this structure");
  return rep;
}

/// <(s, s^-1), (t, t^-1)>_c as the group of a union of two 2-cycles.
inline ClassificationReport inverse_pair_group(Permutation const &sigma,
                                               Permutation const &tau) {
  if (sigma.degree() < 5)
    throw PreconditionError("inverse_pair_group needs k >= 5");
  if (sigma.degree() != tau.degree())
    throw DegreeMismatch("pair of different degrees");
  auto const a = MealyAutomaton::disjoint_union(
      {MealyAutomaton::cyclic({sigma, inverse(sigma)}),
       MealyAutomaton::cyclic({tau, inverse(tau)})});
  return classify(a);
}

// ---------------------------------------------------------------------------
// Report serialization

inline std::string report_csv_header() {
  return "structure,n,k,sign_vector,sign_rank,predicted_order,verified_order,match,"
         "witness_prime,hypotheses_ok";
}

inline std::string report_csv_row(ClassificationReport const &r) {
  std::ostringstream os;
  os << to_string(r.structure) << ',' << r.states << ',' << r.letters << ',';
  if (r.prediction)
    os << r.prediction->sign_vector.str() << ',' << r.prediction->sign_rank << ','
       << r.prediction->predicted_order;
  else
    os << ",,";
  os << ',' << r.verified_order << ',' << (r.match ? "true" : "false") << ',';
  if (r.witness)
    os << r.witness->prime;
  os << ',';
  if (r.prediction)
    os << (r.prediction->hypotheses_ok ? "true" : "false");
  return os.str();
}

/// One "key: value" per line.
inline std::string report_text(ClassificationReport const &r) {
  std::ostringstream os;
  os << "structure: " << to_string(r.structure) << '\n'
     << "states: " << r.states << '\n'
     << "letters: " << r.letters << '\n';
  if (r.prediction) {
    auto const &p = *r.prediction;
    os << "sign_vector: " << p.sign_vector.str() << '\n'
       << "sign_rank: " << p.sign_rank << '\n'
       << "shape: " << to_string(p.shape_tag) << '\n'
       << "predicted_order: " << p.predicted_order << '\n'
       << "hypotheses_ok: " << (p.hypotheses_ok ? "true" : "false") << '\n';
    for (auto const &reason : p.reasons)
      os << "hypothesis_note: " << reason << '\n';
  }
  os << "verified_order: " << r.verified_order << '\n'
     << "match: " << (r.match ? "true" : "false") << '\n';
  if (r.witness) {
    os << "witness_coordinate: " << r.witness->coordinate << '\n'
       << "witness_prime: " << r.witness->prime << '\n'
       << "witness_cycle: " << format_cycles(r.witness->cycle) << '\n'
       << "witness_route: " << r.witness->route << '\n';
  }
  for (auto const &n : r.notes)
    os << "note: " << n << '\n';
  return os.str();
}

} // namespace autgroup
