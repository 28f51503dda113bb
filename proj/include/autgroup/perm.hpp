#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "autgroup/bigint.hpp"
#include "autgroup/errors.hpp"
#include "autgroup/rng.hpp"

/**
 * @file perm.hpp
 * @brief Permutations of {0..k-1} stored as image arrays.
 *
 * Products act left to right: (p * q)(x) = q(p(x)). Conjugation is
 * p^r = r^-1 * p * r, i.e. the relabelling of every cycle of p through r.
 * All text I/O uses 1-based points; everything else is 0-based.
 */

namespace autgroup {

using Point = std::uint32_t;

class Permutation {
public:
  Permutation() = default;

  /// Identity of the given degree.
  explicit Permutation(std::size_t degree) : images_(degree) {
    std::iota(images_.begin(), images_.end(), Point{0});
  }

  /// Validates that `images` is a bijection of {0..size-1}.
  static Permutation from_images(std::vector<Point> images) {
    std::vector<bool> seen(images.size(), false);
    for (Point x : images) {
      if (x >= images.size() || seen[x])
        throw PreconditionError("image array is not a bijection");
      seen[x] = true;
    }
    Permutation p;
    p.images_ = std::move(images);
    return p;
  }

  /// Disjoint cycles in 1-based points, e.g. from_cycles(6, {{1,6,4,3},{2,5}}).
  static Permutation
  from_cycles(std::size_t degree,
              std::vector<std::vector<Point>> const &cycles) {
    Permutation p(degree);
    std::vector<bool> used(degree, false);
    for (auto const &cycle : cycles) {
      for (Point x : cycle) {
        if (x < 1 || x > degree)
          throw MalformedCycle("point " + std::to_string(x) +
                               " outside 1.." + std::to_string(degree));
        if (used[x - 1])
          throw MalformedCycle("point " + std::to_string(x) + " repeated");
        used[x - 1] = true;
      }
      for (std::size_t i = 0; i < cycle.size(); ++i)
        p.images_[cycle[i] - 1] = cycle[(i + 1) % cycle.size()] - 1;
    }
    return p;
  }

  std::size_t degree() const noexcept { return images_.size(); }
  Point operator[](Point x) const noexcept { return images_[x]; }
  std::span<Point const> images() const noexcept { return images_; }

  bool is_identity() const noexcept {
    for (std::size_t i = 0; i < images_.size(); ++i)
      if (images_[i] != i)
        return false;
    return true;
  }

  /// Number of moved points.
  std::size_t support_size() const noexcept {
    std::size_t n = 0;
    for (std::size_t i = 0; i < images_.size(); ++i)
      n += images_[i] != i;
    return n;
  }

  Permutation operator*(Permutation const &q) const {
    if (degree() != q.degree())
      throw DegreeMismatch("compose: degrees " + std::to_string(degree()) +
                           " and " + std::to_string(q.degree()));
    Permutation r;
    r.images_.resize(images_.size());
    for (std::size_t x = 0; x < images_.size(); ++x)
      r.images_[x] = q.images_[images_[x]];
    return r;
  }

  Permutation &operator*=(Permutation const &q) { return *this = *this * q; }

  friend bool operator==(Permutation const &, Permutation const &) = default;
  friend auto operator<=>(Permutation const &, Permutation const &) = default;

private:
  std::vector<Point> images_;
};

inline Permutation compose(Permutation const &p, Permutation const &q) {
  return p * q;
}

inline Permutation inverse(Permutation const &p) {
  std::vector<Point> inv(p.degree());
  for (Point x = 0; x < p.degree(); ++x)
    inv[p[x]] = x;
  return Permutation::from_images(std::move(inv));
}

/// Canonical form: each cycle starts at its least point, cycles ordered by
/// that point.
struct CycleDecomposition {
  std::vector<std::vector<Point>> cycles;
  bool includes_fixed_points = false;
};

inline CycleDecomposition cycle_decomposition(Permutation const &p,
                                              bool include_fixed = false) {
  CycleDecomposition d{{}, include_fixed};
  std::vector<bool> seen(p.degree(), false);
  for (Point start = 0; start < p.degree(); ++start) {
    if (seen[start])
      continue;
    std::vector<Point> cycle;
    for (Point x = start; !seen[x]; x = p[x]) {
      seen[x] = true;
      cycle.push_back(x);
    }
    if (cycle.size() > 1 || include_fixed)
      d.cycles.push_back(std::move(cycle));
  }
  return d;
}

inline Permutation from_decomposition(std::size_t degree,
                                      CycleDecomposition const &d) {
  std::vector<Point> images(degree);
  std::iota(images.begin(), images.end(), Point{0});
  for (auto const &c : d.cycles)
    for (std::size_t i = 0; i < c.size(); ++i)
      images[c[i]] = c[(i + 1) % c.size()];
  return Permutation::from_images(std::move(images));
}

/// Sorted cycle lengths, fixed points included.
inline std::vector<std::size_t> cycle_type(Permutation const &p) {
  std::vector<std::size_t> lengths;
  for (auto const &c : cycle_decomposition(p, true).cycles)
    lengths.push_back(c.size());
  std::sort(lengths.begin(), lengths.end());
  return lengths;
}

/// True iff p is a single cycle of length >= 2. Sets *length if non-null.
inline bool is_single_cycle(Permutation const &p,
                            std::size_t *length = nullptr) {
  auto d = cycle_decomposition(p);
  if (d.cycles.size() != 1)
    return false;
  if (length)
    *length = d.cycles.front().size();
  return true;
}

inline BigInt order(Permutation const &p) {
  std::uint64_t small = 1;
  std::optional<BigInt> big;
  for (auto const &c : cycle_decomposition(p).cycles) {
    std::uint64_t const len = c.size();
    if (!big) {
      std::uint64_t const f = len / std::gcd(small, len);
      if (small <= std::numeric_limits<std::uint64_t>::max() / f) {
        small *= f;
        continue;
      }
      big = BigInt(small);
    }
    BigInt const l(len);
    *big = *big / boost::multiprecision::gcd(*big, l) * l;
  }
  return big ? *big : BigInt(small);
}

/// +1 or -1.
inline int signature(Permutation const &p) {
  std::size_t cycles = 0;
  std::vector<bool> seen(p.degree(), false);
  for (Point s = 0; s < p.degree(); ++s) {
    if (seen[s])
      continue;
    ++cycles;
    for (Point x = s; !seen[x]; x = p[x])
      seen[x] = true;
  }
  return ((p.degree() - cycles) % 2 == 0) ? 1 : -1;
}

/// p^e for any integer e, negative allowed. Each cycle of length L is
/// rotated by e mod L, so the cost is linear in the degree.
inline Permutation power(Permutation const &p, BigInt const &e) {
  std::vector<Point> images(p.degree());
  for (auto const &c : cycle_decomposition(p, true).cycles) {
    BigInt const len(c.size());
    BigInt r = e % len;
    if (r < 0)
      r += len;
    auto const shift = static_cast<std::size_t>(r);
    for (std::size_t i = 0; i < c.size(); ++i)
      images[c[i]] = c[(i + shift) % c.size()];
  }
  return Permutation::from_images(std::move(images));
}

inline Permutation power(Permutation const &p, long long e) {
  return power(p, BigInt(e));
}

/// r^-1 * p * r.
inline Permutation conjugate(Permutation const &p, Permutation const &r) {
  if (p.degree() != r.degree())
    throw DegreeMismatch("conjugate: degree mismatch");
  std::vector<Point> images(p.degree());
  for (Point x = 0; x < p.degree(); ++x)
    images[r[x]] = r[p[x]];
  return Permutation::from_images(std::move(images));
}

/// True iff every cycle length, fixed points included, is odd and no two
/// are equal: the S_k-class of p falls into two A_k-classes.
inline bool class_splits(Permutation const &p) {
  auto const t = cycle_type(p);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] % 2 == 0)
      return false;
    if (i > 0 && t[i] == t[i - 1])
      return false;
  }
  return true;
}

namespace detail {

inline std::vector<std::vector<Point>> aligned_cycles(Permutation const &p) {
  auto cycles = cycle_decomposition(p, true).cycles;
  std::stable_sort(cycles.begin(), cycles.end(), [](auto const &a, auto const &b) {
    if (a.size() != b.size())
      return a.size() > b.size();
    return a.front() < b.front();
  });
  return cycles;
}

/// An odd element of the centralizer of p, if there is one.
inline std::optional<Permutation> odd_centralizer_element(Permutation const &p) {
  auto const cycles = aligned_cycles(p);
  for (auto const &c : cycles)
    if (c.size() % 2 == 0)
      return from_decomposition(p.degree(), CycleDecomposition{{c}, false});
  for (std::size_t j = 1; j < cycles.size(); ++j) {
    if (cycles[j].size() != cycles[j - 1].size())
      continue;
    // Swapping two cycles of odd length m pointwise is m transpositions.
    std::vector<Point> images(p.degree());
    std::iota(images.begin(), images.end(), Point{0});
    for (std::size_t i = 0; i < cycles[j].size(); ++i) {
      images[cycles[j][i]] = cycles[j - 1][i];
      images[cycles[j - 1][i]] = cycles[j][i];
    }
    return Permutation::from_images(std::move(images));
  }
  return std::nullopt;
}

} // namespace detail

/// Some r with conjugate(p, r) == q. Cycles of p and q are paired by
/// decreasing length, ties by least point, and aligned from their least
/// points. If `parity` is given and the aligned r has the wrong sign, r is
/// premultiplied by an odd element of the centralizer of p (an even-length
/// cycle of p, or the pointwise swap of two equal odd-length cycles).
inline Permutation conjugator_between(Permutation const &p,
                                      Permutation const &q,
                                      std::optional<int> parity = std::nullopt) {
  if (p.degree() != q.degree())
    throw DegreeMismatch("conjugator_between: degree mismatch");
  auto const pc = detail::aligned_cycles(p);
  auto const qc = detail::aligned_cycles(q);
  if (pc.size() != qc.size())
    throw NotConjugate("different cycle types");
  std::vector<Point> images(p.degree());
  for (std::size_t j = 0; j < pc.size(); ++j) {
    if (pc[j].size() != qc[j].size())
      throw NotConjugate("different cycle types");
    for (std::size_t i = 0; i < pc[j].size(); ++i)
      images[pc[j][i]] = qc[j][i];
  }
  auto r = Permutation::from_images(std::move(images));
  if (parity && signature(r) != *parity) {
    auto const c = detail::odd_centralizer_element(p);
    if (!c)
      throw ParityUnachievable("conjugacy class splits; every conjugator has sign " +
                               std::to_string(signature(r)));
    r = *c * r;
  }
  return r;
}

/// Uniform over all k! permutations (Fisher-Yates on uniform_below).
inline Permutation random_permutation(std::size_t k, Rng &rng) {
  std::vector<Point> a(k);
  std::iota(a.begin(), a.end(), Point{0});
  for (std::size_t i = k; i > 1; --i)
    std::swap(a[i - 1], a[uniform_below(rng, i)]);
  return Permutation::from_images(std::move(a));
}

/// Parses "(1,6,4,3)(2,5)", "e" or "()". Whitespace is ignored. Without an
/// explicit degree the largest point is used.
inline Permutation parse_cycles(std::string_view text,
                                std::optional<std::size_t> degree = std::nullopt) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c)))
      s.push_back(c);

  std::vector<std::vector<Point>> cycles;
  if (s != "e") {
    std::size_t i = 0;
    auto fail = [&](std::string const &why) -> MalformedCycle {
      return MalformedCycle("'" + std::string(text) + "': " + why);
    };
    while (i < s.size()) {
      if (s[i] != '(')
        throw fail("expected '('");
      ++i;
      std::vector<Point> cycle;
      if (i < s.size() && s[i] == ')') {
        ++i;
        continue;
      }
      for (;;) {
        if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
          throw fail("expected a point");
        unsigned long long v = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
          v = v * 10 + static_cast<unsigned>(s[i] - '0');
          if (v > std::numeric_limits<Point>::max())
            throw fail("point too large");
          ++i;
        }
        if (v < 1)
          throw fail("points are 1-based");
        cycle.push_back(static_cast<Point>(v));
        if (i < s.size() && s[i] == ',') {
          ++i;
          continue;
        }
        if (i < s.size() && s[i] == ')') {
          ++i;
          break;
        }
        throw fail("expected ',' or ')'");
      }
      cycles.push_back(std::move(cycle));
    }
  }

  std::size_t n = degree.value_or(0);
  if (!degree) {
    n = 1;
    for (auto const &c : cycles)
      for (Point x : c)
        n = std::max<std::size_t>(n, x);
  }
  return Permutation::from_cycles(n, cycles);
}

/// 1-based cycle notation without fixed points; "e" for the identity.
inline std::string format_cycles(Permutation const &p) {
  auto const d = cycle_decomposition(p);
  if (d.cycles.empty())
    return "e";
  std::string out;
  for (auto const &c : d.cycles) {
    out += '(';
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i)
        out += ',';
      out += std::to_string(c[i] + 1);
    }
    out += ')';
  }
  return out;
}

inline std::ostream &operator<<(std::ostream &os, Permutation const &p) {
  return os << format_cycles(p);
}

} // namespace autgroup

template <> struct std::hash<autgroup::Permutation> {
  std::size_t operator()(autgroup::Permutation const &p) const noexcept {
    std::uint64_t h = p.degree();
    for (auto x : p.images())
      h = autgroup::mix64(h ^ x);
    return static_cast<std::size_t>(h);
  }
};
