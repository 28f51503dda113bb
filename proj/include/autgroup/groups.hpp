#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "autgroup/bigint.hpp"
#include "autgroup/errors.hpp"
#include "autgroup/perm.hpp"

/**
 * @file groups.hpp
 * @brief Finitely generated permutation groups: stabilizer chains, order,
 * membership, orbits, blocks, normal closure.
 *
 * The stabilizer chain is built by deterministic incremental Schreier-Sims
 * with explicit transversals. Degrees in this library stay below a few
 * hundred points, so every Schreier generator is sifted and the result is
 * always a complete base and strong generating set.
 */

namespace autgroup {

struct PermGroup {
  std::size_t degree = 0;
  std::vector<Permutation> generators;

  PermGroup() = default;
  PermGroup(std::size_t deg, std::vector<Permutation> gens)
      : degree(deg), generators(std::move(gens)) {
    for (auto const &g : generators)
      if (g.degree() != degree)
        throw DegreeMismatch("generator of degree " +
                             std::to_string(g.degree()) + " in group of degree " +
                             std::to_string(degree));
  }
};

class StabilizerChain {
public:
  explicit StabilizerChain(std::size_t degree, std::span<Point const> base_hint = {})
      : degree_(degree), scratch_(degree), scratch2_(degree) {
    for (Point b : base_hint) {
      if (b >= degree)
        throw PreconditionError("base point out of range");
      for (auto const &level : levels_)
        if (level.base == b)
          throw PreconditionError("repeated base point");
      push_level(b);
    }
  }

  static StabilizerChain build(PermGroup const &group,
                               std::span<Point const> base_hint = {}) {
    StabilizerChain chain(group.degree, base_hint);
    for (auto const &g : group.generators)
      chain.extend(g);
    return chain;
  }

  /// Adds g to the group. Returns false if g was already a member.
  bool extend(Permutation const &g) {
    check_degree(g);
    std::vector<Point> h(g.images().begin(), g.images().end());
    std::size_t const j = strip(h, 0);
    if (j == levels_.size() && is_identity(h))
      return false;
    add_strong_generator(std::move(h), 0, j);
    complete(j);
    return true;
  }

  std::size_t degree() const noexcept { return degree_; }
  std::size_t level_count() const noexcept { return levels_.size(); }

  std::vector<Point> base() const {
    std::vector<Point> b;
    for (auto const &level : levels_)
      b.push_back(level.base);
    return b;
  }

  std::vector<Permutation> strong_generators() const {
    std::vector<Permutation> out;
    for (auto const &s : strong_)
      out.push_back(Permutation::from_images(s));
    return out;
  }

  /// Generators of the pointwise stabilizer of the first `level` base points.
  std::vector<Permutation> level_generators(std::size_t level) const {
    std::vector<Permutation> out;
    if (level < levels_.size())
      for (std::size_t idx : levels_[level].gens)
        out.push_back(Permutation::from_images(strong_[idx]));
    return out;
  }

  std::span<Point const> basic_orbit(std::size_t level) const {
    return levels_.at(level).orbit;
  }

  /// Coset representative u at `level` with u(base) = point.
  std::optional<Permutation> transversal(std::size_t level, Point point) const {
    auto const &lv = levels_.at(level);
    int const idx = lv.orbit_index.at(point);
    if (idx < 0)
      return std::nullopt;
    return Permutation::from_images(lv.reps[static_cast<std::size_t>(idx)]);
  }

  BigInt order() const {
    BigInt r = 1;
    for (auto const &level : levels_)
      r *= level.orbit.size();
    return r;
  }

  /// Residue of p after sifting, and the level where sifting stopped
  /// (level_count() when it passed every level).
  std::pair<Permutation, std::size_t> sift(Permutation const &p) const {
    check_degree(p);
    std::vector<Point> h(p.images().begin(), p.images().end());
    std::vector<Point> tmp(degree_);
    std::size_t const j = strip_const(h, 0, tmp);
    return {Permutation::from_images(std::move(h)), j};
  }

  bool contains(Permutation const &p) const {
    auto const [residue, level] = sift(p);
    return level == levels_.size() && residue.is_identity();
  }

private:
  using Images = std::vector<Point>;

  struct Level {
    Point base = 0;
    std::vector<std::size_t> gens;         // indices into strong_
    std::vector<std::size_t> checked_upto; // per gen: orbit prefix already tested
    std::vector<Point> orbit;
    std::vector<int> orbit_index;
    std::vector<Images> reps;
    std::vector<Images> reps_inv;
  };

  static bool is_identity(Images const &a) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != i)
        return false;
    return true;
  }

  /// out = a * b (apply a first).
  static void mul_into(Images const &a, Images const &b, Images &out) {
    for (std::size_t x = 0; x < a.size(); ++x)
      out[x] = b[a[x]];
  }

  static Images invert(Images const &a) {
    Images inv(a.size());
    for (std::size_t x = 0; x < a.size(); ++x)
      inv[a[x]] = static_cast<Point>(x);
    return inv;
  }

  void check_degree(Permutation const &p) const {
    if (p.degree() != degree_)
      throw DegreeMismatch("permutation of degree " + std::to_string(p.degree()) +
                           " against chain of degree " + std::to_string(degree_));
  }

  void push_level(Point b) {
    Level level;
    level.base = b;
    level.orbit = {b};
    level.orbit_index.assign(degree_, -1);
    level.orbit_index[b] = 0;
    Images id(degree_);
    std::iota(id.begin(), id.end(), Point{0});
    level.reps.push_back(id);
    level.reps_inv.push_back(std::move(id));
    levels_.push_back(std::move(level));
  }

  std::size_t strip_const(Images &h, std::size_t from, Images &tmp) const {
    for (std::size_t l = from; l < levels_.size(); ++l) {
      auto const &lv = levels_[l];
      int const idx = lv.orbit_index[h[lv.base]];
      if (idx < 0)
        return l;
      mul_into(h, lv.reps_inv[static_cast<std::size_t>(idx)], tmp);
      h.swap(tmp);
    }
    return levels_.size();
  }

  std::size_t strip(Images &h, std::size_t from) {
    return strip_const(h, from, scratch_);
  }

  void extend_orbit(Level &lv) {
    for (std::size_t i = 0; i < lv.orbit.size(); ++i) {
      Point const x = lv.orbit[i];
      for (std::size_t idx : lv.gens) {
        Point const y = strong_[idx][x];
        if (lv.orbit_index[y] >= 0)
          continue;
        Images rep(degree_);
        mul_into(lv.reps[i], strong_[idx], rep);
        lv.orbit_index[y] = static_cast<int>(lv.orbit.size());
        lv.orbit.push_back(y);
        lv.reps_inv.push_back(invert(rep));
        lv.reps.push_back(std::move(rep));
      }
    }
  }

  /// h fixes the base points of levels < first; it joins levels first..last.
  void add_strong_generator(Images h, std::size_t first, std::size_t last) {
    if (last == levels_.size()) {
      Point moved = 0;
      while (h[moved] == moved)
        ++moved;
      push_level(moved);
    }
    strong_.push_back(std::move(h));
    std::size_t const idx = strong_.size() - 1;
    for (std::size_t l = first; l <= last; ++l) {
      levels_[l].gens.push_back(idx);
      levels_[l].checked_upto.push_back(0);
      extend_orbit(levels_[l]);
    }
  }

  /// Levels above `start` are complete; make every level complete.
  void complete(std::size_t start) {
    std::size_t i = start + 1;
    while (i-- > 0) {
      bool restarted = false;
      for (std::size_t gi = 0; gi < levels_[i].gens.size() && !restarted; ++gi) {
        while (levels_[i].checked_upto[gi] < levels_[i].orbit.size()) {
          Level &lv = levels_[i];
          std::size_t const pos = lv.checked_upto[gi]++;
          Images const &s = strong_[lv.gens[gi]];
          Point const image = s[lv.orbit[pos]];
          std::size_t const target = static_cast<std::size_t>(lv.orbit_index[image]);
          // Schreier generator u_x * s * u_{s(x)}^-1
          mul_into(lv.reps[pos], s, scratch2_);
          Images h(degree_);
          mul_into(scratch2_, lv.reps_inv[target], h);
          if (is_identity(h))
            continue;
          std::size_t const j = strip(h, i + 1);
          if (j == levels_.size() && is_identity(h))
            continue;
          add_strong_generator(std::move(h), i + 1, j);
          i = j + 1; // resume at level j after the decrement
          restarted = true;
          break;
        }
      }
    }
  }

  std::size_t degree_;
  std::vector<Level> levels_;
  std::vector<Images> strong_;
  Images scratch_;
  Images scratch2_;
};

inline StabilizerChain build_chain(PermGroup const &g,
                                   std::span<Point const> base_hint = {}) {
  return StabilizerChain::build(g, base_hint);
}

inline BigInt group_order(PermGroup const &g) { return build_chain(g).order(); }

inline bool contains(StabilizerChain const &chain, Permutation const &p) {
  return chain.contains(p);
}

/// Sorted orbit of x.
inline std::vector<Point> orbit(PermGroup const &g, Point x) {
  std::vector<bool> seen(g.degree, false);
  std::vector<Point> out{x};
  seen[x] = true;
  for (std::size_t i = 0; i < out.size(); ++i)
    for (auto const &s : g.generators) {
      Point const y = s[out[i]];
      if (!seen[y]) {
        seen[y] = true;
        out.push_back(y);
      }
    }
  std::sort(out.begin(), out.end());
  return out;
}

/// All orbits, ordered by least point.
inline std::vector<std::vector<Point>> orbits(PermGroup const &g) {
  std::vector<std::vector<Point>> out;
  std::vector<bool> seen(g.degree, false);
  for (Point x = 0; x < g.degree; ++x) {
    if (seen[x])
      continue;
    auto o = orbit(g, x);
    for (Point y : o)
      seen[y] = true;
    out.push_back(std::move(o));
  }
  return out;
}

inline bool is_transitive(PermGroup const &g) {
  return g.degree <= 1 || orbit(g, 0).size() == g.degree;
}

struct BlockSystem {
  std::vector<std::size_t> block_of; // point -> block id, ids by least point
  std::size_t block_count = 0;

  bool is_trivial() const {
    return block_count <= 1 || block_count == block_of.size();
  }
};

/// Finest block system in which a and b share a block (union-find closure).
inline BlockSystem minimal_block_system(PermGroup const &g, Point a, Point b) {
  std::vector<Point> parent(g.degree);
  std::iota(parent.begin(), parent.end(), Point{0});
  auto find = [&](Point x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::vector<Point> queue;
  auto merge = [&](Point x, Point y) {
    x = find(x);
    y = find(y);
    if (x == y)
      return;
    if (y < x)
      std::swap(x, y);
    parent[y] = x;
    queue.push_back(y);
  };
  merge(a, b);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    Point const gamma = queue[qi];
    for (auto const &s : g.generators) {
      Point const delta = find(gamma);
      merge(s[gamma], s[delta]);
    }
  }
  BlockSystem bs;
  bs.block_of.assign(g.degree, 0);
  std::vector<std::size_t> id_of_root(g.degree, SIZE_MAX);
  for (Point x = 0; x < g.degree; ++x) {
    Point const r = find(x);
    if (id_of_root[r] == SIZE_MAX)
      id_of_root[r] = bs.block_count++;
    bs.block_of[x] = id_of_root[r];
  }
  return bs;
}

/// A nontrivial block system of a transitive group, if any.
inline std::optional<BlockSystem> nontrivial_block_system(PermGroup const &g) {
  if (!is_transitive(g))
    throw NotTransitive("block systems requested for an intransitive group");
  for (Point x = 1; x < g.degree; ++x) {
    auto bs = minimal_block_system(g, 0, x);
    if (!bs.is_trivial())
      return bs;
  }
  return std::nullopt;
}

inline bool is_primitive(PermGroup const &g) {
  return !nontrivial_block_system(g).has_value();
}

/// Smallest subgroup containing `seed` and normalized by `ambient`.
/// `max_rounds` bounds the number of generators added.
inline PermGroup normal_closure(PermGroup const &ambient, Permutation const &seed,
                                std::size_t max_rounds = 1000) {
  if (seed.degree() != ambient.degree)
    throw DegreeMismatch("normal_closure: seed degree differs from ambient");
  StabilizerChain chain(ambient.degree);
  std::vector<Permutation> gens;
  if (chain.extend(seed))
    gens.push_back(seed);
  std::size_t rounds = 0;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    for (auto const &a : ambient.generators) {
      auto c = conjugate(gens[i], a);
      if (chain.extend(c)) {
        if (++rounds > max_rounds)
          throw NonConvergence("normal_closure exceeded " +
                               std::to_string(max_rounds) + " rounds");
        gens.push_back(std::move(c));
      }
    }
  }
  return PermGroup(ambient.degree, std::move(gens));
}

enum class SymAlt { Symmetric, Alternating, Other };

inline char const *to_string(SymAlt s) {
  switch (s) {
  case SymAlt::Symmetric: return "Symmetric";
  case SymAlt::Alternating: return "Alternating";
  case SymAlt::Other: return "Other";
  }
  return "?";
}

/// Order-based identification of S_k and A_k, given the group's order.
inline SymAlt recognize_sym_alt(PermGroup const &g, BigInt const &group_order) {
  auto const k = static_cast<unsigned>(g.degree);
  BigInt const full = factorial(k);
  if (group_order == full)
    return SymAlt::Symmetric;
  if (group_order * 2 == full) {
    for (auto const &s : g.generators)
      if (signature(s) != 1)
        return SymAlt::Other;
    return SymAlt::Alternating;
  }
  return SymAlt::Other;
}

inline SymAlt recognize_sym_alt(PermGroup const &g) {
  return recognize_sym_alt(g, group_order(g));
}

/// Subgroup of g acting trivially on the first m of the consecutive blocks
/// of size `block_size`. Generated by the strong generators that fix every
/// point of those blocks, read off a chain whose base starts with them.
inline PermGroup projection_kernel(PermGroup const &g, std::size_t block_size,
                                   std::size_t m) {
  if (block_size == 0 || g.degree % block_size != 0)
    throw BadBlockStructure("degree is not a multiple of the block size");
  std::size_t const n = g.degree / block_size;
  if (m < 1 || m >= n)
    throw BadBlockStructure("prefix of " + std::to_string(m) + " blocks out of " +
                            std::to_string(n));
  for (auto const &s : g.generators)
    for (Point x = 0; x < g.degree; ++x)
      if (s[x] / block_size != x / block_size)
        throw BadBlockStructure("generator moves a point across blocks");
  std::vector<Point> hint(m * block_size);
  std::iota(hint.begin(), hint.end(), Point{0});
  auto const chain = StabilizerChain::build(g, hint);
  return PermGroup(g.degree, chain.level_generators(hint.size()));
}

} // namespace autgroup
