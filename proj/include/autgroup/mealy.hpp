#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "autgroup/errors.hpp"
#include "autgroup/groups.hpp"
#include "autgroup/perm.hpp"

/**
 * @file mealy.hpp
 * @brief Mealy automata, their word actions, and the finite embedding of
 * the groups generated by cycle-without-exit automata.
 *
 * States are 0-based everywhere; letters are 0-based in memory and 1-based
 * in files and cycle notation.
 */

namespace autgroup {

using State = std::uint32_t;
using Word = std::vector<Point>;

class MealyAutomaton {
public:
  MealyAutomaton() = default;

  /// Tables indexed by q * letters + i.
  MealyAutomaton(std::size_t states, std::size_t letters, std::vector<State> delta,
                 std::vector<Point> rho)
      : states_(states), letters_(letters), delta_(std::move(delta)),
        rho_(std::move(rho)) {
    if (states == 0 || letters == 0)
      throw PreconditionError("automaton needs at least one state and one letter");
    if (delta_.size() != states * letters || rho_.size() != states * letters)
      throw IncompleteTable("tables must have states * letters entries");
    for (State s : delta_)
      if (s >= states)
        throw PreconditionError("transition target out of range");
    for (Point j : rho_)
      if (j >= letters)
        throw PreconditionError("output letter out of range");
  }

  /// delta_i(q) = q + 1 mod n; state q outputs outputs[q].
  static MealyAutomaton cyclic(std::vector<Permutation> const &outputs) {
    if (outputs.empty())
      throw PreconditionError("cyclic automaton needs a state");
    std::size_t const n = outputs.size(), k = outputs.front().degree();
    std::vector<State> delta(n * k);
    std::vector<Point> rho(n * k);
    for (std::size_t q = 0; q < n; ++q) {
      if (outputs[q].degree() != k)
        throw DegreeMismatch("cyclic: outputs of different degrees");
      for (std::size_t i = 0; i < k; ++i) {
        delta[q * k + i] = static_cast<State>((q + 1) % n);
        rho[q * k + i] = outputs[q][static_cast<Point>(i)];
      }
    }
    return MealyAutomaton(n, k, std::move(delta), std::move(rho));
  }

  /// States of part j are renumbered after those of parts 0..j-1.
  static MealyAutomaton disjoint_union(std::vector<MealyAutomaton> const &parts) {
    if (parts.empty())
      throw PreconditionError("empty union");
    std::size_t const k = parts.front().letters();
    std::vector<State> delta;
    std::vector<Point> rho;
    State offset = 0;
    for (auto const &a : parts) {
      if (a.letters() != k)
        throw AlphabetMismatch("union of automata over different alphabets");
      for (std::size_t q = 0; q < a.states(); ++q)
        for (std::size_t i = 0; i < k; ++i) {
          delta.push_back(offset + a.next(static_cast<State>(q), static_cast<Point>(i)));
          rho.push_back(a.output(static_cast<State>(q), static_cast<Point>(i)));
        }
      offset += static_cast<State>(a.states());
    }
    return MealyAutomaton(offset, k, std::move(delta), std::move(rho));
  }

  std::size_t states() const noexcept { return states_; }
  std::size_t letters() const noexcept { return letters_; }
  State next(State q, Point i) const { return delta_[q * letters_ + i]; }
  Point output(State q, Point i) const { return rho_[q * letters_ + i]; }

  /// rho_q as a permutation; throws NotInvertible if it is not one.
  Permutation production(State q) const {
    std::vector<Point> images(rho_.begin() + q * letters_,
                              rho_.begin() + (q + 1) * letters_);
    try {
      return Permutation::from_images(std::move(images));
    } catch (PreconditionError const &) {
      throw NotInvertible("state " + std::to_string(q) +
                          " does not permute the alphabet");
    }
  }

  friend bool operator==(MealyAutomaton const &, MealyAutomaton const &) = default;

private:
  std::size_t states_ = 0;
  std::size_t letters_ = 0;
  std::vector<State> delta_;
  std::vector<Point> rho_;
};

// ---------------------------------------------------------------------------
// Predicates

inline bool is_invertible(MealyAutomaton const &a) {
  for (State q = 0; q < a.states(); ++q) {
    std::vector<bool> seen(a.letters(), false);
    for (Point i = 0; i < a.letters(); ++i) {
      Point const j = a.output(q, i);
      if (seen[j])
        return false;
      seen[j] = true;
    }
  }
  return true;
}

inline bool is_reversible(MealyAutomaton const &a) {
  for (Point i = 0; i < a.letters(); ++i) {
    std::vector<bool> seen(a.states(), false);
    for (State q = 0; q < a.states(); ++q) {
      State const t = a.next(q, i);
      if (seen[t])
        return false;
      seen[t] = true;
    }
  }
  return true;
}

/// Reversible, and for every output letter j the transitions emitting j
/// form a permutation of the states (one leaving and one entering each).
inline bool is_bireversible(MealyAutomaton const &a) {
  if (!is_reversible(a))
    return false;
  for (Point j = 0; j < a.letters(); ++j) {
    std::vector<int> out_count(a.states(), 0), in_count(a.states(), 0);
    for (State q = 0; q < a.states(); ++q)
      for (Point i = 0; i < a.letters(); ++i)
        if (a.output(q, i) == j) {
          ++out_count[q];
          ++in_count[a.next(q, i)];
        }
    for (std::size_t q = 0; q < a.states(); ++q)
      if (out_count[q] != 1 || in_count[q] != 1)
        return false;
  }
  return true;
}

inline bool is_letter_independent(MealyAutomaton const &a) {
  for (State q = 0; q < a.states(); ++q)
    for (Point i = 1; i < a.letters(); ++i)
      if (a.next(q, i) != a.next(q, 0))
        return false;
  return true;
}

// ---------------------------------------------------------------------------
// Word actions

inline void check_word(MealyAutomaton const &a, Word const &s) {
  for (Point x : s)
    if (x >= a.letters())
      throw LetterOutOfRange("letter " + std::to_string(x + 1) + " outside 1.." +
                             std::to_string(a.letters()));
}

inline void check_state(MealyAutomaton const &a, State q) {
  if (q >= a.states())
    throw PreconditionError("state " + std::to_string(q) + " out of range");
}

/// rho_q(i s) = rho_q(i) rho_{delta_i(q)}(s).
inline Word apply_state_to_word(MealyAutomaton const &a, State q, Word const &s) {
  check_state(a, q);
  check_word(a, s);
  Word out;
  out.reserve(s.size());
  for (Point i : s) {
    out.push_back(a.output(q, i));
    q = a.next(q, i);
  }
  return out;
}

/// rho_{q u} = rho_u o rho_q: the states of u act left to right.
inline Word apply_state_word(MealyAutomaton const &a, std::vector<State> const &u,
                             Word s) {
  check_word(a, s);
  for (State q : u)
    s = apply_state_to_word(a, q, s);
  return s;
}

// ---------------------------------------------------------------------------
// Structure of the transition digraph

struct Cyclic {
  std::size_t states;
  friend bool operator==(Cyclic const &, Cyclic const &) = default;
};
struct Path {
  std::size_t states;
  friend bool operator==(Path const &, Path const &) = default;
};
struct ConvergingTree {
  std::size_t arity;
  std::size_t depth;
  friend bool operator==(ConvergingTree const &, ConvergingTree const &) = default;
};
struct DisjointCycles {
  std::vector<std::size_t> sizes;
  friend bool operator==(DisjointCycles const &, DisjointCycles const &) = default;
};
/// Letter-independent and connected, but none of the shapes above.
struct CycleWithoutExit {
  friend bool operator==(CycleWithoutExit const &, CycleWithoutExit const &) = default;
};
/// Letter-independent with several components, not all of them cycles.
struct GeneralLetterIndependent {
  friend bool operator==(GeneralLetterIndependent const &,
                         GeneralLetterIndependent const &) = default;
};
struct LetterDependent {
  friend bool operator==(LetterDependent const &, LetterDependent const &) = default;
};

using StructureClass = std::variant<Cyclic, Path, ConvergingTree, DisjointCycles,
                                    CycleWithoutExit, GeneralLetterIndependent,
                                    LetterDependent>;

/// CSV-safe rendering, e.g. "DisjointCycles(2;3)".
inline std::string to_string(StructureClass const &s) {
  struct Visitor {
    std::string operator()(Cyclic const &c) const {
      return "Cyclic(" + std::to_string(c.states) + ")";
    }
    std::string operator()(Path const &p) const {
      return "Path(" + std::to_string(p.states) + ")";
    }
    std::string operator()(ConvergingTree const &t) const {
      return "ConvergingTree(a=" + std::to_string(t.arity) +
             ";d=" + std::to_string(t.depth) + ")";
    }
    std::string operator()(DisjointCycles const &d) const {
      std::string out = "DisjointCycles(";
      for (std::size_t i = 0; i < d.sizes.size(); ++i)
        out += (i ? ";" : "") + std::to_string(d.sizes[i]);
      return out + ")";
    }
    std::string operator()(CycleWithoutExit const &) const { return "CycleWithoutExit"; }
    std::string operator()(GeneralLetterIndependent const &) const {
      return "GeneralLetterIndependent";
    }
    std::string operator()(LetterDependent const &) const { return "LetterDependent"; }
  };
  return std::visit(Visitor{}, s);
}

/// The map q -> delta(q) of a letter-independent automaton, with its tails
/// and cycles.
struct FunctionalGraph {
  std::vector<State> next;
  std::vector<bool> on_cycle;
  std::vector<std::size_t> tail_length;  // steps until the cycle is reached
  std::vector<std::size_t> cycle_length; // length of the cycle eventually reached

  explicit FunctionalGraph(MealyAutomaton const &a) {
    if (!is_letter_independent(a))
      throw NotLetterIndependent("transitions depend on the input letter");
    std::size_t const n = a.states();
    for (State q = 0; q < n; ++q)
      next.push_back(a.next(q, 0));
    on_cycle.assign(n, false);
    for (State q = 0; q < n; ++q) {
      // Walking n steps from anywhere lands on a cycle.
      State x = q;
      for (std::size_t s = 0; s < n; ++s)
        x = next[x];
      on_cycle[x] = true;
    }
    // Mark the full cycles.
    for (State q = 0; q < n; ++q)
      if (on_cycle[q])
        for (State x = next[q]; !on_cycle[x] || x != q; x = next[x])
          on_cycle[x] = true;
    tail_length.assign(n, 0);
    cycle_length.assign(n, 0);
    for (State q = 0; q < n; ++q) {
      State x = q;
      std::size_t t = 0;
      while (!on_cycle[x]) {
        x = next[x];
        ++t;
      }
      std::size_t len = 1;
      for (State y = next[x]; y != x; y = next[y])
        ++len;
      tail_length[q] = t;
      cycle_length[q] = len;
    }
  }

  std::size_t max_tail() const {
    return tail_length.empty() ? 0 : *std::max_element(tail_length.begin(), tail_length.end());
  }
  std::size_t cycle_lcm() const {
    std::size_t l = 1;
    for (std::size_t c : cycle_length)
      l = std::lcm(l, c);
    return l;
  }
};

inline StructureClass classify_structure(MealyAutomaton const &a) {
  if (!is_letter_independent(a))
    return LetterDependent{};
  FunctionalGraph const fg(a);
  std::size_t const n = a.states();

  // Components, labelled by their least state.
  std::vector<State> comp(n);
  std::iota(comp.begin(), comp.end(), State{0});
  auto find = [&](State x) {
    while (comp[x] != x)
      x = comp[x] = comp[comp[x]];
    return x;
  };
  for (State q = 0; q < n; ++q) {
    State r1 = find(q), r2 = find(fg.next[q]);
    if (r1 != r2)
      comp[std::max(r1, r2)] = std::min(r1, r2);
  }
  std::vector<State> roots;
  for (State q = 0; q < n; ++q)
    if (find(q) == q)
      roots.push_back(q);

  bool const all_cycles = std::all_of(fg.on_cycle.begin(), fg.on_cycle.end(),
                                      [](bool b) { return b; });
  if (all_cycles) {
    if (roots.size() == 1)
      return Cyclic{n};
    std::vector<std::size_t> sizes;
    for (State r : roots)
      sizes.push_back(fg.cycle_length[r]);
    return DisjointCycles{std::move(sizes)};
  }
  if (roots.size() > 1)
    return GeneralLetterIndependent{};

  State root = 0;
  while (!fg.on_cycle[root])
    ++root;
  if (fg.cycle_length[root] != 1)
    return CycleWithoutExit{};

  // In-tree towards a looping root: uniform arity and leaf depth?
  std::vector<std::size_t> children(n, 0);
  for (State q = 0; q < n; ++q)
    if (q != root)
      ++children[fg.next[q]];
  std::size_t arity = 0, depth = 0;
  bool uniform = true;
  for (State q = 0; q < n; ++q) {
    if (children[q] == 0) {
      if (depth == 0)
        depth = fg.tail_length[q];
      uniform = uniform && fg.tail_length[q] == depth;
    } else {
      if (arity == 0)
        arity = children[q];
      uniform = uniform && children[q] == arity;
    }
  }
  if (!uniform)
    return CycleWithoutExit{};
  if (arity == 1)
    return Path{n};
  return ConvergingTree{arity, depth};
}

// ---------------------------------------------------------------------------
// Eventually periodic sequences of permutations

/// The action of a group element of a letter-independent automaton: the
/// letter at depth t is permuted by at(t). Always held in canonical form:
/// primitive period, and no trailing preperiod entry that the periodic part
/// would reproduce. Equal values therefore compare equal.
class EventuallyPeriodic {
public:
  EventuallyPeriodic(std::size_t degree, std::vector<Permutation> preperiod,
                     std::vector<Permutation> period)
      : degree_(degree), pre_(std::move(preperiod)), period_(std::move(period)) {
    if (period_.empty())
      throw PreconditionError("period must be nonempty");
    for (auto const *v : {&pre_, &period_})
      for (auto const &p : *v)
        if (p.degree() != degree_)
          throw DegreeMismatch("entries of different degrees");
    canonicalize();
  }

  static EventuallyPeriodic identity(std::size_t degree) {
    return EventuallyPeriodic(degree, {}, {Permutation(degree)});
  }

  std::size_t degree() const noexcept { return degree_; }
  std::vector<Permutation> const &preperiod() const noexcept { return pre_; }
  std::vector<Permutation> const &period() const noexcept { return period_; }

  Permutation const &at(std::size_t t) const {
    if (t < pre_.size())
      return pre_[t];
    return period_[(t - pre_.size()) % period_.size()];
  }

  bool is_identity() const {
    return pre_.empty() && period_.size() == 1 && period_.front().is_identity();
  }

  friend bool operator==(EventuallyPeriodic const &, EventuallyPeriodic const &) = default;

private:
  void canonicalize() {
    std::size_t const len = period_.size();
    for (std::size_t d = 1; d < len; ++d) {
      if (len % d)
        continue;
      bool repeats = true;
      for (std::size_t i = d; i < len && repeats; ++i)
        repeats = period_[i] == period_[i - d];
      if (repeats) {
        period_.resize(d);
        break;
      }
    }
    while (!pre_.empty() && pre_.back() == period_.back()) {
      std::rotate(period_.rbegin(), period_.rbegin() + 1, period_.rend());
      pre_.pop_back();
    }
  }

  std::size_t degree_;
  std::vector<Permutation> pre_;
  std::vector<Permutation> period_;
};

/// Componentwise product: at(t) = a.at(t) * b.at(t).
inline EventuallyPeriodic ep_multiply(EventuallyPeriodic const &a,
                                      EventuallyPeriodic const &b) {
  if (a.degree() != b.degree())
    throw DegreeMismatch("ep_multiply: degree mismatch");
  std::size_t const pre = std::max(a.preperiod().size(), b.preperiod().size());
  std::size_t const len = std::lcm(a.period().size(), b.period().size());
  std::vector<Permutation> p, q;
  for (std::size_t t = 0; t < pre; ++t)
    p.push_back(a.at(t) * b.at(t));
  for (std::size_t t = pre; t < pre + len; ++t)
    q.push_back(a.at(t) * b.at(t));
  return EventuallyPeriodic(a.degree(), std::move(p), std::move(q));
}

inline EventuallyPeriodic ep_inverse(EventuallyPeriodic const &a) {
  std::vector<Permutation> p, q;
  for (auto const &x : a.preperiod())
    p.push_back(inverse(x));
  for (auto const &x : a.period())
    q.push_back(inverse(x));
  return EventuallyPeriodic(a.degree(), std::move(p), std::move(q));
}

inline bool ep_is_identity(EventuallyPeriodic const &a) { return a.is_identity(); }

inline EventuallyPeriodic operator*(EventuallyPeriodic const &a,
                                    EventuallyPeriodic const &b) {
  return ep_multiply(a, b);
}

inline void require_group_semantics(MealyAutomaton const &a) {
  if (!is_letter_independent(a))
    throw NotLetterIndependent("group semantics need letter-independent transitions");
  if (!is_invertible(a))
    throw NotInvertible("automaton is not invertible");
}

/// The element rho_q: productions along the trajectory q, delta(q), ...
inline EventuallyPeriodic state_semantics(MealyAutomaton const &a, State q) {
  require_group_semantics(a);
  check_state(a, q);
  FunctionalGraph const fg(a);
  std::vector<Permutation> pre, period;
  State x = q;
  for (std::size_t t = 0; t < fg.tail_length[q]; ++t, x = fg.next[x])
    pre.push_back(a.production(x));
  for (std::size_t t = 0; t < fg.cycle_length[q]; ++t, x = fg.next[x])
    period.push_back(a.production(x));
  return EventuallyPeriodic(a.letters(), std::move(pre), std::move(period));
}

// ---------------------------------------------------------------------------
// Finite embedding

/// Every product of state elements has preperiod <= max tail and period
/// dividing the lcm of the cycle lengths, so its first blocks() entries
/// determine it.
struct FaithfulEmbedding {
  std::size_t max_preperiod = 0;
  std::size_t cycle_lcm = 1;
  std::vector<std::vector<Permutation>> tuples; // per state, blocks() entries

  std::size_t blocks() const noexcept { return max_preperiod + cycle_lcm; }
};

inline FaithfulEmbedding faithful_embedding(MealyAutomaton const &a) {
  require_group_semantics(a);
  FunctionalGraph const fg(a);
  FaithfulEmbedding e;
  e.max_preperiod = fg.max_tail();
  e.cycle_lcm = fg.cycle_lcm();
  for (State q = 0; q < a.states(); ++q) {
    std::vector<Permutation> tuple;
    State x = q;
    for (std::size_t t = 0; t < e.blocks(); ++t, x = fg.next[x])
      tuple.push_back(a.production(x));
    e.tuples.push_back(std::move(tuple));
  }
  return e;
}

/// Blockwise permutation of tuple.size() * k points; entry t acts on the
/// points t*k .. t*k + k - 1.
inline Permutation tuple_to_permutation(std::span<Permutation const> tuple) {
  if (tuple.empty())
    throw PreconditionError("empty tuple");
  std::size_t const k = tuple.front().degree();
  std::vector<Point> images(tuple.size() * k);
  for (std::size_t t = 0; t < tuple.size(); ++t) {
    if (tuple[t].degree() != k)
      throw DegreeMismatch("tuple entries of different degrees");
    for (Point x = 0; x < k; ++x)
      images[t * k + x] = static_cast<Point>(t * k + tuple[t][x]);
  }
  return Permutation::from_images(std::move(images));
}

/// Entry t of a blockwise permutation.
inline Permutation block_component(Permutation const &p, std::size_t k, std::size_t t) {
  std::vector<Point> images(k);
  for (Point x = 0; x < k; ++x) {
    Point const y = p[static_cast<Point>(t * k + x)];
    if (y / k != t)
      throw BadBlockStructure("permutation moves a point across blocks");
    images[x] = static_cast<Point>(y - t * k);
  }
  return Permutation::from_images(std::move(images));
}

inline std::vector<Permutation> permutation_to_tuple(Permutation const &p, std::size_t k) {
  std::vector<Permutation> out;
  for (std::size_t t = 0; t < p.degree() / k; ++t)
    out.push_back(block_component(p, k, t));
  return out;
}

/// A group acting on `blocks` consecutive copies of the alphabet.
struct EmbeddedGroup {
  PermGroup group;
  std::size_t blocks = 0;
  std::size_t letters = 0;
};

inline EmbeddedGroup generated_group(MealyAutomaton const &a) {
  auto const e = faithful_embedding(a);
  std::vector<Permutation> gens;
  for (auto const &t : e.tuples)
    gens.push_back(tuple_to_permutation(t));
  return EmbeddedGroup{PermGroup(e.blocks() * a.letters(), std::move(gens)), e.blocks(),
                       a.letters()};
}

// ---------------------------------------------------------------------------
// File formats

namespace detail {

struct Line {
  std::size_t number;
  std::string text;
};

inline std::vector<Line> significant_lines(std::string_view text) {
  std::vector<Line> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos)
      raw.erase(hash);
    auto const b = raw.find_first_not_of(" \t\r");
    if (b == std::string::npos)
      continue;
    auto const e = raw.find_last_not_of(" \t\r");
    out.push_back({number, raw.substr(b, e - b + 1)});
  }
  return out;
}

inline std::vector<std::string> tokens(std::string const &s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;)
    out.push_back(t);
  return out;
}

inline std::size_t parse_count(std::string const &s, std::size_t line) {
  if (s.empty() || s.size() > 9 ||
      !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw ParseError(line, "expected a nonnegative integer, got '" + s + "'");
  return std::stoul(s);
}

inline void expect_header(Line const &l, std::string const &kind) {
  auto const t = tokens(l.text);
  if (t.size() != 2 || t[0] != kind || t[1] != "v1")
    throw ParseError(l.number, "expected '" + kind + " v1'");
}

inline std::pair<std::string, std::string> split_keyword(Line const &l) {
  auto const sp = l.text.find_first_of(" \t");
  if (sp == std::string::npos)
    return {l.text, ""};
  auto rest = l.text.substr(sp);
  rest.erase(0, rest.find_first_not_of(" \t"));
  return {l.text.substr(0, sp), rest};
}

inline std::size_t letters_line(Line const &l) {
  auto const [kw, rest] = split_keyword(l);
  if (kw != "letters")
    throw ParseError(l.number, "expected 'letters <k>'");
  auto const k = parse_count(rest, l.number);
  if (k == 0)
    throw ParseError(l.number, "alphabet must be nonempty");
  return k;
}

inline MealyAutomaton parse_cyclic_block(std::span<Line const> lines,
                                         std::size_t header_line) {
  if (lines.empty())
    throw ParseError(header_line, "cyclic block ends before 'letters'");
  std::size_t const k = letters_line(lines.front());
  std::vector<std::optional<Permutation>> outputs;
  for (auto const &l : lines.subspan(1)) {
    auto const [kw, rest] = split_keyword(l);
    if (kw != "state")
      throw ParseError(l.number, "expected 'state <q> <cycles>'");
    auto const sp = rest.find_first_of(" \t");
    if (sp == std::string::npos)
      throw ParseError(l.number, "missing cycle notation");
    auto const q = parse_count(rest.substr(0, sp), l.number);
    if (q >= 100000)
      throw ParseError(l.number, "state index too large");
    Permutation p;
    try {
      p = parse_cycles(rest.substr(sp), k);
    } catch (MalformedCycle const &e) {
      throw ParseError(l.number, e.what());
    }
    if (outputs.size() <= q)
      outputs.resize(q + 1);
    if (outputs[q])
      throw ParseError(l.number, "state " + std::to_string(q) + " defined twice");
    outputs[q] = std::move(p);
  }
  if (outputs.empty())
    throw IncompleteTable(lines.front().number, "cyclic block without states");
  std::vector<Permutation> perms;
  for (std::size_t q = 0; q < outputs.size(); ++q) {
    if (!outputs[q])
      throw IncompleteTable(lines.back().number,
                            "state " + std::to_string(q) + " missing");
    perms.push_back(*outputs[q]);
  }
  return MealyAutomaton::cyclic(perms);
}

inline MealyAutomaton parse_full(std::span<Line const> lines, std::size_t header_line) {
  std::optional<std::size_t> n, k;
  std::vector<std::optional<std::pair<State, Point>>> table;
  std::size_t last_line = header_line;
  for (auto const &l : lines) {
    last_line = l.number;
    auto const t = tokens(l.text);
    if (t[0] == "states" && t.size() == 2) {
      if (n)
        throw ParseError(l.number, "'states' given twice");
      n = parse_count(t[1], l.number);
      if (*n == 0)
        throw ParseError(l.number, "need at least one state");
    } else if (t[0] == "letters" && t.size() == 2) {
      if (k)
        throw ParseError(l.number, "'letters' given twice");
      k = parse_count(t[1], l.number);
      if (*k == 0)
        throw ParseError(l.number, "alphabet must be nonempty");
    } else if (t[0] == "trans" && t.size() == 5) {
      if (!n || !k)
        throw ParseError(l.number, "'trans' before 'states' and 'letters'");
      if (table.empty())
        table.resize(*n * *k);
      auto const q = parse_count(t[1], l.number), i = parse_count(t[2], l.number);
      auto const q2 = parse_count(t[3], l.number), j = parse_count(t[4], l.number);
      if (q >= *n || q2 >= *n)
        throw ParseError(l.number, "state out of range 0.." + std::to_string(*n - 1));
      if (i < 1 || i > *k || j < 1 || j > *k)
        throw ParseError(l.number, "letter out of range 1.." + std::to_string(*k));
      auto &slot = table[q * *k + (i - 1)];
      if (slot)
        throw ParseError(l.number, "transition (" + t[1] + ", " + t[2] + ") given twice");
      slot = std::pair{static_cast<State>(q2), static_cast<Point>(j - 1)};
    } else {
      throw ParseError(l.number, "unrecognized line '" + l.text + "'");
    }
  }
  if (!n || !k)
    throw ParseError(last_line, "missing 'states' or 'letters'");
  if (table.empty())
    table.resize(*n * *k);
  std::vector<State> delta;
  std::vector<Point> rho;
  for (std::size_t idx = 0; idx < table.size(); ++idx) {
    if (!table[idx])
      throw IncompleteTable(last_line, "missing transition (" + std::to_string(idx / *k) +
                                           ", " + std::to_string(idx % *k + 1) + ")");
    delta.push_back(table[idx]->first);
    rho.push_back(table[idx]->second);
  }
  return MealyAutomaton(*n, *k, std::move(delta), std::move(rho));
}

} // namespace detail

/// Parses any of the three formats (`mealy v1`, `cyclic v1`, `union v1`),
/// chosen by the first token.
inline MealyAutomaton parse_automaton(std::string_view text) {
  auto const lines = detail::significant_lines(text);
  if (lines.empty())
    throw ParseError(1, "empty automaton file");
  auto const kind = detail::tokens(lines.front().text).front();
  std::span<detail::Line const> body(lines.begin() + 1, lines.end());
  if (kind == "mealy") {
    detail::expect_header(lines.front(), "mealy");
    return detail::parse_full(body, lines.front().number);
  }
  if (kind == "cyclic") {
    detail::expect_header(lines.front(), "cyclic");
    return detail::parse_cyclic_block(body, lines.front().number);
  }
  if (kind == "union") {
    detail::expect_header(lines.front(), "union");
    std::vector<MealyAutomaton> parts;
    std::size_t i = 0;
    while (i < body.size()) {
      std::size_t j = i;
      while (j < body.size() && body[j].text != "---")
        ++j;
      if (j == i)
        throw ParseError(body[i].number, "empty union component");
      detail::expect_header(body[i], "cyclic");
      parts.push_back(detail::parse_cyclic_block(body.subspan(i + 1, j - i - 1),
                                                 body[i].number));
      if (parts.size() > 1 && parts.back().letters() != parts.front().letters())
        throw ParseError(body[i].number, "union components over different alphabets");
      i = j + 1;
      if (j + 1 == body.size())
        throw ParseError(body[j].number, "trailing '---'");
    }
    if (parts.empty())
      throw ParseError(lines.front().number, "union without components");
    return MealyAutomaton::disjoint_union(parts);
  }
  throw ParseError(lines.front().number, "unknown format '" + kind + "'");
}

namespace detail {

/// Consecutive runs [begin, end) on which delta is q -> q+1 wrapping, if the
/// whole automaton is such a union of runs.
inline std::optional<std::vector<std::pair<State, State>>>
consecutive_cycles(MealyAutomaton const &a) {
  if (!is_letter_independent(a) || !is_invertible(a))
    return std::nullopt;
  std::vector<std::pair<State, State>> runs;
  State begin = 0;
  while (begin < a.states()) {
    State end = begin;
    while (a.next(end, 0) == end + 1)
      ++end;
    if (a.next(end, 0) != begin)
      return std::nullopt;
    runs.emplace_back(begin, end + 1);
    begin = end + 1;
  }
  return runs;
}

inline void write_cyclic_block(std::ostream &os, MealyAutomaton const &a, State begin,
                               State end) {
  os << "cyclic v1\nletters " << a.letters() << '\n';
  for (State q = begin; q < end; ++q)
    os << "state " << (q - begin) << ' ' << format_cycles(a.production(q)) << '\n';
}

} // namespace detail

/// Most compact applicable form.
inline std::string serialize(MealyAutomaton const &a) {
  std::ostringstream os;
  if (auto runs = detail::consecutive_cycles(a)) {
    if (runs->size() == 1) {
      detail::write_cyclic_block(os, a, 0, static_cast<State>(a.states()));
    } else {
      os << "union v1\n";
      for (std::size_t r = 0; r < runs->size(); ++r) {
        if (r)
          os << "---\n";
        detail::write_cyclic_block(os, a, (*runs)[r].first, (*runs)[r].second);
      }
    }
    return os.str();
  }
  os << "mealy v1\nstates " << a.states() << "\nletters " << a.letters() << '\n';
  for (State q = 0; q < a.states(); ++q)
    for (Point i = 0; i < a.letters(); ++i)
      os << "trans " << q << ' ' << (i + 1) << ' ' << a.next(q, i) << ' '
         << (a.output(q, i) + 1) << '\n';
  return os.str();
}

} // namespace autgroup
