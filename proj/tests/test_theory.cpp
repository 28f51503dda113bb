#include <gtest/gtest.h>

#include "autgroup/groups.hpp"
#include "autgroup/mealy.hpp"
#include "autgroup/rng.hpp"
#include "autgroup/theory.hpp"
#include "oracle.hpp"

using namespace autgroup;

namespace {

Permutation P(std::string_view s, std::size_t k) { return parse_cycles(s, k); }

MealyAutomaton load(std::string const &name) {
  return parse_automaton(oracle::read_data(name));
}

SignVector sv(std::string const &bits) {
  SignVector v;
  for (char c : bits)
    v.bits.push_back(c == '1');
  return v;
}

std::vector<Permutation> random_tuple(std::size_t n, std::size_t k, Rng &rng) {
  std::vector<Permutation> t;
  for (std::size_t i = 0; i < n; ++i)
    t.push_back(random_permutation(k, rng));
  return t;
}

void expect_sound(Witness const &w, CirculantGroup const &cg) {
  std::size_t len = 0;
  EXPECT_TRUE(is_single_cycle(w.cycle, &len));
  EXPECT_EQ(len, w.prime);
  EXPECT_TRUE(cg.chain.contains(w.element));
  auto const t = permutation_to_tuple(w.element, cg.k);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i == w.coordinate)
      EXPECT_EQ(t[i], w.cycle);
    else
      EXPECT_TRUE(t[i].is_identity());
  }
}

/// Letter-independent automaton from a target map and per-state outputs.
MealyAutomaton rooted(std::vector<State> const &targets, std::vector<Permutation> const &outs) {
  std::size_t const k = outs.front().degree();
  std::vector<State> delta;
  std::vector<Point> rho;
  for (std::size_t q = 0; q < targets.size(); ++q)
    for (Point i = 0; i < k; ++i) {
      delta.push_back(targets[q]);
      rho.push_back(outs[q][i]);
    }
  return MealyAutomaton(targets.size(), k, delta, rho);
}

} // namespace

TEST(TheoryTest, SignatureTuple) {
  auto const c2 = load("fig_cyclic2.mealy"), c3 = load("fig_cyclic3.mealy");
  EXPECT_EQ(signature_tuple({c2.production(0), c2.production(1)}).str(), "01");
  EXPECT_EQ(signature_tuple({c3.production(0), c3.production(1), c3.production(2)}).str(),
            "110");
  EXPECT_EQ(signature_tuple({P("(1,2,3)", 4), Permutation(4)}).str(), "00");
}

TEST(TheoryTest, CirculantRank) {
  EXPECT_EQ(circulant_rank(sv("0000")), 0u);
  EXPECT_EQ(sign_group_order(sv("0000")), 1);
  EXPECT_EQ(circulant_rank(sv("11")), 1u);
  EXPECT_EQ(sign_group_order(sv("11")), 2);
  EXPECT_EQ(circulant_rank(sv("110")), 2u);
  EXPECT_EQ(sign_group_order(sv("110")), 4);
}

TEST(TheoryTest, SignGroupOrderExhaustive) {
  for (std::size_t n = 1; n <= 8; ++n)
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      SignVector v;
      std::vector<int> bits;
      for (std::size_t i = 0; i < n; ++i) {
        v.bits.push_back(mask >> i & 1);
        bits.push_back(mask >> i & 1);
      }
      EXPECT_EQ(sign_group_order(v), oracle::sign_span_size(bits)) << v.str();
    }
}

TEST(TheoryTest, ShapeTagsForPairs) {
  EXPECT_EQ(shape_for_rank(circulant_rank(sv("01")), 2), ShapeTag::SymTimesSym);
  EXPECT_EQ(shape_for_rank(circulant_rank(sv("10")), 2), ShapeTag::SymTimesSym);
  EXPECT_EQ(shape_for_rank(circulant_rank(sv("11")), 2), ShapeTag::AltSemidirect);
  EXPECT_EQ(shape_for_rank(circulant_rank(sv("00")), 2), ShapeTag::AltTimesAlt);
}

TEST(TheoryTest, PredictedGroupCyclic) {
  auto const c2 = load("fig_cyclic2.mealy");
  auto const g2 = predicted_group_cyclic({c2.production(0), c2.production(1)});
  EXPECT_EQ(g2.shape_tag, ShapeTag::SymTimesSym);
  EXPECT_EQ(g2.predicted_order, 518400);
  EXPECT_TRUE(g2.hypotheses_ok);

  auto const c3 = load("fig_cyclic3.mealy");
  auto const g3 =
      predicted_group_cyclic({c3.production(0), c3.production(1), c3.production(2)});
  EXPECT_EQ(g3.shape_tag, ShapeTag::GeneralSemidirect);
  EXPECT_EQ(g3.sign_rank, 2u);
  EXPECT_EQ(g3.predicted_order, 186624000);

  // A 7-cycle and a 3-cycle generate A_7.
  auto const s = P("(1,2,3,4,5,6,7)", 7), t = P("(1,2,3)", 7);
  auto const ga = predicted_group_cyclic({s, t});
  EXPECT_EQ(ga.shape_tag, ShapeTag::AltTimesAlt);
  EXPECT_EQ(ga.predicted_order, pow_big(2520, 2));
  EXPECT_TRUE(ga.hypotheses_ok);
  EXPECT_EQ(CirculantGroup({s, t}).chain.order(), ga.predicted_order);

  auto const small = predicted_group_cyclic({P("(1,2)", 4), P("(1,2,3,4)", 4)});
  EXPECT_FALSE(small.hypotheses_ok);
  EXPECT_FALSE(small.reasons.empty());
}

TEST(TheoryTest, OrdersTuplePrimitive) {
  auto const o6 = P("(1,2,3,4,5,6)", 6), o4 = P("(1,2,3,4)", 6);
  EXPECT_TRUE(orders_tuple_primitive({o6, o6, o4}));
  EXPECT_FALSE(orders_tuple_primitive({o4, o6, o4, o6}));
  EXPECT_FALSE(orders_tuple_primitive({o6, P("(1,2)(3,4,5)", 6)}));
  EXPECT_TRUE(orders_tuple_primitive({o6}));
}

TEST(TheoryTest, CoprimeSplit) {
  auto const s = P("(1,2,3)", 5), t = P("(1,2,3,4,5)", 5);
  auto const certs = coprime_split(s, t);
  ASSERT_TRUE(certs);
  CirculantGroup const cg({s, t});
  bool found = false;
  for (auto const &c : *certs) {
    EXPECT_TRUE(cg.chain.contains(c.element));
    found |= c.element == cg.single(1, P("(1,4,2,5,3)", 5));
  }
  EXPECT_TRUE(found);
  EXPECT_FALSE(coprime_split(P("(1,2,3,4)", 6), P("(1,2,3,4,5,6)", 6)));

  auto const from_e = coprime_split(Permutation(5), t);
  ASSERT_TRUE(from_e);
  bool has_e_tau = false;
  for (auto const &c : *from_e)
    has_e_tau |= c.element == CirculantGroup({Permutation(5), t}).single(1, t);
  EXPECT_TRUE(has_e_tau);
}

TEST(TheoryTest, CoprimeSplitGivesDirectSquare) {
  Rng rng(1234);
  int fired = 0;
  for (int trial = 0; trial < 400 && fired < 25; ++trial) {
    std::size_t const k = 3 + uniform_below(rng, 5);
    auto const s = random_permutation(k, rng), t = random_permutation(k, rng);
    auto const certs = coprime_split(s, t);
    if (!certs)
      continue;
    ++fired;
    BigInt const h = group_order(PermGroup(k, {s, t}));
    EXPECT_EQ(CirculantGroup({s, t}).chain.order(), h * h);
  }
  EXPECT_GT(fired, 0);
}

TEST(TheoryTest, WitnessPrimeCycle2Examples) {
  auto const s = P("(1,2,3)", 5), t = P("(1,2,3,4,5)", 5);
  auto const w = witness_prime_cycle_2(s, t);
  EXPECT_EQ(w.prime, 5u);
  EXPECT_EQ(w.coordinate, 1u);
  expect_sound(w, CirculantGroup({s, t}));

  EXPECT_THROW(witness_prime_cycle_2(t, t), SameOrders);
  EXPECT_THROW(witness_prime_cycle_2(P("(1,2)", 5), P("(3,4,5)", 5)), HypothesisFailed);
}

TEST(TheoryTest, WitnessPrimeCycle2EdgeCaseFallsBackToKernel) {
  // Orders 5 and 7 at k = 7: the construction gives only 5- and 7-cycles.
  auto const s = P("(1,2,3,4,5)", 7), t = P("(1,2,3,4,5,6,7)", 7);
  EXPECT_TRUE(detail::is_exceptional_pattern(5, 7, 7));
  EXPECT_THROW(witness_prime_cycle_2(s, t), EdgeCase);
  CirculantGroup const cg({s, t});
  auto const w = kernel_witness(cg, 1);
  expect_sound(w, cg);
  EXPECT_TRUE(w.jordan_applicable);

  auto const rep = classify(MealyAutomaton::cyclic({s, t}));
  ASSERT_TRUE(rep.witness);
  EXPECT_EQ(rep.witness->route, "kernel");
  EXPECT_TRUE(rep.match);
}

TEST(TheoryTest, ExceptionalPatterns) {
  EXPECT_TRUE(detail::is_exceptional_pattern(25, 36, 7));
  EXPECT_TRUE(detail::is_exceptional_pattern(6, 7, 7));
  EXPECT_TRUE(detail::is_exceptional_pattern(1, 7, 7));
  EXPECT_TRUE(detail::is_exceptional_pattern(7, 1, 7));
  EXPECT_FALSE(detail::is_exceptional_pattern(5, 7, 8));
  EXPECT_FALSE(detail::is_exceptional_pattern(4, 7, 7));
}

TEST(TheoryTest, WitnessSoundnessOnRandomPairs) {
  Rng rng(2718);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 120; ++trial) {
    std::size_t const k = 5 + uniform_below(rng, 8);
    auto const s = random_permutation(k, rng), t = random_permutation(k, rng);
    if (order(s) == order(t))
      continue;
    auto const gen = recognize_generated({s, t});
    if (gen == SymAlt::Other)
      continue;
    CirculantGroup const cg({s, t});
    Witness w;
    try {
      w = witness_prime_cycle_2(cg, gen);
    } catch (EdgeCase const &) {
      w = kernel_witness(cg, 1);
    }
    expect_sound(w, cg);
    if (k > 5)
      EXPECT_TRUE(w.jordan_applicable) << format_cycles(s) << " " << format_cycles(t);
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(TheoryTest, WitnessPrimeCycleN) {
  auto const c3 = load("fig_cyclic3.mealy");
  std::vector<Permutation> const t3{c3.production(0), c3.production(1), c3.production(2)};
  CirculantGroup const cg3(t3);
  expect_sound(witness_prime_cycle_n(t3), cg3);

  auto const s = P("(1,2,3,4,5,6,7)", 7);
  EXPECT_THROW(witness_prime_cycle_n({s, s, s}), NotPrimitiveTuple);

  auto const a = P("(1,2,3)", 7), b = P("(1,2,3,4,5,6,7)", 7);
  EXPECT_EQ(witness_prime_cycle_n({a, b}).cycle, witness_prime_cycle_2(a, b).cycle);

  Rng rng(161);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 30; ++trial) {
    std::size_t const n = 3 + uniform_below(rng, 2), k = 7 + uniform_below(rng, 3);
    auto const t = random_tuple(n, k, rng);
    if (!orders_tuple_primitive(t) || recognize_generated(t) == SymAlt::Other)
      continue;
    CirculantGroup const cg(t);
    auto const w = witness_prime_cycle_n(cg, recognize_generated(t));
    expect_sound(w, cg);
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

TEST(TheoryTest, UnionExponent) {
  EXPECT_EQ(union_exponent({2, 2, 2}), 2);
  EXPECT_EQ(union_exponent({2, 3, 5}), 8);
  EXPECT_EQ(union_exponent({7}), 7);
  EXPECT_EQ(union_exponent({2, 3}), 4);
  EXPECT_THROW(union_exponent({}), PreconditionError);
  Rng rng(9);
  for (int t = 0; t < 300; ++t) {
    std::vector<std::size_t> sizes;
    for (std::size_t i = 0, m = 1 + uniform_below(rng, 4); i < m; ++i)
      sizes.push_back(1 + uniform_below(rng, 8));
    EXPECT_EQ(union_exponent(sizes), oracle::union_of_subgroups(sizes));
  }
}

TEST(TheoryTest, UnionSignRank) {
  auto const c2 = load("fig_cyclic2.mealy"), c3 = load("fig_cyclic3.mealy");
  EXPECT_EQ(union_sign_rank(std::vector<MealyAutomaton>{c2, c3}), 4u);
  EXPECT_EQ(union_sign_rank(std::vector<MealyAutomaton>{c3, c3}),
            circulant_rank(sv("110")));
  auto const even = MealyAutomaton::cyclic({P("(1,2,3)", 6), Permutation(6)});
  EXPECT_EQ(union_sign_rank(std::vector<MealyAutomaton>{even, even}), 0u);
  auto const other = MealyAutomaton::cyclic({P("(1,2)", 5)});
  EXPECT_THROW(union_sign_rank(std::vector<MealyAutomaton>{c2, other}), AlphabetMismatch);
}

TEST(TheoryTest, UnionSignRankBoundedByExponent) {
  Rng rng(10);
  for (int t = 0; t < 1000; ++t) {
    std::vector<SignVector> comps;
    std::vector<std::size_t> sizes;
    for (std::size_t i = 0, m = 1 + uniform_below(rng, 4); i < m; ++i) {
      std::size_t const n = 1 + uniform_below(rng, 8);
      SignVector v;
      for (std::size_t j = 0; j < n; ++j)
        v.bits.push_back(static_cast<std::uint8_t>(uniform_below(rng, 2)));
      comps.push_back(v);
      sizes.push_back(n);
    }
    EXPECT_LE(static_cast<long long>(union_sign_rank(comps)), union_exponent(sizes));
  }
}

TEST(TheoryTest, ClassifyExamples) {
  auto const r2 = classify(load("fig_cyclic2.mealy"));
  EXPECT_TRUE(r2.match);
  EXPECT_EQ(r2.verified_order, 518400);

  auto const ru = classify(load("union_cyclic2_cyclic3.mealy"));
  EXPECT_EQ(ru.structure, StructureClass(DisjointCycles{{2, 3}}));
  EXPECT_EQ(ru.verified_order, BigInt("34828517376000000"));
  EXPECT_EQ(ru.verified_order, pow_big(factorial(6), 6) / 4);

  auto const s = P("(1,6,7,3,12,5)(2,8)(9,11)", 12), t = P("(1,9,8)(3,5,7,6,10,11)(4,12)", 12);
  auto const rr = classify(MealyAutomaton::cyclic({s, t}));
  ASSERT_TRUE(rr.prediction);
  EXPECT_EQ(rr.prediction->shape_tag, ShapeTag::SymTimesSym);
  EXPECT_FALSE(rr.prediction->hypotheses_ok);
  EXPECT_TRUE(rr.match);
  EXPECT_EQ(rr.verified_order, factorial(12) * factorial(12));

  EXPECT_THROW(classify(load("mealy2.mealy")), NotLetterIndependent);
}

TEST(TheoryTest, ReportInvariant) {
  Rng rng(55);
  for (int t = 0; t < 60; ++t) {
    auto const a = MealyAutomaton::cyclic(random_tuple(1 + uniform_below(rng, 3),
                                                       1 + uniform_below(rng, 7), rng));
    auto const r = classify(a);
    EXPECT_EQ(r.match, r.prediction && r.verified_order == r.prediction->predicted_order);
  }
}

TEST(TheoryTest, LagrangeBoundForCyclicAutomata) {
  Rng rng(88);
  for (int t = 0; t < 150; ++t) {
    std::size_t const n = 1 + uniform_below(rng, 4), k = 1 + uniform_below(rng, 8);
    auto const tuple = random_tuple(n, k, rng);
    auto const bound = predicted_group_cyclic(tuple).predicted_order;
    EXPECT_EQ(bound % CirculantGroup(tuple).chain.order(), 0);
  }
}

TEST(TheoryTest, ExactnessUnderHypotheses) {
  Rng rng(606);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    std::size_t const k = 6 + uniform_below(rng, 4);
    auto const r = classify(MealyAutomaton::cyclic(random_tuple(2 + uniform_below(rng, 2), k, rng)));
    if (!r.prediction->hypotheses_ok)
      continue;
    EXPECT_TRUE(r.match);
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(TheoryTest, UnionBoundHolds) {
  Rng rng(303);
  for (int t = 0; t < 40; ++t) {
    std::size_t const k = 2 + uniform_below(rng, 4);
    std::vector<MealyAutomaton> parts;
    for (std::size_t i = 0, m = 2 + uniform_below(rng, 2); i < m; ++i)
      parts.push_back(MealyAutomaton::cyclic(random_tuple(1 + uniform_below(rng, 3), k, rng)));
    auto const r = classify(MealyAutomaton::disjoint_union(parts));
    ASSERT_TRUE(r.prediction);
    EXPECT_EQ(r.prediction->predicted_order % r.verified_order, 0);
  }
}

TEST(TheoryTest, PathAndTreePredictions) {
  auto const m1 = classify(load("mealy1.mealy"));
  ASSERT_TRUE(m1.prediction);
  EXPECT_TRUE(m1.match);
  EXPECT_EQ(m1.verified_order, 4);

  // Random paths and binary trees: the bound always holds, and is attained
  // once the containment checks pass.
  Rng rng(909);
  int contained = 0;
  for (int t = 0; t < 80; ++t) {
    std::size_t const k = 2 + uniform_below(rng, 5);
    std::vector<State> targets;
    if (t % 2) {
      std::size_t const n = 2 + uniform_below(rng, 3);
      for (State q = 0; q < n; ++q)
        targets.push_back(std::min<State>(q + 1, static_cast<State>(n - 1)));
    } else {
      targets = {0, 0, 0, 1, 1, 2, 2};
    }
    auto const r = classify(rooted(targets, random_tuple(targets.size(), k, rng)));
    ASSERT_TRUE(r.prediction);
    EXPECT_EQ(r.prediction->predicted_order % r.verified_order, 0);
    if (r.prediction->hypotheses_ok) {
      EXPECT_EQ(r.verified_order, r.prediction->predicted_order);
      EXPECT_TRUE(r.match);
      ++contained;
    }
  }
  EXPECT_GT(contained, 5);
}

TEST(TheoryTest, InversePairGroup) {
  auto const s = P("(1,2,3,4,5,6,7,8)", 8), t = P("(1,2,4)", 8);
  ASSERT_EQ(recognize_generated({s, t}), SymAlt::Symmetric);
  auto const r = inverse_pair_group(s, t);
  EXPECT_EQ(r.verified_order, pow_big(20160, 2) * 2);
  EXPECT_TRUE(r.match);

  auto const a = P("(1,2,3,4,5,6,7)", 7), b = P("(1,2,4)", 7);
  ASSERT_EQ(recognize_generated({a, b}), SymAlt::Alternating);
  EXPECT_EQ(inverse_pair_group(a, b).verified_order, pow_big(2520, 2));

  // i -> 4 - i (mod 6) inverts both, so the group is the graph of an automorphism.
  auto const g = inverse_pair_group(P("(1,2,3,4,5,6)", 6), P("(1,2,3)", 6));
  EXPECT_EQ(g.verified_order, 720);
  EXPECT_FALSE(g.match);

  EXPECT_EQ(inverse_pair_group(Permutation(5), Permutation(5)).verified_order, 1);
  EXPECT_THROW(inverse_pair_group(Permutation(4), Permutation(4)), PreconditionError);
}

TEST(TheoryTest, ReportSerialization) {
  auto const r = classify(load("fig_cyclic2.mealy"));
  auto const row = report_csv_row(r);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 9);
  auto const header = report_csv_header();
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), 9);
  EXPECT_EQ(row.substr(0, 19), "Cyclic(2),2,6,01,2,");
  EXPECT_NE(report_text(r).find("verified_order: 518400\n"), std::string::npos);
}
