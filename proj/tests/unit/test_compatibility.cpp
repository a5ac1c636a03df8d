#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stea/compatibility.hpp"
#include "test_util.hpp"

using namespace stea;
using test::make_pair;

namespace {

// Stats over one source and one target relation, as in the hand examples.
RelationStats hand_stats() {
  RelationStats s(1, 1);
  s.set_subrel(Side::Target, forward_rel(0), forward_rel(0), 0.8);  // Pr(r' sub r)
  s.set_inv_fun(Side::Source, forward_rel(0), 0.5);
  s.set_subrel(Side::Source, forward_rel(0), forward_rel(0), 0.9);  // Pr(r sub r')
  s.set_inv_fun(Side::Target, forward_rel(0), 0.4);
  return s;
}

RelationStats random_stats(Rng& rng, std::size_t src_rel, std::size_t tgt_rel) {
  RelationStats s(src_rel, tgt_rel);
  for (int side = 0; side < 2; ++side) {
    const Side sd = side == 0 ? Side::Source : Side::Target;
    const std::size_t n = 2 * (side == 0 ? src_rel : tgt_rel);
    const std::size_t m = 2 * (side == 0 ? tgt_rel : src_rel);
    for (DirRel a = 0; a < n; ++a) {
      s.set_inv_fun(sd, a, rng.uniform01());
      s.set_subrel_default(sd, a, 0.99 * rng.uniform01());
      for (DirRel b = 0; b < m; ++b)
        if (rng.uniform01() < 0.5) s.set_subrel(sd, a, b, 0.99 * rng.uniform01());
    }
  }
  return s;
}

std::vector<double> softmax(const std::vector<double>& v) {
  double m = *std::max_element(v.begin(), v.end()), z = 0;
  std::vector<double> out;
  for (double x : v) z += std::exp(x - m);
  for (double x : v) out.push_back(std::exp(x - m) / z);
  return out;
}

}  // namespace

TEST(RelationStats, InverseFunctionalityCounts) {
  // r(a,b), r(a,c): 2 distinct tails / 2 triples, 1 distinct head / 2 triples.
  KgPair p = make_pair(3, 1, {{0, 0, 1}, {0, 0, 2}}, 3, 1, {{0, 0, 1}});
  const auto s = estimate_relation_stats(p, Assignment(3));
  EXPECT_DOUBLE_EQ(s.inv_fun(Side::Source, forward_rel(0)), 1.0);
  EXPECT_DOUBLE_EQ(s.inv_fun(Side::Source, inverse_rel(0)), 0.5);
}

TEST(RelationStats, SmoothedSubRelation) {
  // r'(a', b') with a' -> a, b' -> b and r(a, b) in G.
  KgPair p = make_pair(2, 1, {{0, 0, 1}}, 2, 1, {{0, 0, 1}});
  const auto s = estimate_relation_stats(p, Assignment::from_labelled(2, test::links({{0, 0}, {1, 1}})));
  EXPECT_DOUBLE_EQ(s.subrel(Side::Target, forward_rel(0), forward_rel(0)), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.subrel(Side::Source, forward_rel(0), forward_rel(0)), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.subrel(Side::Target, inverse_rel(0), inverse_rel(0)), 2.0 / 3.0);
  // Orientation matters: r' is not evidence for r^-.
  EXPECT_DOUBLE_EQ(s.subrel(Side::Target, forward_rel(0), inverse_rel(0)), 1.0 / 3.0);
}

TEST(RelationStats, ZeroTrialsGivesPrior) {
  KgPair p = make_pair(2, 1, {{0, 0, 1}}, 2, 1, {{0, 0, 1}});
  const auto s = estimate_relation_stats(p, Assignment(2));
  EXPECT_DOUBLE_EQ(s.subrel(Side::Target, forward_rel(0), forward_rel(0)), 0.5);
  EXPECT_DOUBLE_EQ(s.subrel(Side::Source, inverse_rel(0), forward_rel(0)), 0.5);
}

TEST(RelationStats, HandBuiltMissingEntriesReadZero) {
  RelationStats s(2, 2);
  EXPECT_EQ(s.subrel(Side::Source, 3, 1), 0.0);
  EXPECT_THROW(s.set_subrel(Side::Source, 0, 0, 1.5), std::invalid_argument);
}

TEST(RelationStats, ValuesInUnitIntervalOnRandomGraphs) {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4 + rng.uniform_index(12);
    KgPair p = make_pair(n, 3, test::random_triples(rng, n, 3, 3 * n), n, 2,
                         test::random_triples(rng, n, 2, 3 * n));
    Assignment a(n);
    for (EntityId e = 0; e < n; ++e)
      if (rng.uniform01() < 0.7) a.assign(e, static_cast<EntityId>(rng.uniform_index(n)));
    const auto s = estimate_relation_stats(p, a);
    for (DirRel x = 0; x < 6; ++x) {
      EXPECT_GE(s.inv_fun(Side::Source, x), 0.0);
      EXPECT_LE(s.inv_fun(Side::Source, x), 1.0);
      for (DirRel y = 0; y < 4; ++y) {
        EXPECT_GT(s.subrel(Side::Source, x, y), 0.0);
        EXPECT_LT(s.subrel(Side::Source, x, y), 1.0);
        EXPECT_GT(s.subrel(Side::Target, y, x), 0.0);
        EXPECT_LT(s.subrel(Side::Target, y, x), 1.0);
      }
    }
  }
}

TEST(RelationStats, DuplicateTriplesDoNotChangeInverseFunctionality) {
  const std::vector<test::TripleSpec> base = {{0, 0, 1}, {0, 0, 2}, {3, 0, 2}, {1, 1, 0}};
  std::vector<test::TripleSpec> doubled = base;
  doubled.insert(doubled.end(), base.begin(), base.end());
  KgPair a = make_pair(4, 2, base, 2, 1, {{0, 0, 1}});
  KgPair b = make_pair(4, 2, doubled, 2, 1, {{0, 0, 1}});
  EXPECT_EQ(b.source().duplicates_dropped(), base.size());
  const auto sa = estimate_relation_stats(a, Assignment(4));
  const auto sb = estimate_relation_stats(b, Assignment(4));
  for (DirRel r = 0; r < 4; ++r)
    EXPECT_EQ(sa.inv_fun(Side::Source, r), sb.inv_fun(Side::Source, r));
}

TEST(RelationStats, SwappedExchangesSides) {
  KgPair p = make_pair(3, 1, {{0, 0, 1}, {0, 0, 2}}, 3, 2, {{0, 1, 1}});
  const Assignment a = Assignment::from_labelled(3, test::links({{0, 0}, {1, 1}}));
  const auto s = estimate_relation_stats(p, a);
  const auto w = s.swapped();
  EXPECT_EQ(w.inv_fun(Side::Target, inverse_rel(0)), s.inv_fun(Side::Source, inverse_rel(0)));
  EXPECT_EQ(w.subrel(Side::Source, forward_rel(1), forward_rel(0)),
            s.subrel(Side::Target, forward_rel(1), forward_rel(0)));
}

TEST(Assignment, LabelledEntriesAreFixed) {
  Assignment a = Assignment::from_labelled(3, test::links({{0, 2}}));
  EXPECT_TRUE(a.labelled(0));
  EXPECT_THROW(a.assign(0, 1), std::logic_error);
  EXPECT_NO_THROW(a.assign(0, 2));
  a.assign(1, 0);
  EXPECT_FALSE(a.labelled(1));
  EXPECT_EQ(a.inverse(3)[2], (std::vector<EntityId>{0}));
  EXPECT_EQ(a.inverse(3)[0], (std::vector<EntityId>{1}));
}

TEST(LocalCompatibility, OneMatchedPair) {
  // r(e0, e1) in G; r'(t0, t1) in G'; y_1 = t1.
  KgPair p = make_pair(2, 1, {{0, 0, 1}}, 2, 1, {{0, 0, 1}});
  Assignment a(2);
  a.assign(1, 1);
  EXPECT_NEAR(local_compatibility(p, hand_stats(), a, 0, 0), 0.616, 1e-12);
}

TEST(LocalCompatibility, TwoMatchedPairs) {
  KgPair p = make_pair(3, 1, {{0, 0, 1}, {0, 0, 2}}, 3, 1, {{0, 0, 1}, {0, 0, 2}});
  Assignment a(3);
  a.assign(1, 1);
  a.assign(2, 2);
  const double g = local_compatibility(p, hand_stats(), a, 0, 0);
  EXPECT_NEAR(g, 0.852544, 1e-12);
  EXPECT_GT(g, 0.616);
}

TEST(LocalCompatibility, NoMatchesGiveZero) {
  KgPair p = make_pair(3, 1, {{0, 0, 1}, {0, 0, 2}}, 3, 1, {{0, 0, 1}, {0, 0, 2}});
  Assignment a(3);
  a.assign(1, 2);
  EXPECT_EQ(local_compatibility(p, hand_stats(), a, 0, 1), 0.0);
  EXPECT_EQ(local_compatibility(p, hand_stats(), Assignment(3), 0, 0), 0.0);
}

TEST(LocalCompatibility, IncomingTriplesUseInverseRelations) {
  // r(e1, e0) and r'(t1, t0): matched through r^- and r'^-.
  KgPair p = make_pair(2, 1, {{1, 0, 0}}, 2, 1, {{1, 0, 0}});
  RelationStats s(1, 1);
  s.set_subrel(Side::Target, inverse_rel(0), inverse_rel(0), 0.5);
  s.set_inv_fun(Side::Source, inverse_rel(0), 1.0);
  Assignment a(2);
  a.assign(1, 1);
  EXPECT_NEAR(local_compatibility(p, s, a, 0, 0), 0.5, 1e-15);
}

TEST(LocalCompatibility, RangeAndMonotonicityOnRandomInstances) {
  Rng rng(1000);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(7), m = 2 + rng.uniform_index(7);
    const std::size_t rs = 1 + rng.uniform_index(3), rt = 1 + rng.uniform_index(3);
    KgPair p = make_pair(n, rs, test::random_triples(rng, n, rs, 1 + rng.uniform_index(3 * n)), m,
                         rt, test::random_triples(rng, m, rt, 1 + rng.uniform_index(3 * m)));
    const auto stats = random_stats(rng, rs, rt);
    const EntityId e = static_cast<EntityId>(rng.uniform_index(n));
    const EntityId c = static_cast<EntityId>(rng.uniform_index(m));
    Assignment a(n);
    std::vector<EntityId> order(n);
    for (EntityId i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(std::span<EntityId>(order));
    double prev = local_compatibility(p, stats, a, e, c);
    ASSERT_GE(prev, 0.0);
    ASSERT_LT(prev, 1.0);
    for (EntityId x : order) {
      if (x == e) continue;
      a.assign(x, static_cast<EntityId>(rng.uniform_index(m)));
      const double g = local_compatibility(p, stats, a, e, c);
      ASSERT_GE(g, 0.0);
      ASSERT_LT(g, 1.0);
      ASSERT_GE(g, prev - 1e-15) << "trial " << trial;
      prev = g;
    }
  }
}

TEST(Conditional, ProbabilitiesAreSoftmaxOfFactorSums) {
  EXPECT_NEAR(softmax({0.6, 0.1})[0], 0.62246, 1e-5);
  EXPECT_NEAR(softmax({0.6, 0.1})[1], 0.37754, 1e-5);
  KgPair p = make_pair(3, 1, {{0, 0, 1}, {2, 0, 0}}, 3, 1, {{0, 0, 1}});
  Assignment a(3);
  a.assign(1, 1);
  a.assign(2, 2);
  const std::vector<EntityId> cands = {0, 1, 2};
  const auto row = conditional_distribution(p, hand_stats(), a, 0, cands);
  const auto expect = softmax(row.factor_sums);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(row.probs[i], expect[i], 1e-15);
  EXPECT_NEAR(row.factor_sums[0], 0.616, 1e-12);
  EXPECT_GT(row.probs[0], row.probs[2]);
  EXPECT_EQ(row.probs[1], row.probs[2]);
}

TEST(Conditional, IsolatedEntityIsUniform) {
  KgPair p = make_pair(3, 1, {{0, 0, 1}}, 3, 1, {{0, 0, 1}});
  Assignment a(3);
  a.assign(0, 0);
  a.assign(1, 1);
  const std::vector<EntityId> cands = {0, 1, 2};
  const auto row = conditional_distribution(p, hand_stats(), a, 2, cands);
  for (double x : row.probs) EXPECT_NEAR(x, 1.0 / 3.0, 1e-15);
}

namespace {

struct TinyInstance {
  KgPair pair;
  RelationStats stats;
  Assignment fixed;
  std::vector<EntityId> free;
  std::vector<std::vector<EntityId>> grids;
};

TinyInstance random_tiny(Rng& rng, std::size_t max_free, std::size_t max_cands) {
  TinyInstance t;
  const std::size_t n = 3 + rng.uniform_index(4), m = 3 + rng.uniform_index(3);
  const std::size_t rs = 1 + rng.uniform_index(2), rt = 1 + rng.uniform_index(2);
  t.pair = make_pair(n, rs, test::random_triples(rng, n, rs, n + rng.uniform_index(2 * n)), m, rt,
                     test::random_triples(rng, m, rt, m + rng.uniform_index(2 * m)));
  t.stats = random_stats(rng, rs, rt);
  std::vector<EntityId> order(n);
  for (EntityId i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(std::span<EntityId>(order));
  const std::size_t n_free = 1 + rng.uniform_index(std::min(max_free, n - 1));
  t.fixed = Assignment(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n_free) {
      t.free.push_back(order[i]);
      std::vector<EntityId> cands(m);
      for (EntityId c = 0; c < m; ++c) cands[c] = c;
      rng.shuffle(std::span<EntityId>(cands));
      cands.resize(1 + rng.uniform_index(std::min(max_cands, m)));
      t.grids.push_back(cands);
    } else if (rng.uniform01() < 0.8) {
      t.fixed.assign(order[i], static_cast<EntityId>(rng.uniform_index(m)), true);
    }
  }
  return t;
}

}  // namespace

TEST(Conditional, MatchesEnumeratedJoint) {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const TinyInstance t = random_tiny(rng, 4, 4);
    const JointTable table = joint_bruteforce(t.pair, t.stats, t.fixed, t.free, t.grids);
    double total = 0.0;
    for (double x : table.probs()) total += x;
    ASSERT_NEAR(total, 1.0, 1e-12);
    for (int probe = 0; probe < 5; ++probe) {
      std::vector<std::size_t> index(t.free.size());
      for (std::size_t i = 0; i < index.size(); ++i) index[i] = rng.uniform_index(t.grids[i].size());
      for (std::size_t which = 0; which < t.free.size(); ++which) {
        Assignment a = t.fixed;
        for (std::size_t i = 0; i < t.free.size(); ++i)
          if (i != which) a.assign(t.free[i], t.grids[i][index[i]]);
        const auto row =
            conditional_distribution(t.pair, t.stats, a, t.free[which], t.grids[which]);
        const auto oracle = table.conditional(which, index);
        for (std::size_t c = 0; c < oracle.size(); ++c)
          ASSERT_NEAR(row.probs[c], oracle[c], 1e-9) << "trial " << trial;
      }
    }
  }
}

TEST(Joint, SmallTablesAreNormalized) {
  KgPair p = make_pair(3, 1, {{0, 0, 1}, {1, 0, 2}}, 3, 1, {{0, 0, 1}, {1, 0, 2}});
  const Assignment fixed = Assignment::from_labelled(3, test::links({{1, 1}}));
  const std::vector<EntityId> one = {0};
  const std::vector<std::vector<EntityId>> g1 = {{0, 2}};
  const auto t1 = joint_bruteforce(p, hand_stats(), fixed, one, g1);
  EXPECT_EQ(t1.probs().size(), 2u);
  EXPECT_NEAR(t1.probs()[0] + t1.probs()[1], 1.0, 1e-12);
  EXPECT_GT(t1.probs()[0], t1.probs()[1]);
  const std::vector<EntityId> two = {0, 2};
  const std::vector<std::vector<EntityId>> g2 = {{0, 1, 2}, {0, 1, 2}};
  const auto t2 = joint_bruteforce(p, hand_stats(), fixed, two, g2);
  EXPECT_EQ(t2.probs().size(), 9u);
  double s = 0;
  for (double x : t2.probs()) s += x;
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(Joint, StateSpaceCap) {
  KgPair p = make_pair(3, 1, {{0, 0, 1}}, 3, 1, {{0, 0, 1}});
  const std::vector<EntityId> free = {0, 1, 2};
  const std::vector<std::vector<EntityId>> grids(3, {0, 1, 2});
  EXPECT_THROW(joint_bruteforce(p, hand_stats(), Assignment(3), free, grids, 20),
               std::invalid_argument);
}

namespace {

std::vector<ProbRow> q_rows_for(Rng& rng, const std::vector<EntityId>& sources, std::size_t m) {
  std::vector<ProbRow> rows;
  for (EntityId u : sources) {
    std::vector<double> sims(m);
    for (double& s : sims) s = rng.uniform(-1, 1);
    rows.push_back(transform(u, sims, {0.0, 3.0, 1.0}));
  }
  return rows;
}

}  // namespace

TEST(QStar, FullWidthEqualsConditional) {
  Rng rng(8);
  const std::size_t n = 8, m = 8;
  KgPair p = make_pair(n, 2, test::random_triples(rng, n, 2, 20), m, 2,
                       test::random_triples(rng, m, 2, 20));
  const auto stats = random_stats(rng, 2, 2);
  const MappingSet labelled = test::links({{0, 0}, {1, 1}});
  const auto q = q_rows_for(rng, {2, 3, 4, 5, 6, 7}, m);
  QStarOptions o;
  o.top_k = m;
  const auto qs = derive_q_star(p, stats, labelled, q, o);
  const Assignment a = make_assignment(n, labelled, q);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto full = conditional_distribution(p, stats, a, q[i].source, q[i].candidates);
    for (std::size_t c = 0; c < m; ++c)
      EXPECT_NEAR(qs[i].to_prob_row().prob_of(c), full.probs[c], 1e-15);
  }
}

TEST(QStar, TruncationRenormalizesTopK) {
  EXPECT_DOUBLE_EQ(0.5 / 0.8, 0.625);
  EXPECT_DOUBLE_EQ(0.3 / 0.8, 0.375);
  Rng rng(12);
  const std::size_t n = 6, m = 5;
  KgPair p = make_pair(n, 1, test::random_triples(rng, n, 1, 14), m, 1,
                       test::random_triples(rng, m, 1, 12));
  const auto stats = random_stats(rng, 1, 1);
  const MappingSet labelled = test::links({{0, 0}});
  const auto q = q_rows_for(rng, {1, 2, 3, 4, 5}, m);
  QStarOptions o3, o2;
  o3.top_k = 3;
  o2.top_k = 2;
  const auto q3 = derive_q_star(p, stats, labelled, q, o3);
  const auto q2 = derive_q_star(p, stats, labelled, q, o2);
  for (std::size_t i = 0; i < q.size(); ++i) {
    ASSERT_EQ(q2[i].candidates.size(), 2u);
    // Top-2 by q are the first two entries of the top-3 list.
    EXPECT_EQ(q2[i].candidates[0], q3[i].candidates[0]);
    EXPECT_EQ(q2[i].candidates[1], q3[i].candidates[1]);
    const double mass = q3[i].probs[0] + q3[i].probs[1];
    EXPECT_NEAR(q2[i].probs[0], q3[i].probs[0] / mass, 1e-12);
    EXPECT_NEAR(q2[i].probs[1], q3[i].probs[1] / mass, 1e-12);
  }
}

TEST(QStar, OrderAndThreadInvariant) {
  Rng rng(99);
  const std::size_t n = 30, m = 30;
  KgPair p = make_pair(n, 3, test::random_triples(rng, n, 3, 90), m, 3,
                       test::random_triples(rng, m, 3, 90));
  const auto stats = random_stats(rng, 3, 3);
  const MappingSet labelled = test::links({{0, 0}, {1, 1}, {2, 2}});
  std::vector<EntityId> sources;
  for (EntityId u = 3; u < n; ++u) sources.push_back(u);
  auto q = q_rows_for(rng, sources, m);
  QStarOptions one, many;
  many.threads = 4;
  const auto a = derive_q_star(p, stats, labelled, q, one);
  const auto b = derive_q_star(p, stats, labelled, q, many);
  std::reverse(q.begin(), q.end());
  const auto c = derive_q_star(p, stats, labelled, q, one);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].probs, b[i].probs);
    const auto& rc = c[a.size() - 1 - i];
    EXPECT_EQ(a[i].source, rc.source);
    EXPECT_EQ(a[i].candidates, rc.candidates);
    EXPECT_EQ(a[i].probs, rc.probs);
  }
}

TEST(QStar, LabelledRowsAreClamped) {
  KgPair p = make_pair(2, 1, {{0, 0, 1}}, 2, 1, {{0, 0, 1}});
  const MappingSet labelled = test::links({{0, 1}});
  std::vector<ProbRow> q = {transform(0, std::vector<double>{0.9, 0.1}, {})};
  const auto qs = derive_q_star(p, hand_stats(), labelled, q);
  ASSERT_EQ(qs[0].candidates, (std::vector<EntityId>{1}));
  EXPECT_EQ(qs[0].probs[0], 1.0);
}

// Both plots: e1 father-of e2, e3 friend-of e2 in G, mirrored by e'1, e'3
// around e'2 in G'. e'4 is an extra target entity with no such neighbours.
TEST(QStar, PairedEvidenceBeatsUnsupportedCandidate) {
  // Entities: e1 = 0, e2 = 1, e3 = 2; e'1 = 0, e'2 = 1, e'3 = 2, e'4 = 3.
  // Relations: father = 0, friend = 1.
  KgPair p = make_pair(3, 2, {{0, 0, 1}, {2, 1, 1}}, 4, 2, {{0, 0, 1}, {2, 1, 1}, {3, 1, 0}});
  const MappingSet known = test::links({{0, 0}, {2, 2}});
  const auto stats = estimate_relation_stats(p, Assignment::from_labelled(3, known));
  Assignment a = Assignment::from_labelled(3, known);
  const double g_a = local_compatibility(p, stats, a, 1, 1);  // y_2 = e'2
  const double g_b = local_compatibility(p, stats, a, 1, 3);  // y_2 = e'4
  EXPECT_GT(g_a, g_b);
  EXPECT_EQ(g_b, 0.0);

  // The same ordering survives into q*, with q indifferent between e'2 and e'4.
  std::vector<ProbRow> q(1);
  q[0].source = 1;
  q[0].candidates = {1, 3};
  q[0].probs = {0.5, 0.5};
  const auto qs = derive_q_star(p, stats, known, q);
  EXPECT_GT(qs[0].to_prob_row().prob_of(1), qs[0].to_prob_row().prob_of(3));
}

TEST(QStar, SweepsKnobRecomputesAgainstNewArgmax) {
  Rng rng(5);
  const std::size_t n = 12;
  KgPair p = make_pair(n, 2, test::random_triples(rng, n, 2, 30), n, 2,
                       test::random_triples(rng, n, 2, 30));
  const auto stats = random_stats(rng, 2, 2);
  const MappingSet labelled = test::links({{0, 0}});
  std::vector<EntityId> sources;
  for (EntityId u = 1; u < n; ++u) sources.push_back(u);
  const auto q = q_rows_for(rng, sources, n);
  QStarOptions two;
  two.sweeps = 2;
  const auto once = derive_q_star(p, stats, labelled, q);
  const auto twice = derive_q_star(p, stats, labelled, q, two);
  // Second sweep equals one sweep against the assignment from the first.
  Assignment a = make_assignment(n, labelled, q);
  for (const auto& r : once) a.assign(r.source, r.to_prob_row().argmax());
  for (std::size_t i = 0; i < once.size(); ++i) {
    const auto expect = conditional_distribution(p, stats, a, once[i].source, once[i].candidates);
    EXPECT_EQ(twice[i].probs, expect.probs);
  }
}

TEST(QStarDebug, WritesLabelledRows) {
  KgPair p = make_pair(2, 1, {{0, 0, 1}}, 2, 1, {{0, 0, 1}});
  std::vector<ConditionalRow> rows = {{0, {1, 0}, {0.6, 0.1}, {0.62, 0.38}}};
  std::ostringstream out;
  write_q_star_debug(out, p, rows);
  EXPECT_EQ(out.str(), "s0\tt1\t0.6\t0.62\ns0\tt0\t0.1\t0.38\n");
}
