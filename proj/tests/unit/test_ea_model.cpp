#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "stea/ea_model.hpp"
#include "stea/metrics.hpp"
#include "stea/sim_io.hpp"
#include "stea/sim_matrix.hpp"
#include "stea/synthetic.hpp"
#include "test_util.hpp"

using namespace stea;

TEST(MarginLoss, GradientMatchesCentralDifferences) {
  // Five-entity toy KG in a joint table: 5 entities, 2 relations.
  const std::size_t dim = 4;
  Rng rng(21);
  std::vector<double> ent(5 * dim), rel(2 * dim);
  for (double& x : ent) x = rng.uniform(-1, 1);
  for (double& x : rel) x = rng.uniform(-1, 1);
  const std::vector<MarginSample> samples = {
      {0, 0, 1, 2, 1}, {1, 1, 2, 1, 4}, {3, 0, 4, 3, 0}, {2, 1, 0, 4, 0}};
  const double margin = 4.0;  // keeps every hinge active
  std::vector<double> ge(ent.size(), 0.0), gr(rel.size(), 0.0);
  margin_ranking_loss(ent, rel, dim, margin, samples, ge, gr);

  auto loss = [&] { return margin_ranking_loss(ent, rel, dim, margin, samples, {}, {}); };
  const double h = 1e-6;
  auto check = [&](std::vector<double>& table, const std::vector<double>& grad) {
    for (std::size_t i = 0; i < table.size(); ++i) {
      const double keep = table[i];
      table[i] = keep + h;
      const double up = loss();
      table[i] = keep - h;
      const double down = loss();
      table[i] = keep;
      const double fd = (up - down) / (2 * h);
      if (std::abs(fd) < 1e-7 && std::abs(grad[i]) < 1e-7) continue;
      EXPECT_LT(test::rel_error(fd, grad[i]), 1e-4) << "index " << i;
    }
  };
  check(ent, ge);
  check(rel, gr);
}

TEST(MarginLoss, InactiveHingeContributesNothing) {
  const std::size_t dim = 2;
  // Positive triple exact (h + r = t), negative far away.
  std::vector<double> ent = {0, 0, 1, 0, 10, 10}, rel = {1, 0};
  std::vector<MarginSample> s = {{0, 0, 1, 2, 2}};
  std::vector<double> ge(6, 0.0), gr(2, 0.0);
  EXPECT_EQ(margin_ranking_loss(ent, rel, dim, 1.0, s, ge, gr), 0.0);
  for (double g : ge) EXPECT_EQ(g, 0.0);
}

namespace {

TwinKgs twins(double perturbation = 0.0) {
  TwinKgOptions o;
  o.entities = 120;
  o.triples = 480;
  o.relations = 6;
  o.perturbation = perturbation;
  o.seed = 3;
  return make_twin_kgs(o);
}

}  // namespace

TEST(EmbeddingAligner, LossDecreasesAndVectorsStayUnit) {
  auto t = twins();
  const auto part = partition_mappings(t.links, 0.05, 1);
  EmbeddingAlignerParams p;
  p.dim = 32;
  EmbeddingAligner model(p);
  model.fit(t.pair, part.labelled, 50);
  const auto trace = model.loss_trace();
  ASSERT_EQ(trace.size(), 50u);
  EXPECT_LT(trace.back(), trace.front());
  for (EntityId e = 0; e < t.pair.source().num_entities(); ++e) {
    double n = 0;
    for (double x : model.source_vector(e)) n += x * x;
    EXPECT_NEAR(std::sqrt(n), 1.0, 1e-6);
  }
  for (EntityId e = 0; e < t.pair.target().num_entities(); ++e) {
    double n = 0;
    for (double x : model.target_vector(e)) n += x * x;
    EXPECT_NEAR(std::sqrt(n), 1.0, 1e-6);
  }
}

TEST(EmbeddingAligner, MergedEntitiesHaveSimilarityOne) {
  auto t = twins();
  const auto part = partition_mappings(t.links, 0.1, 2);
  EmbeddingAligner model(EmbeddingAlignerParams{16, 1.0, 2, 0.01, true, 1, 1});
  model.fit(t.pair, part.labelled, 3);
  const auto sim = model.similarities(Direction::SourceToTarget);
  for (const auto& l : part.labelled) EXPECT_NEAR(sim.at(l.source, l.target), 1.0, 1e-12);
}

TEST(EmbeddingAligner, SimilaritiesArePureAndBounded) {
  auto t = twins();
  EmbeddingAligner model(EmbeddingAlignerParams{16, 1.0, 2, 0.01, true, 1, 2});
  model.fit(t.pair, partition_mappings(t.links, 0.1, 2).labelled, 2);
  const auto a = model.similarities(Direction::SourceToTarget);
  const auto b = model.similarities(Direction::SourceToTarget);
  const auto r = model.similarities(Direction::TargetToSource);
  ASSERT_EQ(a.rows(), t.pair.source().num_entities());
  ASSERT_EQ(r.rows(), t.pair.target().num_entities());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      ASSERT_EQ(a.at(i, j), b.at(i, j));
      ASSERT_LE(std::abs(a.at(i, j)), 1.0 + 1e-12);
      ASSERT_NEAR(a.at(i, j), r.at(j, i), 1e-12);
    }
}

TEST(EmbeddingAligner, DeterministicForFixedSeed) {
  auto t = twins(0.1);
  const auto lab = partition_mappings(t.links, 0.1, 2).labelled;
  EmbeddingAligner a(EmbeddingAlignerParams{16, 1.0, 2, 0.01, true, 5, 1});
  EmbeddingAligner b(EmbeddingAlignerParams{16, 1.0, 2, 0.01, true, 5, 1});
  a.fit(t.pair, lab, 5);
  b.fit(t.pair, lab, 5);
  EXPECT_EQ(std::vector<double>(a.loss_trace().begin(), a.loss_trace().end()),
            std::vector<double>(b.loss_trace().begin(), b.loss_trace().end()));
  const auto sa = a.similarities(Direction::SourceToTarget);
  const auto sb = b.similarities(Direction::SourceToTarget);
  for (std::size_t i = 0; i < sa.rows(); ++i)
    for (std::size_t j = 0; j < sa.cols(); ++j) ASSERT_EQ(sa.at(i, j), sb.at(i, j));
}

TEST(EmbeddingAligner, PreconditionErrors) {
  auto t = twins();
  EmbeddingAligner model;
  EXPECT_THROW(model.similarities(Direction::SourceToTarget), std::logic_error);
  EXPECT_THROW(model.fit(t.pair, MappingSet{}, 5), std::invalid_argument);
  EXPECT_THROW(model.fit(t.pair, t.links, 0), std::invalid_argument);
}

TEST(EmbeddingAligner, AcceptsPseudoAugmentedTraining) {
  auto t = twins();
  const auto part = partition_mappings(t.links, 0.1, 2);
  EmbeddingAligner model(EmbeddingAlignerParams{16, 1.0, 2, 0.01, true, 1, 1});
  model.fit(t.pair, part.labelled, 2);
  MappingSet pseudo(MappingKind::Pseudo);
  for (std::size_t i = 0; i < 5; ++i) pseudo.insert(part.test.links()[i]);
  EXPECT_NO_THROW(model.fit(t.pair, unite(part.labelled, pseudo, MappingKind::Labelled), 2));
  EXPECT_EQ(model.loss_trace().size(), 4u);
}

TEST(SyntheticOracle, NoiseLevels) {
  std::vector<Link> v;
  for (EntityId i = 0; i < 100; ++i) v.push_back({i, (i + 13) % 100, 0.0});
  const MappingSet truth(MappingKind::Labelled, v);
  auto hit1 = [&](double noise) {
    SyntheticOracle o(truth, 100, 100, noise, 4);
    const auto sim = o.similarities(Direction::SourceToTarget);
    std::size_t ok = 0;
    for (const auto& l : truth) ok += sim.argmax(l.source) == l.target;
    return ok;
  };
  EXPECT_EQ(hit1(0.0), 100u);
  EXPECT_EQ(hit1(1.0), 0u);
  EXPECT_EQ(hit1(0.3), 70u);
  SyntheticOracle o(truth, 100, 100, 0.3, 4);
  EXPECT_EQ(o.noised_rows().size(), 30u);
  const auto f = o.similarities(Direction::SourceToTarget);
  const auto b = o.similarities(Direction::TargetToSource);
  for (std::size_t i = 0; i < 100; ++i)
    for (std::size_t j = 0; j < 100; ++j) {
      ASSERT_EQ(f.at(i, j), b.at(j, i));
      ASSERT_GE(f.at(i, j), 0.0);
      ASSERT_LE(f.at(i, j), 1.0);
    }
}

TEST(SimMatrix, ArgmaxTiesGoToLowestId) {
  const auto m = SimMatrix::dense(Direction::SourceToTarget, 2, 3, {0.5, 0.9, 0.9, 0.1, 0.1, 0.1});
  EXPECT_EQ(m.argmax(0), 1u);
  EXPECT_EQ(m.argmax(1), 0u);
  const auto top = m.top_k(0, 2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0].id, 1u);
  EXPECT_EQ(top[1].id, 2u);
}

TEST(SimMatrix, RejectsNonFinite) {
  EXPECT_THROW(SimMatrix::dense(Direction::SourceToTarget, 1, 2, {0.0, std::nan("")}),
               std::exception);
}

TEST(SimMatrix, SparseViewAgreesOnKeptEntries) {
  Rng rng(8);
  std::vector<double> v(5 * 7);
  for (double& x : v) x = rng.uniform(-1, 1);
  const auto d = SimMatrix::dense(Direction::SourceToTarget, 5, 7, v);
  const auto s = d.to_top_k(3);
  EXPECT_TRUE(s.is_sparse());
  for (std::size_t r = 0; r < 5; ++r) {
    EXPECT_EQ(s.argmax(r), d.argmax(r));
    for (const auto& e : s.sparse_row(r)) EXPECT_EQ(e.score, d.at(r, e.id));
    EXPECT_LE(s.fill(), s.sparse_row(r).back().score);
  }
}

TEST(SimIo, TextAndBinaryRoundTrip) {
  KgPair p = test::make_pair(3, 1, {{0, 0, 1}, {1, 0, 2}}, 4, 1, {{0, 0, 3}, {2, 0, 1}});
  Rng rng(2);
  std::vector<double> v(12);
  for (double& x : v) x = rng.uniform(-1, 1);
  const auto dense = SimMatrix::dense(Direction::SourceToTarget, 3, 4, v);
  const auto sparse = dense.transposed().to_top_k(2);
  for (const SimMatrix* m : {&dense, &sparse}) {
    for (auto fmt : {SimFileFormat::Text, SimFileFormat::Binary}) {
      std::stringstream buf;
      write_sim_matrix(buf, *m, p, fmt);
      const auto back = read_sim_matrix(buf, p, "mem");
      ASSERT_EQ(back.direction(), m->direction());
      ASSERT_EQ(back.is_sparse(), m->is_sparse());
      for (std::size_t r = 0; r < m->rows(); ++r)
        for (std::size_t c = 0; c < m->cols(); ++c) ASSERT_EQ(back.at(r, c), m->at(r, c));
    }
  }
}

TEST(SimIo, ShapeMismatchRejected) {
  KgPair p = test::make_pair(3, 1, {{0, 0, 1}}, 4, 1, {{0, 0, 3}});
  KgPair other = test::make_pair(2, 1, {{0, 0, 1}}, 4, 1, {{0, 0, 3}});
  const auto m = SimMatrix::dense(Direction::SourceToTarget, 3, 4, std::vector<double>(12, 0.1));
  std::stringstream buf;
  write_sim_matrix(buf, m, p, SimFileFormat::Text);
  EXPECT_THROW(read_sim_matrix(buf, other, "mem"), std::exception);
}

TEST(ImportedSimilarity, TransposesWhenNoBackward) {
  const auto m = SimMatrix::dense(Direction::SourceToTarget, 2, 3, {1, 2, 3, 4, 5, 6});
  ImportedSimilarity model(m);
  const auto b = model.similarities(Direction::TargetToSource);
  EXPECT_EQ(b.rows(), 3u);
  EXPECT_EQ(b.at(2, 1), 6.0);
}

TEST(TwinKgs, StructureAndLinks) {
  TwinKgOptions o;
  const auto t = make_twin_kgs(o);
  EXPECT_EQ(t.pair.source().num_entities(), 300u);
  EXPECT_EQ(t.pair.source().triples().size(), 1200u);
  EXPECT_EQ(t.links.size(), 300u);
  t.links.validate(t.pair);
  // With no perturbation every source triple has an aligned target triple.
  o.perturbation = 0.0;
  const auto exact = make_twin_kgs(o);
  std::vector<EntityId> to(300);
  for (const auto& l : exact.links) to[l.source] = l.target;
  for (const auto& tr : exact.pair.source().triples())
    EXPECT_FALSE(exact.pair.target().out_to(to[tr.head], to[tr.tail]).empty());
}
