#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "../support/fixture.hpp"
#include "noirkg/embedding.hpp"
#include "noirkg/error.hpp"

using namespace noirkg;

namespace {

EmbeddingModel tiny_model(std::uint64_t seed) {
  KnowledgeGraph kg;
  kg.add_fact({"e0", "r0", "e1"});
  kg.add_fact({"e2", "r1", "e3"});
  kg.add_fact({"e4", "r0", "e0"});
  return init_model(kg, 8, seed);
}

double norm(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("init") {
  const EmbeddingModel m = init_model(test::fixture_graph(), 16, 3);
  CHECK(m.entities().size() == 15);
  CHECK(m.relations().size() == 9);
  const double bound = 6.0 / std::sqrt(16.0);
  for (std::size_t i = 0; i < m.entities().size(); ++i) CHECK(norm(m.entity(i)) == doctest::Approx(1.0));
  for (std::size_t i = 0; i < m.relations().size(); ++i) CHECK(norm(m.relation(i)) == doctest::Approx(1.0));
  for (double x : m.entity_data()) CHECK(std::abs(x) <= bound);
  CHECK(init_model(test::fixture_graph(), 16, 3) == m);
  CHECK_FALSE(init_model(test::fixture_graph(), 16, 4) == m);
}

TEST_CASE("score is the translation residual") {
  EmbeddingModel m(2, {"a", "b"}, {"r"});
  m.entity_data() = {1, 0, 0, 1};
  m.relation_data() = {0, 0};
  CHECK(score_triple(m, "a", "r", "b") == doctest::Approx(std::sqrt(2.0)));
  m.relation_data() = {-1, 1};
  CHECK(score_triple(m, "a", "r", "b") == doctest::Approx(0.0));
  CHECK_THROWS_AS(score_triple(m, "a", "r", "zzz"), Error);
}

TEST_CASE("analytic gradient matches finite differences") {
  for (LossVariant variant : {LossVariant::hinge, LossVariant::paper_literal}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      EmbeddingModel m = tiny_model(seed);
      const std::vector<TrainingPair> pairs{{{0, 0, 1}, {0, 0, 3}}, {{2, 1, 3}, {4, 1, 3}}};
      const double margin = 5.0;  // keeps every hinge active
      Gradient g(m);
      accumulate_gradient(m, pairs, variant, margin, g);
      auto total = [&](const EmbeddingModel& mm) {
        double s = 0;
        for (const auto& p : pairs) s += pair_loss(mm, p, variant, margin);
        return s;
      };
      const double h = 1e-5;
      for (std::size_t i = 0; i < m.entity_data().size(); ++i) {
        const double x = m.entity_data()[i];
        m.entity_data()[i] = x + h;
        const double up = total(m);
        m.entity_data()[i] = x - h;
        const double down = total(m);
        m.entity_data()[i] = x;
        CHECK(g.entity[i] == doctest::Approx((up - down) / (2 * h)).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("hinge is flat when the margin is satisfied") {
  EmbeddingModel m(1, {"a", "b", "c"}, {"r"});
  m.entity_data() = {0, 0, 10};
  m.relation_data() = {0};
  const TrainingPair pair{{0, 0, 1}, {0, 0, 2}};
  CHECK(pair_loss(m, pair, LossVariant::hinge, 1.0) == 0.0);
  Gradient g(m);
  accumulate_gradient(m, std::span(&pair, 1), LossVariant::hinge, 1.0, g);
  for (double x : g.entity) CHECK(x == 0.0);
  CHECK(pair_loss(m, pair, LossVariant::paper_literal, 1.0) == doctest::Approx(-10.0));
}

TEST_CASE("negative sampling") {
  TripleSet known;
  known.insert({0, 0, 1});
  known.insert({0, 0, 2});
  const NegativeSampler sampler(50, known);
  Rng rng(11);
  int heads = 0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    bool head = false;
    const Triple t = sampler.sample({0, 0, 1}, rng, &head);
    heads += head;
    CHECK_FALSE(known.contains(t));
    if (head) {
      CHECK(t.tail == 1);
      CHECK(t.head != 0);
    } else {
      CHECK(t.head == 0);
      CHECK(t.tail != 1);
    }
  }
  CHECK(std::abs(heads / double(draws) - 0.5) < 0.03);
}

TEST_CASE("training is deterministic and reduces the loss") {
  const KnowledgeGraph kg = test::fixture_graph();
  TrainConfig c;
  c.epochs = 60;
  const auto a = train(init_model(kg, 20, c.seed), kg, c);
  const auto b = train(init_model(kg, 20, c.seed), kg, c);
  CHECK(a.model == b.model);
  CHECK(a.loss_history == b.loss_history);
  CHECK(a.loss_history.size() == 60);
  CHECK(a.loss_history.back() < a.loss_history.front());
  for (std::size_t i = 0; i < a.model.entities().size(); ++i) CHECK(norm(a.model.entity(i)) == doctest::Approx(1.0));
}

TEST_CASE("zero learning rate leaves the model untouched") {
  const KnowledgeGraph kg = test::fixture_graph();
  TrainConfig c;
  c.epochs = 5;
  c.learning_rate = 0.0;
  const EmbeddingModel start = init_model(kg, 10, 1);
  const auto r = train(start, kg, c);
  // Renormalizing unit vectors is a no-op up to rounding.
  for (std::size_t i = 0; i < start.entity_data().size(); ++i)
    CHECK(r.model.entity_data()[i] == doctest::Approx(start.entity_data()[i]).epsilon(1e-12));
  CHECK(r.model.relation_data() == start.relation_data());
  for (double s : r.positive_score_history) CHECK(s == r.positive_score_history.front());
}

TEST_CASE("train config") {
  const TrainConfig c = parse_train_config("# tuned\nepochs=10\nlearning_rate = 0.5\nloss=paper_literal\n");
  CHECK(c.epochs == 10);
  CHECK(c.learning_rate == 0.5);
  CHECK(c.loss == LossVariant::paper_literal);
  CHECK(c.margin == 1.0);
  std::string lines = c.describe();
  std::replace(lines.begin(), lines.end(), ' ', '\n');
  CHECK(parse_train_config(lines).describe() == c.describe());
  CHECK_THROWS_AS(parse_train_config("colour=blue\n"), Error);
  TrainConfig bad;
  bad.epochs = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("embedding csv round trip") {
  const EmbeddingModel m = init_model(test::fixture_graph(), 7, 2);
  const std::string csv = export_embedding_csv(m);
  CHECK(csv.rfind("label,kind,c1,c2,c3,c4,c5,c6,c7\n", 0) == 0);
  CHECK(parse_embedding_csv("# header\n" + csv) == m);
  CHECK_THROWS_AS(parse_embedding_csv("label,kind,c1\nx,entity\n"), Error);
}
