#include <doctest.h>

#include <cmath>
#include <set>

#include "../support/fixture.hpp"
#include "noirkg/error.hpp"
#include "noirkg/graph_ops.hpp"
#include "noirkg/topics.hpp"

using namespace noirkg;

namespace {

UndirectedGraph path_graph() {
  KnowledgeGraph kg;
  kg.add_fact({"a", "r", "b"});
  kg.add_fact({"b", "s", "c"});
  kg.add_entity("isolated");
  return underlying_graph(kg, false);
}

}  // namespace

TEST_CASE("random walk shape") {
  const UndirectedGraph g = path_graph();
  Rng rng(3);
  const WalkDocument d = random_walk(g, 0, 4, rng);
  REQUIRE(d.tokens.size() == 9);
  CHECK(d.tokens[0] == "a");
  CHECK(d.tokens[1] == "r");
  CHECK(d.tokens[2] == "b");
  CHECK_THROWS_AS(random_walk(g, 3, 4, rng), Error);
  CHECK_THROWS_AS(random_walk(g, 0, 0, rng), Error);
  CHECK(walk_start_vertices(g) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("corpus generation") {
  const UndirectedGraph g = underlying_graph(test::fixture_graph(), false);
  const Corpus a = generate_corpus(g, 50, 10, 9);
  const Corpus b = generate_corpus(g, 50, 10, 9);
  CHECK(export_corpus(a) == export_corpus(b));
  CHECK(a.documents.size() == 50);
  CHECK(generate_corpus(g, 0, 10, 9).documents.empty());
  // Vocabulary holds vertices and relation labels.
  CHECK(a.token_index.count("child_of") + a.token_index.count("clue_of") + a.token_index.count("in_club") >= 1);
  // Prefix stability: document i depends only on (seed, i).
  const Corpus longer = generate_corpus(g, 80, 10, 9);
  for (std::size_t i = 0; i < 50; ++i) CHECK(longer.documents[i].tokens == a.documents[i].tokens);
}

TEST_CASE("tf-idf") {
  Corpus c;
  c.documents = {{{"x", "e", "y"}, "x", 1}, {{"x", "e", "x"}, "x", 1}};
  c.vocabulary = {"x", "e", "y"};
  c.token_index = {{"x", 0}, {"e", 1}, {"y", 2}};
  c.document_count = 2;
  const Matrix m = tfidf(c);
  // idf(x) = idf(e) = 1, idf(y) = ln(3/2) + 1.
  const double iy = std::log(1.5) + 1.0;
  const double n0 = std::sqrt(1 + 1 + iy * iy);
  CHECK(m(0, 0) == doctest::Approx(1 / n0));
  CHECK(m(2, 0) == doctest::Approx(iy / n0));
  CHECK(m(0, 1) == doctest::Approx(2 / std::sqrt(5.0)));
  CHECK(m(2, 1) == 0.0);
}

TEST_CASE("nmf") {
  Matrix x(6, 5);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 5; ++j) x(i, j) = double(i + 1) * double(j + 2);
  const NmfResult r = nmf(x, 1, 300, 4, 0.0);
  CHECK(r.residuals.back() / frobenius_norm(x) < 1e-6);
  for (std::size_t k = 1; k < r.residuals.size(); ++k) CHECK(r.residuals[k] <= r.residuals[k - 1] + 1e-9);
  CHECK(nmf(x, 1, 300, 4, 0.0).u.data == r.u.data);

  Matrix neg(2, 2, 1.0);
  neg(0, 1) = -1;
  CHECK_THROWS_AS(nmf(neg, 1, 10, 1), Error);
  CHECK_THROWS_AS(nmf(x, 0, 10, 1), Error);
  CHECK_THROWS_AS(nmf(x, 6, 10, 1), Error);
}

TEST_CASE("topics and coverage on the fixture") {
  const UndirectedGraph g = underlying_graph(test::fixture_graph(), false);
  const Corpus corpus = generate_corpus(g, 200, 20, 7);
  const TopicModel model = extract_topics(corpus, 5, 200, 7);
  const auto topics = top_terms(model, 4);
  REQUIRE(topics.size() == 5);
  for (const auto& t : topics) {
    CHECK(t.size() == 4);
    for (std::size_t k = 1; k < t.size(); ++k) CHECK(t[k - 1].weight >= t[k].weight);
  }
  const std::string csv = export_topics_csv(topics);
  CHECK(csv.rfind("topic_id,rank,token,weight\n1,1,", 0) == 0);

  const CoverageStats cov = coverage_stats(corpus, g);
  CHECK(cov.coverage == 1.0);
  CHECK(cov.mean_repetition > 0.0);

  const UndirectedGraph p = path_graph();
  const CoverageStats pc = coverage_stats(generate_corpus(p, 30, 3, 1), p);
  CHECK(pc.documents_per_vertex[3] == 0);
  CHECK(pc.coverage == doctest::Approx(0.75));
}
