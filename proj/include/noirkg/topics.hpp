#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "noirkg/graph_ops.hpp"
#include "noirkg/random.hpp"

namespace noirkg {

// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Frobenius norm of a - b*c.
double residual_norm(const Matrix& a, const Matrix& b, const Matrix& c);
double frobenius_norm(const Matrix& a);

// Tokens alternate vertex and relation labels: v0 e1 v1 ... e_l v_l.
struct WalkDocument {
  std::vector<std::string> tokens;
  std::string start_vertex;
  std::size_t length = 0;
};

struct Corpus {
  std::vector<WalkDocument> documents;
  std::vector<std::string> vocabulary;  // first-seen order
  std::unordered_map<std::string, std::size_t> token_index;
  std::size_t document_count = 0;
  std::size_t walk_length = 0;
  std::uint64_t seed = 0;
};

// Simple random walk: the next vertex is uniform over neighbors, and the
// edge token is the predicate of a fact drawn uniformly from the edge's
// supporting facts. Throws Error when `start` has no neighbors.
WalkDocument random_walk(const UndirectedGraph& g, std::size_t start, std::size_t steps, Rng& rng);

// Vertices a walk may start from (degree >= 1).
std::vector<std::size_t> walk_start_vertices(const UndirectedGraph& g);

// `n` walks of `steps` steps. Document i draws its start vertex and walk
// from its own stream seeded by (seed, i).
Corpus generate_corpus(const UndirectedGraph& g, std::size_t n, std::size_t steps, std::uint64_t seed);

// Rows follow corpus.vocabulary, columns follow documents:
// X[t,d] = count(t, d) * (ln((1 + n) / (1 + df(t))) + 1), columns then
// scaled to unit Euclidean norm.
Matrix tfidf(const Corpus& corpus);

struct NmfResult {
  Matrix u;  // m x r
  Matrix v;  // r x n
  std::vector<double> residuals;  // ||X - UV||_F after each update
};

// Lee-Seung multiplicative updates for the Frobenius objective, seeded
// uniform (0, 1] initialization, 1e-12 denominator guard. Stops after
// `iterations` or once the relative residual change drops below
// `tolerance` (0 disables early stopping).
NmfResult nmf(const Matrix& x, std::size_t rank, int iterations, std::uint64_t seed, double tolerance = 1e-6);

struct TopicModel {
  std::vector<std::string> vocabulary;
  Matrix x;
  Matrix u;
  Matrix v;
  std::size_t rank = 0;
  std::vector<double> residual_history;
};

TopicModel extract_topics(const Corpus& corpus, std::size_t rank, int iterations, std::uint64_t seed);

struct TopicTerm {
  std::string token;
  double weight;
};

// The k heaviest tokens of every column of U, descending, ties broken by
// vocabulary index.
std::vector<std::vector<TopicTerm>> top_terms(const TopicModel& model, std::size_t k);

struct CoverageStats {
  double coverage = 0.0;
  double mean_repetition = 0.0;
  std::vector<std::size_t> documents_per_vertex;  // graph vertex order
};

// Coverage is the fraction of graph vertices appearing in at least one
// document; mean_repetition averages, over all vertices, the number of
// documents containing the vertex. Only vertex positions are counted.
CoverageStats coverage_stats(const Corpus& corpus, const UndirectedGraph& g);

// One document per line, tokens separated by single spaces.
std::string export_corpus(const Corpus& corpus);
// topic_id,rank,token,weight with 1-based topic ids and ranks.
std::string export_topics_csv(const std::vector<std::vector<TopicTerm>>& topics);

}  // namespace noirkg
