#include "noirkg/topics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "noirkg/error.hpp"
#include "noirkg/text.hpp"

namespace noirkg {

namespace {

constexpr double kGuard = 1e-12;

// c = a^T b
Matrix multiply_at_b(const Matrix& a, const Matrix& b) {
  Matrix c(a.cols, b.cols);
  for (std::size_t k = 0; k < a.rows; ++k) {
    for (std::size_t i = 0; i < a.cols; ++i) {
      const double aki = a(k, i);
      if (aki == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aki * b(k, j);
    }
  }
  return c;
}

// c = a b^T
Matrix multiply_a_bt(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < b.rows; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) s += a(i, k) * b(j, k);
      c(i, j) = s;
    }
  }
  return c;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

}  // namespace

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double x : a.data) s += x * x;
  return std::sqrt(s);
}

double residual_norm(const Matrix& a, const Matrix& b, const Matrix& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) {
      double bc = 0.0;
      for (std::size_t k = 0; k < b.cols; ++k) bc += b(i, k) * c(k, j);
      const double d = a(i, j) - bc;
      s += d * d;
    }
  }
  return std::sqrt(s);
}

WalkDocument random_walk(const UndirectedGraph& g, std::size_t start, std::size_t steps, Rng& rng) {
  if (start >= g.size()) throw Error("walk start out of range");
  if (g.degree(start) == 0) throw Error("cannot walk from isolated vertex '" + g.vertices[start] + "'");
  if (steps < 1) throw Error("walk length must be at least 1");

  WalkDocument doc;
  doc.start_vertex = g.vertices[start];
  doc.length = steps;
  doc.tokens.reserve(2 * steps + 1);
  doc.tokens.push_back(g.vertices[start]);
  std::size_t at = start;
  for (std::size_t s = 0; s < steps; ++s) {
    const auto& edges = g.adjacency[at];
    const Edge& e = edges[std::uniform_int_distribution<std::size_t>(0, edges.size() - 1)(rng)];
    const FactRef& f = e.support[std::uniform_int_distribution<std::size_t>(0, e.support.size() - 1)(rng)];
    doc.tokens.push_back(g.relations[f.relation]);
    doc.tokens.push_back(g.vertices[e.neighbor]);
    at = e.neighbor;
  }
  return doc;
}

std::vector<std::size_t> walk_start_vertices(const UndirectedGraph& g) {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (g.degree(v) > 0) out.push_back(v);
  }
  return out;
}

Corpus generate_corpus(const UndirectedGraph& g, std::size_t n, std::size_t steps, std::uint64_t seed) {
  Corpus corpus;
  corpus.document_count = n;
  corpus.walk_length = steps;
  corpus.seed = seed;
  if (n == 0) return corpus;

  const auto starts = walk_start_vertices(g);
  if (starts.empty()) throw Error("graph has no vertex with a neighbor to start a walk from");

  corpus.documents.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = stream_rng(seed, i);
    const std::size_t start = starts[std::uniform_int_distribution<std::size_t>(0, starts.size() - 1)(rng)];
    corpus.documents[i] = random_walk(g, start, steps, rng);
  }
  for (const auto& doc : corpus.documents) {
    for (const auto& tok : doc.tokens) {
      if (corpus.token_index.emplace(tok, corpus.vocabulary.size()).second) corpus.vocabulary.push_back(tok);
    }
  }
  return corpus;
}

Matrix tfidf(const Corpus& corpus) {
  if (corpus.documents.empty() || corpus.vocabulary.empty()) throw Error("TF-IDF needs a nonempty corpus");
  const std::size_t m = corpus.vocabulary.size();
  const std::size_t n = corpus.documents.size();
  Matrix x(m, n);
  std::vector<std::size_t> df(m, 0);
  for (std::size_t d = 0; d < n; ++d) {
    for (const auto& tok : corpus.documents[d].tokens) {
      auto it = corpus.token_index.find(tok);
      if (it == corpus.token_index.end()) throw Error("token '" + tok + "' missing from vocabulary");
      if (x(it->second, d) == 0.0) ++df[it->second];
      x(it->second, d) += 1.0;
    }
  }
  for (std::size_t t = 0; t < m; ++t) {
    const double idf = std::log((1.0 + static_cast<double>(n)) / (1.0 + static_cast<double>(df[t]))) + 1.0;
    for (std::size_t d = 0; d < n; ++d) x(t, d) *= idf;
  }
  for (std::size_t d = 0; d < n; ++d) {
    double s = 0.0;
    for (std::size_t t = 0; t < m; ++t) s += x(t, d) * x(t, d);
    const double norm = std::sqrt(s);
    if (norm == 0.0) continue;
    for (std::size_t t = 0; t < m; ++t) x(t, d) /= norm;
  }
  return x;
}

NmfResult nmf(const Matrix& x, std::size_t rank, int iterations, std::uint64_t seed, double tolerance) {
  for (double v : x.data) {
    if (v < 0.0 || std::isnan(v)) throw Error("NMF input has a negative entry");
  }
  if (rank < 1 || rank > std::min(x.rows, x.cols)) {
    throw Error("NMF rank " + std::to_string(rank) + " out of range [1, " +
                std::to_string(std::min(x.rows, x.cols)) + "]");
  }
  if (iterations < 0) throw Error("NMF iterations must be >= 0");

  Rng rng(seed);
  // uniform on (0, 1]
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto draw = [&] { return 1.0 - unif(rng); };
  NmfResult r{Matrix(x.rows, rank), Matrix(rank, x.cols), {}};
  for (double& v : r.u.data) v = draw();
  for (double& v : r.v.data) v = draw();

  for (int it = 0; it < iterations; ++it) {
    // V <- V .* (U^T X) ./ (U^T U V + eps)
    {
      const Matrix utx = multiply_at_b(r.u, x);
      const Matrix utuv = multiply(multiply_at_b(r.u, r.u), r.v);
      for (std::size_t k = 0; k < r.v.data.size(); ++k) r.v.data[k] *= utx.data[k] / (utuv.data[k] + kGuard);
    }
    // U <- U .* (X V^T) ./ (U V V^T + eps)
    {
      const Matrix xvt = multiply_a_bt(x, r.v);
      const Matrix uvvt = multiply(r.u, multiply_a_bt(r.v, r.v));
      for (std::size_t k = 0; k < r.u.data.size(); ++k) r.u.data[k] *= xvt.data[k] / (uvvt.data[k] + kGuard);
    }
    const double res = residual_norm(x, r.u, r.v);
    r.residuals.push_back(res);
    if (tolerance > 0.0 && r.residuals.size() >= 2) {
      const double prev = r.residuals[r.residuals.size() - 2];
      if (prev == 0.0 || std::abs(prev - res) / prev < tolerance) break;
    }
  }
  return r;
}

TopicModel extract_topics(const Corpus& corpus, std::size_t rank, int iterations, std::uint64_t seed) {
  TopicModel model;
  model.vocabulary = corpus.vocabulary;
  model.x = tfidf(corpus);
  auto f = nmf(model.x, rank, iterations, seed);
  model.u = std::move(f.u);
  model.v = std::move(f.v);
  model.rank = rank;
  model.residual_history = std::move(f.residuals);
  return model;
}

std::vector<std::vector<TopicTerm>> top_terms(const TopicModel& model, std::size_t k) {
  const std::size_t m = model.u.rows;
  if (k < 1 || k > m) throw Error("k must be in [1, " + std::to_string(m) + "]");
  std::vector<std::vector<TopicTerm>> topics;
  std::vector<std::size_t> order(m);
  for (std::size_t j = 0; j < model.u.cols; ++j) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return model.u(a, j) > model.u(b, j); });
    std::vector<TopicTerm> terms;
    for (std::size_t i = 0; i < k; ++i) terms.push_back({model.vocabulary[order[i]], model.u(order[i], j)});
    topics.push_back(std::move(terms));
  }
  return topics;
}

CoverageStats coverage_stats(const Corpus& corpus, const UndirectedGraph& g) {
  CoverageStats stats;
  stats.documents_per_vertex.assign(g.size(), 0);
  if (g.size() == 0) return stats;

  std::unordered_map<std::string, std::size_t> vertex_index;
  for (std::size_t v = 0; v < g.size(); ++v) vertex_index.emplace(g.vertices[v], v);

  std::vector<std::size_t> last_doc(g.size(), static_cast<std::size_t>(-1));
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    const auto& tokens = corpus.documents[d].tokens;
    for (std::size_t i = 0; i < tokens.size(); i += 2) {
      auto it = vertex_index.find(tokens[i]);
      if (it == vertex_index.end() || last_doc[it->second] == d) continue;
      last_doc[it->second] = d;
      ++stats.documents_per_vertex[it->second];
    }
  }
  std::size_t covered = 0, total = 0;
  for (std::size_t c : stats.documents_per_vertex) {
    covered += c > 0 ? 1 : 0;
    total += c;
  }
  stats.coverage = static_cast<double>(covered) / static_cast<double>(g.size());
  stats.mean_repetition = static_cast<double>(total) / static_cast<double>(g.size());
  return stats;
}

std::string export_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& doc : corpus.documents) {
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      if (i) out += ' ';
      out += doc.tokens[i];
    }
    out += '\n';
  }
  return out;
}

std::string export_topics_csv(const std::vector<std::vector<TopicTerm>>& topics) {
  std::string out = "topic_id,rank,token,weight\n";
  for (std::size_t j = 0; j < topics.size(); ++j) {
    for (std::size_t i = 0; i < topics[j].size(); ++i) {
      out += std::to_string(j + 1) + "," + std::to_string(i + 1) + "," + topics[j][i].token + "," +
             format_double(topics[j][i].weight) + "\n";
    }
  }
  return out;
}

}  // namespace noirkg
