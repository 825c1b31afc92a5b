#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace noirkg {

struct TsneConfig {
  double perplexity = 30.0;
  int iterations = 1000;
  double learning_rate = 200.0;
  std::uint64_t seed = 7;
  double early_exaggeration = 12.0;
  int exaggeration_iterations = 250;
  int record_every = 10;
};

// Perplexity 30 clamped to (n - 1) / 3 for small inputs.
double default_perplexity(std::size_t point_count);

struct KlRecord {
  int iteration;  // completed iterations
  double kl;      // KL(P || Q) against the unexaggerated P
};

struct TsneResult {
  std::vector<std::array<double, 2>> points;  // input order
  std::vector<KlRecord> kl_history;

  // KL recorded after `iteration` completed iterations, if any.
  std::optional<double> kl_at(int iteration) const;
};

struct ConditionalAffinities {
  std::vector<double> p;          // row-major n x n, rows sum to 1, zero diagonal
  std::vector<double> perplexity;  // achieved per-row perplexity
};

// Per-point Gaussian bandwidths found by bisection so each row's entropy
// matches log(perplexity) within 1e-5.
ConditionalAffinities conditional_affinities(const std::vector<std::vector<double>>& points, double perplexity);

// Exact O(n^2) t-SNE to two dimensions. Exact duplicate inputs are
// separated by a deterministic jitter of 1e-10 before anything else.
// Throws Error for fewer than 3 points or perplexity >= n - 1.
TsneResult tsne_project(std::vector<std::vector<double>> points, const TsneConfig& config);

}  // namespace noirkg
