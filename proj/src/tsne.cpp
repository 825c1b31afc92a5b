#include "noirkg/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "noirkg/error.hpp"

namespace noirkg {

namespace {

constexpr double kEntropyTolerance = 1e-5;
constexpr int kMaxBisection = 200;
constexpr double kJitter = 1e-10;
constexpr double kFloor = 1e-12;

std::vector<double> squared_distances(const std::vector<std::vector<double>>& x) {
  const std::size_t n = x.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < x[i].size(); ++k) {
        const double t = x[i][k] - x[j][k];
        s += t * t;
      }
      d[i * n + j] = d[j * n + i] = s;
    }
  }
  return d;
}

void jitter_duplicates(std::vector<std::vector<double>>& x) {
  for (std::size_t i = 1; i < x.size(); ++i) {
    int copies = 0;
    for (std::size_t j = 0; j < i; ++j) {
      if (x[j] == x[i]) ++copies;
    }
    if (copies > 0 && !x[i].empty()) x[i][0] += kJitter * copies;
  }
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

}  // namespace

double default_perplexity(std::size_t point_count) {
  const double cap = (static_cast<double>(point_count) - 1.0) / 3.0;
  return std::min(30.0, cap);
}

std::optional<double> TsneResult::kl_at(int iteration) const {
  for (const auto& r : kl_history) {
    if (r.iteration == iteration) return r.kl;
  }
  return std::nullopt;
}

ConditionalAffinities conditional_affinities(const std::vector<std::vector<double>>& points, double perplexity) {
  const std::size_t n = points.size();
  if (n < 2) throw Error("affinities need at least 2 points");
  if (!(perplexity > 0.0) || perplexity >= static_cast<double>(n - 1)) {
    throw Error("perplexity must be in (0, n - 1)");
  }
  const auto dist = squared_distances(points);
  const double target = std::log(perplexity);

  ConditionalAffinities out;
  out.p.assign(n * n, 0.0);
  out.perplexity.assign(n, 0.0);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) dmin = std::min(dmin, dist[i * n + j]);
    }
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double entropy = 0.0;
    for (int it = 0; it < kMaxBisection; ++it) {
      double sum = 0.0, weighted = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
          row[j] = 0.0;
          continue;
        }
        const double shifted = dist[i * n + j] - dmin;
        row[j] = std::exp(-beta * shifted);
        sum += row[j];
        weighted += shifted * row[j];
      }
      entropy = std::log(sum) + beta * weighted / sum;
      for (std::size_t j = 0; j < n; ++j) row[j] /= sum;
      const double diff = entropy - target;
      if (std::abs(diff) < kEntropyTolerance) break;
      if (diff > 0.0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
    std::copy(row.begin(), row.end(), out.p.begin() + static_cast<std::ptrdiff_t>(i * n));
    out.perplexity[i] = std::exp(entropy);
  }
  return out;
}

TsneResult tsne_project(std::vector<std::vector<double>> points, const TsneConfig& config) {
  const std::size_t n = points.size();
  if (n < 3) throw Error("t-SNE needs at least 3 points, got " + std::to_string(n));
  for (const auto& p : points) {
    if (p.size() != points[0].size()) throw Error("t-SNE input vectors differ in dimension");
  }
  if (!(config.perplexity > 0.0) || config.perplexity >= static_cast<double>(n - 1)) {
    throw Error("perplexity " + std::to_string(config.perplexity) + " infeasible for " + std::to_string(n) +
                " points (must be < n - 1)");
  }
  if (config.iterations < 1) throw Error("t-SNE iterations must be positive");
  jitter_duplicates(points);

  // Joint affinities P = (P_cond + P_cond^T) / 2n.
  const auto cond = conditional_affinities(points, config.perplexity);
  std::vector<double> p(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      p[i * n + j] = std::max((cond.p[i * n + j] + cond.p[j * n + i]) / (2.0 * static_cast<double>(n)), kFloor);
    }
  }

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1e-4);
  std::vector<double> y(n * 2), update(n * 2, 0.0), gains(n * 2, 1.0), grad(n * 2);
  for (double& v : y) v = gauss(rng);

  std::vector<double> num(n * n), q(n * n);
  auto student_t_affinities = [&] {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num[i * n + i] = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = y[2 * i] - y[2 * j];
        const double dy = y[2 * i + 1] - y[2 * j + 1];
        const double v = 1.0 / (1.0 + dx * dx + dy * dy);
        num[i * n + j] = num[j * n + i] = v;
        sum += 2.0 * v;
      }
    }
    for (std::size_t k = 0; k < n * n; ++k) q[k] = std::max(num[k] / sum, kFloor);
  };

  TsneResult result;
  for (int it = 0; it < config.iterations; ++it) {
    const bool exaggerating = it < config.exaggeration_iterations;
    const double exaggeration = exaggerating ? config.early_exaggeration : 1.0;
    const double momentum = exaggerating ? 0.5 : 0.8;

    student_t_affinities();

    for (std::size_t i = 0; i < n; ++i) {
      double gx = 0.0, gy = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double w = (exaggeration * p[i * n + j] - q[i * n + j]) * num[i * n + j];
        gx += w * (y[2 * i] - y[2 * j]);
        gy += w * (y[2 * i + 1] - y[2 * j + 1]);
      }
      grad[2 * i] = 4.0 * gx;
      grad[2 * i + 1] = 4.0 * gy;
    }

    for (std::size_t k = 0; k < n * 2; ++k) {
      gains[k] = (grad[k] > 0.0) != (update[k] > 0.0) ? gains[k] + 0.2 : gains[k] * 0.8;
      gains[k] = std::max(gains[k], 0.01);
      update[k] = momentum * update[k] - config.learning_rate * gains[k] * grad[k];
      y[k] += update[k];
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += y[2 * i];
      my += y[2 * i + 1];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[2 * i] -= mx;
      y[2 * i + 1] -= my;
    }

    const int done = it + 1;
    if ((config.record_every > 0 && done % config.record_every == 0) || done == config.iterations ||
        done == config.exaggeration_iterations) {
      student_t_affinities();  // Q for the updated positions
      result.kl_history.push_back({done, kl_divergence(p, q)});
    }
  }

  result.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.points[i] = {y[2 * i], y[2 * i + 1]};
  return result;
}

}  // namespace noirkg
