#include <doctest.h>

#include <cmath>
#include <random>

#include "noirkg/error.hpp"
#include "noirkg/tsne.hpp"

using namespace noirkg;

namespace {

std::vector<std::vector<double>> two_blobs(std::size_t per, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 0; i < 2 * per; ++i) {
    const double c = i < per ? 0.0 : 10.0;
    pts.push_back({c + noise(rng), c + noise(rng), noise(rng)});
  }
  return pts;
}

}  // namespace

TEST_CASE("bandwidth search hits the target perplexity") {
  const auto pts = two_blobs(15, 1);
  const auto aff = conditional_affinities(pts, 5.0);
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += aff.p[i * n + j];
    CHECK(row == doctest::Approx(1.0));
    CHECK(aff.p[i * n + i] == 0.0);
    CHECK(aff.perplexity[i] == doctest::Approx(5.0).epsilon(1e-3));
  }
}

TEST_CASE("projection separates blobs and is deterministic") {
  TsneConfig c;
  c.perplexity = 5.0;
  c.iterations = 400;
  c.learning_rate = 20.0;  // 200 overshoots on 20 points
  const auto a = tsne_project(two_blobs(10, 2), c);
  const auto b = tsne_project(two_blobs(10, 2), c);
  REQUIRE(a.points.size() == 20);
  CHECK(a.points == b.points);

  auto dist = [&](std::size_t i, std::size_t j) {
    return std::hypot(a.points[i][0] - a.points[j][0], a.points[i][1] - a.points[j][1]);
  };
  // Every point's nearest 2D neighbour comes from its own blob.
  for (std::size_t i = 0; i < 20; ++i) {
    std::size_t best = i == 0 ? 1 : 0;
    for (std::size_t j = 0; j < 20; ++j)
      if (j != i && dist(i, j) < dist(i, best)) best = j;
    CHECK((best < 10) == (i < 10));
  }

  CHECK(a.kl_at(10));
  CHECK(a.kl_at(250));
  CHECK(a.kl_at(400));
  CHECK_FALSE(a.kl_at(5));
  CHECK(*a.kl_at(400) < *a.kl_at(250));
}

TEST_CASE("duplicates and bad input") {
  std::vector<std::vector<double>> pts(6, std::vector<double>{1.0, 2.0});
  TsneConfig c;
  c.perplexity = 2.0;
  c.iterations = 50;
  const auto r = tsne_project(pts, c);
  for (const auto& p : r.points) CHECK(std::isfinite(p[0]));

  CHECK_THROWS_AS(tsne_project({{0.0}, {1.0}}, c), Error);
  c.perplexity = 5.0;
  CHECK_THROWS_AS(tsne_project(pts, c), Error);
  CHECK(default_perplexity(1000) == 30.0);
  CHECK(default_perplexity(10) == 3.0);
}
