#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "permclass/classifier.hpp"
#include "permclass/error.hpp"

using namespace permclass;

namespace {

LabeledDataset two_clusters(std::mt19937_64& rng, int per_class, double gap) {
  std::normal_distribution<double> nd(0.0, 0.5);
  LabeledDataset d;
  d.num_classes = 2;
  for (int c = 1; c <= 2; ++c) {
    for (int i = 0; i < per_class; ++i) {
      d.points.push_back({nd(rng) + (c == 1 ? 0.0 : gap), nd(rng)});
      d.labels.push_back(c);
    }
  }
  return d;
}

ModelParams gaussian_params(double tau, RatioOrder order = RatioOrder()) {
  ModelParams p;
  p.kernel = Kernel::gaussian(tau);
  p.order = order;
  return p;
}

}  // namespace

TEST_CASE("fit: per-class tables") {
  std::mt19937_64 rng(41);
  const LabeledDataset d = two_clusters(rng, 10, 3.0);
  const FittedModel m = fit(d, gaussian_params(1.0));
  REQUIRE(m.num_classes() == 2);
  for (const auto& c : m.classes()) {
    REQUIRE(c.table.has_value());
    CHECK(c.table->size() == 10);
    CHECK(c.table->order.k() == 2);
  }
}

TEST_CASE("fit: validation") {
  LabeledDataset bad;
  bad.points = {{0.0}, {1.0}};
  bad.labels = {1};
  CHECK_THROWS_AS(fit(bad, gaussian_params(1.0)), Error);
  bad.labels = {1, 0};
  CHECK_THROWS_AS(fit(bad, gaussian_params(1.0)), Error);
  ModelParams p = gaussian_params(1.0);
  p.alphas = {1.0, -1.0};
  LabeledDataset ok;
  ok.points = {{0.0}};
  ok.labels = {2};
  CHECK_THROWS_AS(fit(ok, p), Error);
}

TEST_CASE("predict: empty class with a constant kernel") {
  for (int n = 1; n <= 6; ++n) {
    LabeledDataset d;
    d.num_classes = 2;
    for (int i = 0; i < n; ++i) {
      d.points.push_back({static_cast<double>(i)});
      d.labels.push_back(1);
    }
    for (double alpha : {0.5, 1.0, 2.0}) {
      ModelParams p;
      p.kernel = Kernel::constant(1.7);
      p.alphas = {alpha};
      const PosteriorRow row = predict_finite(fit(d, p), Point{0.5});
      CHECK(row.probabilities[0] == doctest::Approx((alpha + n) / (2 * alpha + n)).epsilon(1e-13));
      CHECK(row.label == 1);
    }
  }
}

TEST_CASE("predict: empty training set falls back to the empty-class rule") {
  LabeledDataset d;
  d.num_classes = 2;
  ModelParams p = gaussian_params(1.0);
  p.alphas = {1.0, 3.0};
  const PosteriorRow row = predict_finite(fit(d, p), Point{0.2});
  CHECK(row.probabilities[0] == doctest::Approx(0.25));
  CHECK(row.label == 2);
}

TEST_CASE("predict: mirror-image classes give one half") {
  LabeledDataset d;
  d.num_classes = 2;
  for (double v : {0.5, 1.3, 2.0}) {
    d.points.push_back({v});
    d.labels.push_back(1);
    d.points.push_back({-v});
    d.labels.push_back(2);
  }
  for (int k = 0; k <= 3; ++k) {
    const PosteriorRow row = predict_finite(fit(d, gaussian_params(1.0, RatioOrder(ApproxOrder(k)))), Point{0.0});
    CHECK(row.probabilities[0] == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("predict: rows sum to one and ignore training order") {
  std::mt19937_64 rng(42);
  const LabeledDataset d = two_clusters(rng, 8, 1.0);
  std::vector<std::size_t> perm(d.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  const LabeledDataset shuffled = d.subset(perm);
  for (int k = 1; k <= 3; ++k) {
    const ModelParams p = gaussian_params(0.8, RatioOrder(ApproxOrder(k)));
    const FittedModel a = fit(d, p);
    const FittedModel b = fit(shuffled, p);
    for (const Point& t : std::vector<Point>{{0.0, 0.0}, {0.5, 0.3}, {2.0, -1.0}}) {
      const PosteriorRow ra = predict_finite(a, t);
      const PosteriorRow rb = predict_finite(b, t);
      CHECK(ra.probabilities[0] + ra.probabilities[1] == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(ra.probabilities[0] == doctest::Approx(rb.probabilities[0]).epsilon(1e-12));
    }
  }
}

TEST_CASE("predict: relabelling classes permutes the posterior") {
  std::mt19937_64 rng(43);
  LabeledDataset d = two_clusters(rng, 5, 1.5);
  d.num_classes = 3;
  for (int i = 0; i < 3; ++i) {
    d.points.push_back({0.7 + 0.1 * i, 2.0});
    d.labels.push_back(3);
  }
  ModelParams p = gaussian_params(1.0);
  p.alphas = {0.5, 1.0, 2.0};
  // class c becomes class map[c]
  const std::vector<int> map{0, 3, 1, 2};
  LabeledDataset relabelled = d;
  for (int& y : relabelled.labels) y = map[static_cast<std::size_t>(y)];
  ModelParams q = p;
  for (int c = 1; c <= 3; ++c) q.alphas[static_cast<std::size_t>(map[static_cast<std::size_t>(c)] - 1)] = p.alphas[static_cast<std::size_t>(c - 1)];
  const PosteriorRow a = predict_finite(fit(d, p), Point{0.4, 0.9});
  const PosteriorRow b = predict_finite(fit(relabelled, q), Point{0.4, 0.9});
  for (int c = 1; c <= 3; ++c) {
    CHECK(a.probabilities[static_cast<std::size_t>(c - 1)] ==
          doctest::Approx(b.probabilities[static_cast<std::size_t>(map[static_cast<std::size_t>(c)] - 1)]).epsilon(1e-12));
  }
}

TEST_CASE("predict: four-cycle posteriors are exact for classes of at most three points") {
  std::mt19937_64 rng(44);
  for (int rep = 0; rep < 10; ++rep) {
    LabeledDataset d = two_clusters(rng, 1 + rep % 3, 1.0);
    ModelParams approx = gaussian_params(1.2);
    approx.alphas = {0.7, 1.4};
    ModelParams exact = approx;
    exact.order = RatioOrder::exact();
    const Point t{0.3 * rep - 1.0, 0.2};
    const PosteriorRow a = predict_finite(fit(d, approx), t);
    const PosteriorRow e = predict_finite(fit(d, exact), t);
    CHECK(oracle::rel_err(a.probabilities[0], e.probabilities[0]) <= 1e-10);
  }
}

TEST_CASE("predict: exact posterior matches the permanent formula") {
  std::mt19937_64 rng(45);
  const LabeledDataset d = two_clusters(rng, 3, 1.0);
  ModelParams p = gaussian_params(1.0, RatioOrder::exact());
  p.alphas = {0.6, 1.5};
  const Point t{0.4, -0.2};
  const PosteriorRow row = predict_finite(fit(d, p), t);
  double w[2];
  for (int c = 0; c < 2; ++c) {
    PointSet members;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d.labels[i] == c + 1) members.push_back(d.points[i]);
    }
    PointSet with_t = members;
    with_t.push_back(t);
    w[c] = oracle::per_alpha(gram(p.kernel, with_t).entries(), p.alphas[static_cast<std::size_t>(c)]) /
           oracle::per_alpha(gram(p.kernel, members).entries(), p.alphas[static_cast<std::size_t>(c)]);
  }
  CHECK(oracle::rel_err(row.probabilities[0], w[0] / (w[0] + w[1])) <= 1e-12);
}

TEST_CASE("normalize weights") {
  const PosteriorRow row = normalize_weights({1.0, 3.0, 3.0});
  CHECK(row.probabilities[1] == doctest::Approx(3.0 / 7.0));
  CHECK(row.label == 2);
  CHECK_THROWS_AS(normalize_weights({0.0, 0.0}), DegenerateError);
}

TEST_CASE("predict infinite: constant kernel gives the restaurant seating plan") {
  const PointSet x{{0.0}, {1.0}, {2.0}, {3.0}, {4.0}, {5.0}};
  const Partition b = Partition::from_labels(std::vector<int>{1, 1, 2, 1, 3, 2});
  ModelParams p;
  p.kernel = Kernel::constant(1.0);
  p.lambda = 1.5;
  for (int k = 1; k <= 3; ++k) {
    p.order = RatioOrder(ApproxOrder(k));
    const PosteriorRow row = predict_infinite(x, b, Point{9.0}, p);
    REQUIRE(row.probabilities.size() == 4);
    CHECK(row.probabilities[0] == doctest::Approx(3.0 / 7.5).epsilon(1e-13));
    CHECK(row.probabilities[1] == doctest::Approx(2.0 / 7.5).epsilon(1e-13));
    CHECK(row.probabilities[2] == doctest::Approx(1.0 / 7.5).epsilon(1e-13));
    CHECK(row.probabilities[3] == doctest::Approx(1.5 / 7.5).epsilon(1e-13));
  }
}

TEST_CASE("predict infinite: vanishing lambda joins the only block") {
  ModelParams p = gaussian_params(1.0);
  p.lambda = 1e-12;
  const PosteriorRow row = predict_infinite({{0.0}}, Partition::from_labels(std::vector<int>{1}), Point{0.5}, p);
  CHECK(row.probabilities[0] == doctest::Approx(1.0).epsilon(1e-10));
  p.lambda = 0.0;
  CHECK_THROWS_AS(predict_infinite({{0.0}}, Partition::from_labels(std::vector<int>{1}), Point{0.5}, p), Error);
}

TEST_CASE("predict infinite: three points in two blocks match exact cyclic ratios") {
  const PointSet x{{0.0}, {0.7}, {2.1}};
  const Partition b = Partition::from_labels(std::vector<int>{1, 1, 2});
  const Point t{1.0};
  const Kernel k = Kernel::gaussian(1.0);
  const double lambda = 0.8;
  const Eigen::MatrixXd full = gram(k, {x[0], x[1], x[2], t}).entries();
  const double w1 = oracle::cyp(oracle::submatrix(full, {0, 1, 3})) / oracle::cyp(oracle::submatrix(full, {0, 1}));
  const double w2 = oracle::cyp(oracle::submatrix(full, {2, 3})) / oracle::cyp(oracle::submatrix(full, {2}));
  const double w3 = lambda * full(3, 3);
  const double total = w1 + w2 + w3;
  for (const RatioOrder order : {RatioOrder::exact(), RatioOrder(ApproxOrder(2)), RatioOrder(ApproxOrder(3))}) {
    ModelParams p = gaussian_params(1.0, order);
    p.lambda = lambda;
    const PosteriorRow row = predict_infinite(x, b, t, p);
    CHECK(oracle::rel_err(row.probabilities[0], w1 / total) <= 1e-10);
    CHECK(oracle::rel_err(row.probabilities[1], w2 / total) <= 1e-10);
    CHECK(oracle::rel_err(row.probabilities[2], w3 / total) <= 1e-10);
  }
}

TEST_CASE("sequential partition: block counts follow the Ewens distribution") {
  ModelParams p;
  p.kernel = Kernel::constant(1.0);
  p.lambda = 1.0;
  const int n = 3;
  const PointSet stream(n, Point{0.0});
  std::map<std::size_t, double> expected;
  for (const auto& rgs : oracle::set_partitions(n)) {
    std::vector<int> sizes(static_cast<std::size_t>(*std::max_element(rgs.begin(), rgs.end()) + 1), 0);
    for (int b : rgs) ++sizes[static_cast<std::size_t>(b)];
    expected[sizes.size()] += oracle::ewens(sizes, p.lambda);
  }
  const int draws = 100000;
  std::map<std::size_t, int> counts;
  for (int s = 0; s < draws; ++s) {
    ++counts[sequential_partition(stream, p, AssignmentRule::sample(static_cast<std::uint64_t>(s))).block_count()];
  }
  for (const auto& [blocks, prob] : expected) {
    const double sigma = std::sqrt(draws * prob * (1.0 - prob));
    CHECK(std::abs(counts[blocks] - draws * prob) <= 3.0 * sigma);
  }
}

TEST_CASE("sequential partition: single point and separated clusters") {
  ModelParams p = gaussian_params(1.0);
  p.lambda = 0.5;
  CHECK(sequential_partition({{1.0, 1.0}}, p, AssignmentRule::argmax()).block_count() == 1);
  std::mt19937_64 rng(46);
  std::normal_distribution<double> nd(0.0, 0.02);
  PointSet stream;
  for (int i = 0; i < 12; ++i) stream.push_back({nd(rng) + (i % 2 == 0 ? 0.0 : 10.0), nd(rng)});
  const Partition b = sequential_partition(stream, p, AssignmentRule::argmax());
  REQUIRE(b.block_count() == 2);
  for (const auto& block : b.blocks) {
    for (std::size_t i : block) CHECK(i % 2 == block.front() % 2);
  }
}

TEST_CASE("knn: majority vote and ties") {
  LabeledDataset d;
  d.num_classes = 2;
  d.points = {{0.0}, {0.1}, {0.2}, {5.0}, {5.1}};
  d.labels = {1, 1, 2, 2, 2};
  CHECK(knn_predict(d, Point{0.05}, 3) == 1);
  CHECK(knn_predict(d, Point{4.0}, 3) == 2);
  CHECK(knn_predict(d, Point{0.15}, 2) == 1);
  CHECK(knn_predict(d, Point{0.0}, 50) == 2);
  CHECK_THROWS_AS(knn_predict(d, Point{0.0}, 0), Error);
}
