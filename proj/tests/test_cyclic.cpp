#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "permclass/cyclic.hpp"
#include "permclass/error.hpp"
#include "permclass/permanent.hpp"

using namespace permclass;

namespace {

PointSet random_points(std::mt19937_64& rng, int n, int dim = 2) {
  std::normal_distribution<double> nd;
  PointSet x;
  for (int i = 0; i < n; ++i) {
    Point p;
    for (int d = 0; d < dim; ++d) p.push_back(nd(rng));
    x.push_back(p);
  }
  return x;
}

QueryColumn random_query(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  QueryColumn q;
  q.self = u(rng);
  for (std::size_t i = 0; i < n; ++i) q.cross.push_back(u(rng));
  return q;
}

double approx(const QueryColumn& q, const GramMatrix& g, double alpha, int k) {
  const RatioTable table = build_ratio_table(g, alpha, ApproxOrder(std::max(k - 1, 0)));
  return ratio_approx(q, table, ApproxOrder(k));
}

// Block-constant Gram: block b has the given size and level.
GramMatrix block_gram(const std::vector<int>& sizes, const std::vector<double>& levels) {
  int n = 0;
  for (int s : sizes) n += s;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  int start = 0;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    k.block(start, start, sizes[b], sizes[b]).setConstant(levels[b]);
    start += sizes[b];
  }
  return GramMatrix::from_matrix(k);
}

}  // namespace

TEST_CASE("approx order range and names") {
  CHECK_THROWS_AS(ApproxOrder(-1), Error);
  CHECK_THROWS_AS(ApproxOrder(4), Error);
  CHECK(ApproxOrder(0).name() == "uni-cycle");
  CHECK(ApproxOrder(1).name() == "two-cycle");
  CHECK(ApproxOrder(3).name() == "four-cycle");
  CHECK(ApproxOrder().k() == 3);
}

TEST_CASE("ratio table: constant kernel denominators") {
  const double c = 1.4;
  const double alpha = 0.8;
  const int n = 6;
  const GramMatrix g = GramMatrix::from_matrix(Eigen::MatrixXd::Constant(n, n, c));
  const RatioTable t = build_ratio_table(g, alpha, ApproxOrder(2));
  for (int i = 0; i < n; ++i) {
    CHECK(t.r1_loo[static_cast<std::size_t>(i)] == doctest::Approx(c * (alpha + n - 1)).epsilon(1e-13));
    CHECK(t.r2_loo[static_cast<std::size_t>(i)] == doctest::Approx(c * (alpha + n - 1)).epsilon(1e-13));
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      CHECK(t.r1_leave_two_out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) ==
            doctest::Approx(c * (alpha + n - 2)).epsilon(1e-13));
    }
  }
}

TEST_CASE("ratio table: diagonal kernel and single point") {
  const RatioTable t = build_ratio_table(gram(Kernel::diagonal(2.5), {{0.0}, {1.0}, {2.0}}), 0.4,
                                         ApproxOrder(1));
  for (double v : t.r1_loo) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));

  const RatioTable one = build_ratio_table(gram(Kernel::gaussian(1.0), {{0.3}}), 1.7, ApproxOrder(2));
  CHECK(one.r1_loo[0] == doctest::Approx(1.7).epsilon(1e-15));
}

TEST_CASE("ratio table: zero diagonal names the point") {
  Eigen::MatrixXd k = Eigen::MatrixXd::Identity(3, 3);
  k(1, 1) = 0.0;
  try {
    build_ratio_table(GramMatrix::from_matrix(k), 1.0, ApproxOrder(1));
    FAIL("expected DegenerateError");
  } catch (const DegenerateError& e) {
    CHECK(std::string(e.what()).find("point 1") != std::string::npos);
  }
}

TEST_CASE("ratio approx: two-cycle on a diagonal Gram") {
  const PointSet x{{0.0}, {1.0}, {3.0}};
  const Kernel k = Kernel::diagonal(2.0);
  const GramMatrix g = gram(k, x);
  QueryColumn q{1.5, {0.3, 0.0, 0.9}};
  const double expected = 0.6 * 1.5 + (0.09 + 0.81) / 2.0;
  CHECK(approx(q, g, 0.6, 1) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(oracle::rel_err(approx(q, g, 0.6, 1), ratio_exact(g, q, 0.6)) <= 1e-12);
}

TEST_CASE("ratio approx: order k = n is exact") {
  std::mt19937_64 rng(21);
  for (int n = 0; n <= 3; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      const GramMatrix g = GramMatrix::from_matrix(oracle::random_symmetric_nonnegative(n, rng));
      const QueryColumn q = random_query(rng, static_cast<std::size_t>(n));
      for (double alpha : {0.3, 1.0, 2.7}) {
        const double exact = oracle::per_alpha(extend(g, q), alpha) / oracle::per_alpha(g.entries(), alpha);
        CHECK(oracle::rel_err(approx(q, g, alpha, n), exact) <= (n <= 1 ? 1e-12 : 1e-10));
      }
    }
  }
}

TEST_CASE("ratio approx: table order must cover the query order") {
  std::mt19937_64 rng(22);
  const GramMatrix g = GramMatrix::from_matrix(oracle::random_symmetric_nonnegative(4, rng));
  const RatioTable t = build_ratio_table(g, 1.0, ApproxOrder(1));
  CHECK(t.supports(ApproxOrder(2)));
  CHECK_FALSE(t.supports(ApproxOrder(3)));
  CHECK_THROWS_AS(ratio_approx(random_query(rng, 4), t, ApproxOrder(3)), Error);
  CHECK_THROWS_AS(ratio_approx(random_query(rng, 3), t, ApproxOrder(1)), Error);
  CHECK_THROWS_AS(build_ratio_table(g, 0.0, ApproxOrder(1)), Error);
}

TEST_CASE("cyclic ratio approx: examples") {
  const PointSet x{{0.0}, {1.0}, {2.0}, {5.0}};
  for (int k = 1; k <= 3; ++k) {
    CHECK(cyclic_ratio_approx({9.0}, x, Kernel::constant(0.6), ApproxOrder(k)) ==
          doctest::Approx(0.6 * 4).epsilon(1e-14));
  }
  const Kernel g = Kernel::gaussian(1.3);
  double expected = 0.0;
  for (const auto& xi : x) expected += std::pow(eval(g, Point{0.7}, xi), 2) / eval(g, xi, xi);
  CHECK(cyclic_ratio_approx({0.7}, x, g, ApproxOrder(1)) == doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS(cyclic_ratio_approx({0.7}, {}, g, ApproxOrder(1)), Error);
}

TEST_CASE("cyclic ratio approx matches the small-alpha extrapolation") {
  // Points in the unit square keep every kernel entry above e^-2, so alpha = 1e-6
  // is already in the linear regime.
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Kernel k = Kernel::gaussian(1.0);
  for (int rep = 0; rep < 5; ++rep) {
    PointSet x;
    for (int i = 0; i < 6; ++i) x.push_back({u(rng), u(rng)});
    const Point t{u(rng), u(rng)};
    const GramMatrix g = gram(k, x);
    const QueryColumn q = query_column(k, t, x);
    for (int order = 1; order <= 3; ++order) {
      const double a = approx(q, g, 1e-6, order);
      const double b = approx(q, g, 1e-7, order);
      const double extrapolated = (10.0 * b - a) / 9.0;
      const double limit = cyclic_ratio_approx(t, x, k, ApproxOrder(order));
      CHECK(oracle::rel_err(limit, extrapolated) <= 1e-4);
    }
  }
}

TEST_CASE("cyclic ratio approx agrees with exact cyclic ratios where exact") {
  std::mt19937_64 rng(24);
  for (int n = 1; n <= 3; ++n) {
    const GramMatrix g = GramMatrix::from_matrix(oracle::random_symmetric_nonnegative(n, rng));
    const QueryColumn q = random_query(rng, static_cast<std::size_t>(n));
    const CyclicTable t = build_cyclic_table(g, ApproxOrder(std::max(n - 1, 0)));
    const double exact = oracle::cyp(extend(g, q)) / oracle::cyp(g.entries());
    CHECK(oracle::rel_err(cyclic_ratio_approx(q, t, ApproxOrder(n)), exact) <= 1e-10);
  }
}

TEST_CASE("cyclic ratio approx: isolated point is degenerate") {
  const PointSet x{{0.0}, {1.0}, {2.0}};
  CHECK_THROWS_AS(cyclic_ratio_approx({0.0}, x, Kernel::diagonal(1.0), ApproxOrder(2)), DegenerateError);
  CHECK_NOTHROW(cyclic_ratio_approx({0.0}, x, Kernel::diagonal(1.0), ApproxOrder(1)));
}

TEST_CASE("closed form: diagonal") {
  const GramMatrix g = gram(Kernel::diagonal(std::vector<double>{1.5, 0.5, 2.0}), {{0}, {1}, {2}});
  const QueryColumn q{0.8, {0.2, 0.4, 0.1}};
  const double expected = 0.9 * 0.8 + 0.04 / 1.5 + 0.16 / 0.5 + 0.01 / 2.0;
  CHECK(closed_form_ratio(q, g, 0.9, BlockStructure::Diagonal) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(oracle::rel_err(expected, oracle::per_alpha(extend(g, q), 0.9) / oracle::per_alpha(g.entries(), 0.9)) <=
        1e-12);
}

TEST_CASE("closed form: constant, two points") {
  const double c = 0.7;
  const GramMatrix g = GramMatrix::from_matrix(Eigen::MatrixXd::Constant(2, 2, c));
  const QueryColumn q{1.2, {0.3, 0.5}};
  const double alpha = 1.0;
  const double expected = alpha * 1.2 + alpha * (0.09 + 0.25) / (c * (alpha + 1)) + 2 * 0.3 * 0.5 / (c * (alpha + 1));
  CHECK(closed_form_ratio(q, g, alpha, BlockStructure::Constant) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(oracle::rel_err(expected, oracle::per_alpha(extend(g, q), alpha) / oracle::per_alpha(g.entries(), alpha)) <=
        1e-12);
}

TEST_CASE("closed form: two blocks of sizes 2 and 1") {
  const GramMatrix g = block_gram({2, 1}, {0.9, 1.6});
  const QueryColumn q{1.1, {0.2, 0.6, 0.45}};
  for (double alpha : {0.5, 1.0, 3.0}) {
    const double exact = oracle::per_alpha(extend(g, q), alpha) / oracle::per_alpha(g.entries(), alpha);
    CHECK(oracle::rel_err(closed_form_ratio(q, g, alpha, BlockStructure::BlockConstant), exact) <= 1e-12);
  }
}

TEST_CASE("closed form: structure validation") {
  std::mt19937_64 rng(25);
  const GramMatrix g = GramMatrix::from_matrix(oracle::random_symmetric_nonnegative(3, rng));
  const QueryColumn q = random_query(rng, 3);
  CHECK_THROWS_AS(closed_form_ratio(q, g, 1.0, BlockStructure::BlockConstant), Error);
  CHECK_THROWS_AS(closed_form_ratio(q, block_gram({2, 1}, {1.0, 1.0}), 1.0, BlockStructure::Constant), Error);
  CHECK_THROWS_AS(closed_form_ratio(q, block_gram({2, 1}, {1.0, 1.0}), 1.0, BlockStructure::Diagonal), Error);
  CHECK_THROWS_AS(closed_form_ratio(random_query(rng, 2), block_gram({2, 1}, {1.0, 1.0}), 1.0,
                                    BlockStructure::BlockConstant),
                  Error);
}

TEST_CASE("three- and four-cycle approximations are exact on block-constant Grams") {
  std::mt19937_64 rng(26);
  std::uniform_real_distribution<double> level(0.3, 2.0);
  const std::vector<std::vector<int>> layouts{{1, 1, 1, 1}, {5}, {2, 1}, {3, 2, 1}, {4, 3}, {2, 2, 2, 3}};
  for (const auto& sizes : layouts) {
    std::vector<double> levels;
    for (std::size_t b = 0; b < sizes.size(); ++b) levels.push_back(level(rng));
    const GramMatrix g = block_gram(sizes, levels);
    const QueryColumn q = random_query(rng, g.size());
    for (double alpha : {0.4, 1.0, 2.2}) {
      const double exact = ratio_exact(g, q, alpha);
      CHECK(oracle::rel_err(closed_form_ratio(q, g, alpha, BlockStructure::BlockConstant), exact) <= 1e-10);
      CHECK(oracle::rel_err(approx(q, g, alpha, 2), exact) <= 1e-10);
      CHECK(oracle::rel_err(approx(q, g, alpha, 3), exact) <= 1e-10);
    }
  }
}

TEST_CASE("two-cycle approximation is not exact for a constant Gram") {
  const GramMatrix g = GramMatrix::from_matrix(Eigen::MatrixXd::Constant(4, 4, 1.0));
  const QueryColumn q{1.0, {0.2, 0.9, 0.4, 0.6}};
  CHECK(oracle::rel_err(approx(q, g, 1.0, 1), ratio_exact(g, q, 1.0)) > 1e-3);
  const GramMatrix d = gram(Kernel::diagonal(1.0), {{0.0}, {1.0}, {2.0}, {3.0}});
  CHECK(oracle::rel_err(approx(q, d, 1.0, 1), ratio_exact(d, q, 1.0)) <= 1e-12);
}

TEST_CASE("leave-two-out identity inside a constant block") {
  std::mt19937_64 rng(27);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int m = 3; m <= 7; ++m) {
    const double c = 0.5 + u(rng);
    const double alpha = 0.3 + u(rng);
    const GramMatrix g = block_gram({m, 2}, {c, 1.0});
    const RatioTable table = build_ratio_table(g, alpha, ApproxOrder(2));
    std::vector<double> kt;
    for (int i = 0; i < m; ++i) kt.push_back(u(rng));
    for (int i1 = 0; i1 < m; ++i1) {
      double lhs = 0.0;
      double rhs = 0.0;
      for (int i2 = 0; i2 < m; ++i2) {
        if (i2 == i1) continue;
        const double path2 = kt[i1] * c * kt[i2];
        lhs += path2 / (c * alpha);
        double longer = 0.0;
        for (int i3 = 0; i3 < m; ++i3) {
          if (i3 == i1 || i3 == i2) continue;
          longer += kt[i1] * c * c * kt[i3] / (c * alpha);
        }
        rhs += (path2 + longer) / table.r1_leave_two_out(static_cast<std::size_t>(i1), static_cast<std::size_t>(i2));
      }
      CHECK(oracle::rel_err(lhs, rhs) <= 1e-12);
    }
  }
}

TEST_CASE("projection kernel: summed ratios equal n + alpha * rank") {
  std::mt19937_64 rng(28);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  const int ground = 9;
  // Supports {0..3}, {4..5}, {6..8}.
  const std::vector<std::vector<int>> supports{{0, 1, 2, 3}, {4, 5}, {6, 7, 8}};
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(ground, ground);
  for (const auto& s : supports) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(ground);
    for (int i : s) v(i) = u(rng);
    v.normalize();
    p += v * v.transpose();
  }
  const Kernel k = Kernel::projection(p);
  const double rank = static_cast<double>(supports.size());
  const std::vector<PointSet> samples{{{0}, {4}}, {{1}, {2}, {6}}, {{0}, {3}, {5}, {7}, {8}}};
  for (const PointSet& x : samples) {
    for (double alpha : {0.5, 1.0, 2.0}) {
      const RatioTable table = build_ratio_table(gram(k, x), alpha, ApproxOrder(2));
      for (int order = 1; order <= 3; ++order) {
        double total = 0.0;
        for (int t = 0; t < ground; ++t) {
          const double r = ratio_approx(k, Point{static_cast<double>(t)}, table, ApproxOrder(order));
          CHECK(r >= 0.0);
          total += r;
        }
        CHECK(total / (static_cast<double>(x.size()) + alpha * rank) == doctest::Approx(1.0).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("approximations are positive for nonnegative kernels") {
  std::mt19937_64 rng(29);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 1 + rep % 9;
    const GramMatrix g = GramMatrix::from_matrix(oracle::random_symmetric_nonnegative(n, rng));
    const RatioTable table = build_ratio_table(g, 0.2 + 0.1 * rep, ApproxOrder(2));
    const QueryColumn q = random_query(rng, static_cast<std::size_t>(n));
    for (int k = 0; k <= 3; ++k) CHECK(ratio_approx(q, table, ApproxOrder(k)) > 0.0);
  }
}

TEST_CASE("four-cycle error is below two-cycle error on average") {
  std::mt19937_64 rng(30);
  const Kernel k = Kernel::gaussian(1.0);
  double err1 = 0.0;
  double err3 = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const PointSet x = random_points(rng, 4 + rep % 5, 1);
    const Point t = random_points(rng, 1, 1).front();
    const GramMatrix g = gram(k, x);
    const QueryColumn q = query_column(k, t, x);
    const double exact = ratio_exact(g, q, 1.0);
    err1 += oracle::rel_err(approx(q, g, 1.0, 1), exact);
    err3 += oracle::rel_err(approx(q, g, 1.0, 3), exact);
  }
  CHECK(err3 < err1);
}

TEST_CASE("banded Grams: four-cycle error shrinks with the off-diagonal coupling") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  const int m = 9;
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::MatrixXd base = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m && j <= i + 2; ++j) base(i, j) = base(j, i) = i == j ? 0.5 + u(rng) : u(rng);
    }
    const std::size_t pos = static_cast<std::size_t>(rep % m);
    std::vector<double> errors;
    for (double eps : {0.5, 0.125}) {
      Eigen::MatrixXd a = base * eps;
      a.diagonal() = base.diagonal();
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < static_cast<std::size_t>(m); ++i) {
        if (i != pos) idx.push_back(i);
      }
      const GramMatrix g = GramMatrix::from_matrix(principal_submatrix(a, idx));
      QueryColumn q{a(static_cast<Eigen::Index>(pos), static_cast<Eigen::Index>(pos)), {}};
      for (std::size_t i : idx) q.cross.push_back(a(static_cast<Eigen::Index>(pos), static_cast<Eigen::Index>(i)));
      errors.push_back(oracle::rel_err(approx(q, g, 1.0, 3), ratio_exact(g, q, 1.0)));
    }
    CHECK(errors[1] < errors[0]);
    CHECK(errors[1] <= 1e-3);
  }
}
