#include <doctest.h>

#include <cmath>
#include <random>

#include "permclass/error.hpp"
#include "permclass/kernel.hpp"
#include "permclass/permanent.hpp"

using namespace permclass;

TEST_CASE("eval: Gaussian at zero distance is 1") {
  const Point s{0.3, -1.2};
  CHECK(eval(Kernel::gaussian(1.0), s, s) == 1.0);
}

TEST_CASE("eval: exponential at unit distance") {
  const Point s{0.0, 0.0};
  const Point t{0.6, 0.8};
  CHECK(eval(Kernel::exponential(1.0), s, t) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(eval(Kernel::exponential(1.0), s, t) == doctest::Approx(0.367879).epsilon(1e-6));
}

TEST_CASE("eval: diagonal indicator") {
  const Kernel k = Kernel::diagonal(2.0);
  CHECK(eval(k, Point{1.0}, Point{2.0}) == 0.0);
  CHECK(eval(k, Point{1.0}, Point{1.0}) == 2.0);
  const Kernel tab = Kernel::diagonal(std::vector<double>{0.5, 3.0});
  CHECK(eval(tab, Point{1.0}, Point{1.0}) == 3.0);
  CHECK(eval(tab, Point{0.0}, Point{1.0}) == 0.0);
}

TEST_CASE("eval: errors") {
  CHECK_THROWS_AS(eval(Kernel::gaussian(1.0), Point{1.0}, Point{1.0, 2.0}), Error);
  Kernel bad;
  bad.family = KernelFamily::Gaussian;
  bad.tau = 0.0;
  CHECK_THROWS_AS(eval(bad, Point{1.0}, Point{1.0}), Error);
  CHECK_THROWS_AS(Kernel::exponential(-1.0), Error);
  CHECK_THROWS_AS(parse_kernel_family("bogus"), Error);
}

TEST_CASE("family names round-trip") {
  for (auto f : {KernelFamily::Exponential, KernelFamily::Gaussian, KernelFamily::DiagonalIndicator,
                 KernelFamily::Constant, KernelFamily::BlockConstant, KernelFamily::ProjectionMatrix}) {
    CHECK(parse_kernel_family(to_string(f)) == f);
  }
  CHECK(parse_kernel_family("K1") == KernelFamily::Exponential);
  CHECK(parse_kernel_family("K2") == KernelFamily::Gaussian);
}

TEST_CASE("gram: constant kernel gives the all-ones matrix") {
  const GramMatrix g = gram(Kernel::constant(1.0), {{0.0}, {5.0}, {-2.0}});
  CHECK(g.size() == 3);
  CHECK(g.entries() == Eigen::MatrixXd::Ones(3, 3));
}

TEST_CASE("gram: Gaussian on {0, 1}") {
  const GramMatrix g = gram(Kernel::gaussian(1.0), {{0.0}, {1.0}});
  CHECK(g(0, 0) == 1.0);
  CHECK(g(1, 1) == 1.0);
  CHECK(g(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(g(1, 0) == g(0, 1));
}

TEST_CASE("gram: empty point list") {
  const GramMatrix g = gram(Kernel::gaussian(1.0), {});
  CHECK(g.size() == 0);
  CHECK(per_alpha_exact(g.entries(), 2.5) == 1.0);
}

TEST_CASE("gram: dimension mismatch") {
  CHECK_THROWS_AS(gram(Kernel::gaussian(1.0), {{0.0}, {1.0, 2.0}}), Error);
}

TEST_CASE("gram: symmetric, nonnegative, unit diagonal") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  PointSet pts;
  for (int i = 0; i < 25; ++i) pts.push_back({nd(rng), nd(rng), nd(rng)});
  for (const Kernel& k : {Kernel::gaussian(0.7), Kernel::exponential(1.3)}) {
    const GramMatrix g = gram(k, pts);
    CHECK(g.entries() == g.entries().transpose());
    CHECK((g.entries().array() >= 0.0).all());
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g(i, i) == 1.0);
  }
}

TEST_CASE("gram: block constant structure") {
  const Kernel k = Kernel::block_constant({2.0, 0.5, 3.0});
  const PointSet pts{{0}, {2}, {0}, {1}, {2}};
  const GramMatrix g = gram(k, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const double expected = pts[i][0] == pts[j][0] ? k.table[static_cast<std::size_t>(pts[i][0])] : 0.0;
      CHECK(g(i, j) == expected);
    }
  }
}

TEST_CASE("projection kernel validation") {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(3, 3);
  p(0, 0) = p(0, 1) = p(1, 0) = p(1, 1) = 0.5;
  p(2, 2) = 1.0;
  const Kernel k = Kernel::projection(p);
  CHECK(eval(k, Point{0}, Point{1}) == 0.5);
  CHECK_THROWS_AS(eval(k, Point{3}, Point{1}), Error);
  Eigen::MatrixXd not_idempotent = Eigen::MatrixXd::Ones(2, 2);
  CHECK_THROWS_AS(Kernel::projection(not_idempotent), Error);
}

TEST_CASE("query column and extend") {
  const Kernel k = Kernel::gaussian(1.0);
  const PointSet x{{0.0}, {1.0}};
  const QueryColumn q = query_column(k, {0.5}, x);
  CHECK(q.self == 1.0);
  REQUIRE(q.cross.size() == 2);
  const Eigen::MatrixXd full = extend(gram(k, x), q);
  const GramMatrix direct = gram(k, {{0.0}, {1.0}, {0.5}});
  CHECK((full - direct.entries()).cwiseAbs().maxCoeff() == 0.0);
}
