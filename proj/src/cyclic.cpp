#include "permclass/cyclic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <spdlog/spdlog.h>

#include "permclass/error.hpp"
#include "permclass/parallel.hpp"

namespace permclass {

namespace {

template <class T>
T lift(double v);

template <>
double lift<double>(double v) {
  return v;
}

template <>
GradedValue lift<GradedValue>(double v) {
  return GradedValue::constant(v);
}

// sum_k a[k] * b[k] over k in [0, n) \ {i, j}, as three contiguous runs.
double dot_excluding(const double* a, const double* b, std::size_t n, std::size_t i,
                     std::size_t j) {
  const std::size_t lo = std::min(i, j);
  const std::size_t hi = std::max(i, j);
  double s = 0.0;
  for (std::size_t k = 0; k < lo; ++k) s += a[k] * b[k];
  for (std::size_t k = lo + 1; k < hi; ++k) s += a[k] * b[k];
  for (std::size_t k = hi + 1; k < n; ++k) s += a[k] * b[k];
  return s;
}

void check_diagonal(const GramMatrix& g) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g(i, i) > 0.0)) {
      throw DegenerateError("ratio table: point " + std::to_string(i) +
                            " has non-positive self-similarity K(x_i, x_i) = " +
                            std::to_string(g(i, i)));
    }
  }
}

template <class T>
BasicRatioTable<T> build_table(const GramMatrix& g, T alpha, ApproxOrder order) {
  check_diagonal(g);
  BasicRatioTable<T> table;
  table.gram = g;
  table.alpha = alpha;
  table.order = order;
  const std::size_t n = g.size();
  if (order.k() < 1 || n == 0) return table;

  const Eigen::MatrixXd& k = g.entries();
  const Eigen::VectorXd inv_diag = g.diagonal().cwiseInverse();
  const double* kdata = k.data();
  auto col = [&](std::size_t j) { return kdata + j * n; };

  // R^(1)(x_i; x_{-i}) = alpha K_ii + sum_{j != i} K_ij^2 / K_jj
  table.r1_loo.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) s += k(j, i) * k(j, i) * inv_diag(j);
    }
    table.r1_loo[i] = alpha * g(i, i) + lift<T>(s);
  }
  if (order.k() < 2) return table;

  table.r1_l2o.assign(n * n, T{});
  table.r2_loo.resize(n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<double> scaled(n);
    // R^(1)(x_j; x_{-i-j}) = alpha K_jj + sum_{k != i,j} K_jk^2 / K_kk
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double* kj = col(j);
      for (std::size_t m = 0; m < n; ++m) scaled[m] = kj[m] * inv_diag(static_cast<Eigen::Index>(m));
      table.r1_l2o[i * n + j] = alpha * g(j, j) + lift<T>(dot_excluding(kj, scaled.data(), n, i, j));
    }
    // R^(2)(x_i; x_{-i}) with x_i as the query against x_{-i}
    const double* ki = col(i);
    for (std::size_t m = 0; m < n; ++m) scaled[m] = ki[m] * inv_diag(static_cast<Eigen::Index>(m));
    T acc = alpha * g(i, i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || ki[j] == 0.0) continue;
      const double path = ki[j] * dot_excluding(col(j), scaled.data(), n, i, j);
      acc += (alpha * (ki[j] * ki[j]) + lift<T>(path)) / table.r1_l2o[i * n + j];
    }
    table.r2_loo[i] = acc;
  });
  return table;
}

template <class T>
T evaluate(const QueryColumn& q, const BasicRatioTable<T>& table, ApproxOrder order) {
  const std::size_t n = table.size();
  if (q.cross.size() != n) throw Error("ratio_approx: query column does not match table size");
  if (!table.supports(order)) {
    throw Error("ratio_approx: table built at order " + std::to_string(table.order.k()) +
                " cannot serve order " + std::to_string(order.k()));
  }
  const T& alpha = table.alpha;
  T result = alpha * q.self;
  if (order.k() == 0 || n == 0) return result;

  const GramMatrix& g = table.gram;
  const double* kdata = g.entries().data();
  auto col = [&](std::size_t j) { return kdata + j * n; };
  const std::vector<double>& kt = q.cross;
  std::vector<double> u(n);
  for (std::size_t m = 0; m < n; ++m) u[m] = kt[m] / g(m, m);

  if (order.k() == 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += kt[i] * u[i];
    return result + lift<T>(s);
  }

  if (order.k() == 2) {
    T acc{};
    for (std::size_t i = 0; i < n; ++i) {
      if (kt[i] == 0.0) continue;
      const double three = kt[i] * dot_excluding(col(i), u.data(), n, i, i);
      acc += (alpha * (kt[i] * kt[i]) + lift<T>(three)) / table.r1_loo[i];
    }
    return result + acc;
  }

  // Four-cycle: the innermost alpha / R^(0)(x_k) collapses to 1 / K_kk.
  T acc{};
  for (std::size_t i = 0; i < n; ++i) {
    if (kt[i] == 0.0) continue;
    const double* ki = col(i);
    T bracket = alpha * (kt[i] * kt[i]);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || ki[j] == 0.0) continue;
      const double lead = kt[i] * ki[j];
      const double four = lead * dot_excluding(col(j), u.data(), n, i, j);
      bracket += (alpha * (lead * kt[j]) + lift<T>(four)) / table.r1_leave_two_out(i, j);
    }
    acc += bracket / table.r2_loo[i];
  }
  return result + acc;
}

}  // namespace

std::string ApproxOrder::name() const {
  static constexpr const char* names[] = {"uni-cycle", "two-cycle", "three-cycle", "four-cycle"};
  return names[k_];
}

RatioTable build_ratio_table(const GramMatrix& gram, double alpha, ApproxOrder order) {
  if (!(alpha > 0.0)) throw Error("build_ratio_table: alpha must be positive");
  RatioTable table = build_table<double>(gram, alpha, order);
  for (std::size_t i = 0; i < table.r2_loo.size(); ++i) {
    if (table.r2_loo[i] < 0.0) {
      spdlog::warn("ratio table: negative three-cycle denominator at point {} ({})", i,
                   table.r2_loo[i]);
    }
  }
  return table;
}

CyclicTable build_cyclic_table(const GramMatrix& gram, ApproxOrder order) {
  return build_table<GradedValue>(gram, GradedValue::alpha(), order);
}

double ratio_approx(const QueryColumn& q, const RatioTable& table, ApproxOrder order) {
  const double r = evaluate<double>(q, table, order);
  if (r < 0.0) spdlog::warn("ratio_approx: negative {} approximation {}", order.name(), r);
  return r;
}

double ratio_approx(const Kernel& kernel, const Point& t, const RatioTable& table,
                    ApproxOrder order) {
  return ratio_approx(query_column(kernel, t, table.gram.points()), table, order);
}

GradedValue graded_ratio_approx(const QueryColumn& q, const CyclicTable& table,
                                ApproxOrder order) {
  if (table.size() == 0) throw Error("cyclic_ratio_approx: undefined for an empty point set");
  if (order.k() >= 2 && table.size() >= 2) {
    // A point with no similarity to the rest of x cannot lie on any cycle
    // through two or more points, so cyp{K(x)} vanishes.
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (table.r1_loo[i].lead > 0) {
        throw DegenerateError("cyclic_ratio_approx: degenerate configuration, point " +
                              std::to_string(i) + " has zero similarity to every other point");
      }
    }
  }
  return evaluate<GradedValue>(q, table, order);
}

double cyclic_ratio_approx(const QueryColumn& q, const CyclicTable& table, ApproxOrder order) {
  return graded_ratio_approx(q, table, order).limit();
}

double cyclic_ratio_approx(const Point& t, const PointSet& x, const Kernel& kernel,
                           ApproxOrder order) {
  if (x.empty()) throw Error("cyclic_ratio_approx: undefined for an empty point set");
  const CyclicTable table = build_cyclic_table(gram(kernel, x), ApproxOrder(std::max(order.k() - 1, 0)));
  return cyclic_ratio_approx(query_column(kernel, t, x), table, order);
}

BlockDecomposition detect_block_structure(const GramMatrix& gram, BlockStructure structure) {
  const std::size_t n = gram.size();
  BlockDecomposition out;
  // Connected components of the nonzero pattern.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (gram(i, j) != 0.0) parent[find(i)] = find(j);
    }
  }
  std::vector<std::size_t> root_to_block(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (root_to_block[r] == n) {
      root_to_block[r] = out.blocks.size();
      out.blocks.emplace_back();
      out.levels.push_back(gram(i, i));
    }
    out.blocks[root_to_block[r]].push_back(i);
  }
  for (std::size_t b = 0; b < out.blocks.size(); ++b) {
    const double level = out.levels[b];
    if (level == 0.0) throw Error("closed_form_ratio: block " + std::to_string(b) + " has level 0");
    for (std::size_t i : out.blocks[b]) {
      for (std::size_t j : out.blocks[b]) {
        if (gram(i, j) != level) {
          throw Error("closed_form_ratio: K(x) is not constant on block " + std::to_string(b));
        }
      }
    }
  }
  if (structure == BlockStructure::Diagonal && out.blocks.size() != n) {
    throw Error("closed_form_ratio: K(x) is not diagonal");
  }
  if (structure == BlockStructure::Constant && out.blocks.size() > 1) {
    throw Error("closed_form_ratio: K(x) is not constant");
  }
  return out;
}

double closed_form_ratio(const QueryColumn& q, const GramMatrix& gram, double alpha,
                         BlockStructure structure) {
  if (!(alpha > 0.0)) throw Error("closed_form_ratio: alpha must be positive");
  if (q.cross.size() != gram.size()) throw Error("closed_form_ratio: query size mismatch");
  const BlockDecomposition blocks = detect_block_structure(gram, structure);
  double r = alpha * q.self;
  for (std::size_t b = 0; b < blocks.blocks.size(); ++b) {
    const auto& members = blocks.blocks[b];
    // loo denominator inside a constant block: c_b (alpha + |b| - 1)
    const double denom = blocks.levels[b] * (alpha + static_cast<double>(members.size()) - 1.0);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i : members) {
      sum += q.cross[i];
      sum_sq += q.cross[i] * q.cross[i];
    }
    r += alpha * sum_sq / denom;
    if (members.size() >= 2) r += (sum * sum - sum_sq) / denom;
  }
  return r;
}

double closed_form_ratio(const Point& t, const PointSet& x, const Kernel& kernel, double alpha,
                         BlockStructure structure) {
  return closed_form_ratio(query_column(kernel, t, x), gram(kernel, x), alpha, structure);
}

}  // namespace permclass
