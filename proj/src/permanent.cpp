#include "permclass/permanent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "permclass/error.hpp"

namespace permclass {

namespace {

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

void check_limit(std::size_t n, const ExactLimits& limits, const char* what) {
  if (n > limits.max_n) {
    throw SizeLimitError(std::string(what) + ": exact size limit exceeded (n=" + std::to_string(n) +
                         ", cap=" + std::to_string(limits.max_n) + ")");
  }
}

// Depth-first enumeration of permutations row by row. Partial assignments
// form disjoint chains; assigning s(row) = col either closes the chain
// ending at row into a cycle or splices two chains together, so the cycle
// count is known at every leaf without a separate decomposition pass.
class PermutationEnumerator {
 public:
  PermutationEnumerator(const Eigen::MatrixXd& a, bool single_cycle_only)
      : n_(static_cast<int>(a.rows())),
        single_cycle_only_(single_cycle_only),
        entries_(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_)),
        head_of_tail_(static_cast<std::size_t>(n_)),
        tail_of_head_(static_cast<std::size_t>(n_)),
        col_used_(static_cast<std::size_t>(n_), 0),
        sums_(static_cast<std::size_t>(n_) + 1) {
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) entries_[idx(i, j)] = a(i, j);
      head_of_tail_[static_cast<std::size_t>(i)] = i;
      tail_of_head_[static_cast<std::size_t>(i)] = i;
    }
  }

  CyclePolynomial run() {
    descend(0, 1.0, 0);
    CyclePolynomial poly;
    poly.coefficients.reserve(sums_.size());
    for (const auto& s : sums_) poly.coefficients.push_back(s.value());
    return poly;
  }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }

  void descend(int row, double prod, int cycles) {
    if (row == n_) {
      sums_[static_cast<std::size_t>(cycles)].add(prod);
      return;
    }
    const double* arow = &entries_[idx(row, 0)];
    const int head = head_of_tail_[static_cast<std::size_t>(row)];
    for (int col = 0; col < n_; ++col) {
      const auto ucol = static_cast<std::size_t>(col);
      if (col_used_[ucol] != 0) continue;
      const double v = arow[col];
      if (v == 0.0) continue;
      col_used_[ucol] = 1;
      if (col == head) {
        if (!single_cycle_only_ || row == n_ - 1) descend(row + 1, prod * v, cycles + 1);
      } else {
        const int tail = tail_of_head_[ucol];
        tail_of_head_[static_cast<std::size_t>(head)] = tail;
        head_of_tail_[static_cast<std::size_t>(tail)] = head;
        descend(row + 1, prod * v, cycles);
        tail_of_head_[static_cast<std::size_t>(head)] = row;
        head_of_tail_[static_cast<std::size_t>(tail)] = col;
      }
      col_used_[ucol] = 0;
    }
  }

  int n_;
  bool single_cycle_only_;
  std::vector<double> entries_;
  std::vector<int> head_of_tail_;
  std::vector<int> tail_of_head_;
  std::vector<char> col_used_;
  std::vector<CompensatedSum> sums_;
};

void check_square(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw Error("permanent: matrix must be square");
}

}  // namespace

std::size_t Partition::element_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.size();
  return n;
}

void Partition::validate(std::size_t n) const {
  std::vector<char> seen(n, 0);
  std::size_t count = 0;
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    if (blocks[bi].empty()) throw Error("partition: block " + std::to_string(bi) + " is empty");
    for (std::size_t i : blocks[bi]) {
      if (i >= n) throw Error("partition: index " + std::to_string(i) + " out of range");
      if (seen[i] != 0) throw Error("partition: index " + std::to_string(i) + " appears twice");
      seen[i] = 1;
      ++count;
    }
  }
  if (count != n) throw Error("partition: blocks do not cover all points");
}

Partition Partition::from_labels(std::span<const int> labels) {
  Partition p;
  std::vector<int> ids;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = std::find(ids.begin(), ids.end(), labels[i]);
    if (it == ids.end()) {
      ids.push_back(labels[i]);
      p.blocks.push_back({i});
    } else {
      p.blocks[static_cast<std::size_t>(it - ids.begin())].push_back(i);
    }
  }
  return p;
}

double CyclePolynomial::evaluate(double alpha) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * alpha + *it;
  return acc;
}

CyclePolynomial cycle_polynomial(const Eigen::MatrixXd& a, ExactLimits limits) {
  check_square(a);
  check_limit(static_cast<std::size_t>(a.rows()), limits, "per_alpha_exact");
  return PermutationEnumerator(a, false).run();
}

double per_alpha_exact(const Eigen::MatrixXd& a, double alpha, ExactLimits limits) {
  return cycle_polynomial(a, limits).evaluate(alpha);
}

double cyp_exact(const Eigen::MatrixXd& a, ExactLimits limits) {
  check_square(a);
  if (a.rows() == 0) throw Error("cyp_exact: undefined for an empty matrix");
  check_limit(static_cast<std::size_t>(a.rows()), limits, "cyp_exact");
  return PermutationEnumerator(a, true).run().coefficients[1];
}

double ratio_exact(const GramMatrix& gx, const QueryColumn& q, double alpha, ExactLimits limits) {
  check_limit(gx.size() + 1, limits, "ratio_exact");
  const double denom = per_alpha_exact(gx.entries(), alpha, limits);
  if (denom == 0.0) throw DegenerateError("ratio_exact: per_alpha{K(x)} is zero");
  return per_alpha_exact(extend(gx, q), alpha, limits) / denom;
}

double ratio_exact(const Point& t, const PointSet& x, const Kernel& kernel, double alpha,
                   ExactLimits limits) {
  check_limit(x.size() + 1, limits, "ratio_exact");
  return ratio_exact(gram(kernel, x), query_column(kernel, t, x), alpha, limits);
}

double cyclic_ratio_exact(const GramMatrix& gx, const QueryColumn& q, ExactLimits limits) {
  if (gx.empty()) throw Error("cyclic_ratio_exact: undefined for an empty point set");
  check_limit(gx.size() + 1, limits, "cyclic_ratio_exact");
  const double denom = cyp_exact(gx.entries(), limits);
  if (denom == 0.0) throw DegenerateError("cyclic_ratio_exact: cyp{K(x)} is zero");
  return cyp_exact(extend(gx, q), limits) / denom;
}

double cyclic_ratio_exact(const Point& t, const PointSet& x, const Kernel& kernel,
                          ExactLimits limits) {
  if (x.empty()) throw Error("cyclic_ratio_exact: undefined for an empty point set");
  check_limit(x.size() + 1, limits, "cyclic_ratio_exact");
  return cyclic_ratio_exact(gram(kernel, x), query_column(kernel, t, x), limits);
}

double label_probability_exact(const PointSet& x, std::span<const int> labels,
                               std::span<const double> alphas, const Kernel& kernel,
                               ExactLimits limits) {
  if (labels.size() != x.size()) throw Error("label_probability_exact: label count mismatch");
  check_limit(x.size(), limits, "label_probability_exact");
  const auto k = static_cast<int>(alphas.size());
  double alpha_total = 0.0;
  for (double a : alphas) {
    if (!(a > 0.0)) throw Error("label_probability_exact: alphas must be positive");
    alpha_total += a;
  }
  std::vector<std::vector<std::size_t>> members(alphas.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1 || labels[i] > k) {
      throw Error("label_probability_exact: label " + std::to_string(labels[i]) +
                  " outside 1.." + std::to_string(k));
    }
    members[static_cast<std::size_t>(labels[i] - 1)].push_back(i);
  }
  const GramMatrix g = gram(kernel, x);
  double numer = 1.0;
  for (std::size_t r = 0; r < members.size(); ++r) {
    numer *= per_alpha_exact(principal_submatrix(g.entries(), members[r]), alphas[r], limits);
  }
  const double denom = per_alpha_exact(g.entries(), alpha_total, limits);
  if (denom == 0.0) throw DegenerateError("label_probability_exact: per_alpha{K(x)} is zero");
  return numer / denom;
}

double partition_probability_exact(const PointSet& x, const Partition& partition, double lambda,
                                   const Kernel& kernel, ExactLimits limits) {
  if (!(lambda > 0.0)) throw Error("partition_probability_exact: lambda must be positive");
  partition.validate(x.size());
  check_limit(x.size(), limits, "partition_probability_exact");
  const GramMatrix g = gram(kernel, x);
  double numer = std::pow(lambda, static_cast<double>(partition.block_count()));
  for (const auto& block : partition.blocks) {
    numer *= cyp_exact(principal_submatrix(g.entries(), block), limits);
  }
  const double denom = per_alpha_exact(g.entries(), lambda, limits);
  if (denom == 0.0) throw DegenerateError("partition_probability_exact: per_lambda{K(x)} is zero");
  return numer / denom;
}

}  // namespace permclass
