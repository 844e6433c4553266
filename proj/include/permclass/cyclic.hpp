#pragma once

#include <string>
#include <vector>

#include "permclass/graded.hpp"
#include "permclass/kernel.hpp"

namespace permclass {

/// Truncation order k of the cyclic expansion: the query point sits in
/// cycles of length at most k+1 (0 = uni-cycle ... 3 = four-cycle).
class ApproxOrder {
 public:
  constexpr explicit ApproxOrder(int k = 3) : k_(k) {
    if (k < 0 || k > 3) throw Error("approximation order must be in 0..3");
  }
  constexpr int k() const { return k_; }
  std::string name() const;
  constexpr bool operator==(const ApproxOrder&) const = default;

 private:
  int k_;
};

/// Leave-one-out and leave-two-out denominators of the cyclic recursion for
/// a fixed training set. Depends only on the training points.
///
/// A table built at order m stores the level-1 loo values when m >= 1, and
/// the level-2 loo plus level-1 leave-two-out values when m >= 2. It serves
/// queries up to order m + 1.
template <class Scalar>
struct BasicRatioTable {
  GramMatrix gram;
  Scalar alpha{};
  ApproxOrder order{0};
  /// R^(1)(x_i; x_{-i})
  std::vector<Scalar> r1_loo;
  /// R^(2)(x_i; x_{-i})
  std::vector<Scalar> r2_loo;
  /// R^(1)(x_j; x_{-i-j}) at [i * n + j], i != j
  std::vector<Scalar> r1_l2o;

  std::size_t size() const { return gram.size(); }
  const Scalar& r1_leave_two_out(std::size_t i, std::size_t j) const {
    return r1_l2o[i * size() + j];
  }
  bool supports(ApproxOrder query) const { return query.k() <= order.k() + 1; }
};

using RatioTable = BasicRatioTable<double>;
/// Same recursion with alpha carried symbolically, for alpha -> 0+ limits.
using CyclicTable = BasicRatioTable<GradedValue>;

/// Throws DegenerateError naming the first point with K(x_i, x_i) <= 0.
RatioTable build_ratio_table(const GramMatrix& gram, double alpha, ApproxOrder order);
CyclicTable build_cyclic_table(const GramMatrix& gram, ApproxOrder order);

/// R^(k)(t; x). Negative results are returned as computed and logged.
double ratio_approx(const QueryColumn& q, const RatioTable& table, ApproxOrder order);
double ratio_approx(const Kernel& kernel, const Point& t, const RatioTable& table,
                    ApproxOrder order);

/// C^(k)(t; x) = lim_{alpha -> 0+} R^(k)(t; x), x nonempty.
double cyclic_ratio_approx(const QueryColumn& q, const CyclicTable& table, ApproxOrder order);
double cyclic_ratio_approx(const Point& t, const PointSet& x, const Kernel& kernel,
                           ApproxOrder order);
GradedValue graded_ratio_approx(const QueryColumn& q, const CyclicTable& table,
                                ApproxOrder order);

enum class BlockStructure { Diagonal, Constant, BlockConstant };

struct BlockDecomposition {
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<double> levels;
};

/// Validates that K(x) has the declared structure and returns its blocks
/// (singletons for Diagonal, one block for Constant). Throws Error otherwise.
BlockDecomposition detect_block_structure(const GramMatrix& gram, BlockStructure structure);

/// Exact ratio for diagonal, constant or block-diagonal-with-constant-blocks
/// K(x). The query column K(t, x) is unrestricted.
double closed_form_ratio(const QueryColumn& q, const GramMatrix& gram, double alpha,
                         BlockStructure structure);
double closed_form_ratio(const Point& t, const PointSet& x, const Kernel& kernel, double alpha,
                         BlockStructure structure);

}  // namespace permclass
