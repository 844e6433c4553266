#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "permclass/kernel.hpp"

namespace permclass {

/// Size cap for brute-force permutation enumeration.
struct ExactLimits {
  std::size_t max_n = 11;
};

/// Set partition of {0..n-1}. Blocks are nonempty and disjoint.
struct Partition {
  std::vector<std::vector<std::size_t>> blocks;

  std::size_t block_count() const { return blocks.size(); }
  std::size_t element_count() const;
  /// Throws Error unless the blocks are nonempty, disjoint and cover {0..n-1}.
  void validate(std::size_t n) const;
  /// Partition induced by block ids (any integers); blocks ordered by first
  /// occurrence.
  static Partition from_labels(std::span<const int> labels);
  bool operator==(const Partition&) const = default;
};

/// Sums of permutation products grouped by number of cycles:
/// coefficients[c] = sum over permutations with c cycles of prod_i A[i, s(i)].
/// per_alpha(A) = sum_c alpha^c coefficients[c].
struct CyclePolynomial {
  std::vector<double> coefficients;

  double evaluate(double alpha) const;
};

CyclePolynomial cycle_polynomial(const Eigen::MatrixXd& a, ExactLimits limits = {});

/// alpha-permanent by enumeration of all n! permutations. per over 0x0 is 1.
double per_alpha_exact(const Eigen::MatrixXd& a, double alpha, ExactLimits limits = {});

/// Sum of cyclic products over the (n-1)! single-cycle permutations.
double cyp_exact(const Eigen::MatrixXd& a, ExactLimits limits = {});

/// per_alpha{K(x u t)} / per_alpha{K(x)}.
double ratio_exact(const GramMatrix& gx, const QueryColumn& q, double alpha,
                   ExactLimits limits = {});
double ratio_exact(const Point& t, const PointSet& x, const Kernel& kernel, double alpha,
                   ExactLimits limits = {});

/// cyp{K(x u t)} / cyp{K(x)}; x must be nonempty.
double cyclic_ratio_exact(const GramMatrix& gx, const QueryColumn& q, ExactLimits limits = {});
double cyclic_ratio_exact(const Point& t, const PointSet& x, const Kernel& kernel,
                          ExactLimits limits = {});

/// Conditional probability of the label vector y (ids 1..k) given x, with
/// one alpha per class.
double label_probability_exact(const PointSet& x, std::span<const int> labels,
                               std::span<const double> alphas, const Kernel& kernel,
                               ExactLimits limits = {});

/// Probability of the unlabelled partition B given x under the
/// infinitely-many-classes limit with total weight lambda.
double partition_probability_exact(const PointSet& x, const Partition& partition, double lambda,
                                   const Kernel& kernel, ExactLimits limits = {});

}  // namespace permclass
