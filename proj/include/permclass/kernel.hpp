#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace permclass {

using Point = std::vector<double>;
using PointSet = std::vector<Point>;

enum class KernelFamily {
  Exponential,        // exp(-|s-t| / tau)
  Gaussian,           // exp(-|s-t|^2 / tau^2)
  DiagonalIndicator,  // f(s) if s == t, else 0
  Constant,           // c
  BlockConstant,      // level of block(s) if block(s) == block(t), else 0
  ProjectionMatrix,   // explicit matrix over an indexed ground set
};

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

/// Covariance function family and parameters.
///
/// Index-based families (DiagonalIndicator with a table, BlockConstant,
/// ProjectionMatrix) read an integer from coordinate 0 of each point:
/// the ground-set index for DiagonalIndicator and ProjectionMatrix, the
/// block id for BlockConstant.
struct Kernel {
  KernelFamily family = KernelFamily::Gaussian;
  double tau = 1.0;
  double c = 1.0;
  /// DiagonalIndicator: f by ground index (empty means f == c).
  /// BlockConstant: level per block id (empty means every level is c).
  std::vector<double> table;
  /// ProjectionMatrix only.
  Eigen::MatrixXd matrix;

  static Kernel exponential(double tau);
  static Kernel gaussian(double tau);
  static Kernel constant(double c);
  static Kernel diagonal(double f);
  static Kernel diagonal(std::vector<double> f_by_index);
  static Kernel block_constant(std::vector<double> levels);
  static Kernel projection(Eigen::MatrixXd m);

  /// Throws Error on non-positive tau/c, negative table entries, or a
  /// projection matrix that is not symmetric, nonnegative and idempotent.
  void validate() const;

  bool operator==(const Kernel& other) const;
};

/// Kernel value k(s, t). Symmetric and nonnegative for every family.
double eval(const Kernel& kernel, std::span<const double> s, std::span<const double> t);

/// Symmetric Gram matrix K(x) together with the points it was built from.
class GramMatrix {
 public:
  GramMatrix() = default;
  GramMatrix(Eigen::MatrixXd entries, PointSet points);

  /// Wraps an explicit matrix with no associated feature vectors. The
  /// matrix must be exactly symmetric.
  static GramMatrix from_matrix(Eigen::MatrixXd entries);

  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
  bool empty() const { return size() == 0; }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::MatrixXd& entries() const { return entries_; }
  const Eigen::VectorXd& diagonal() const { return diagonal_; }
  const PointSet& points() const { return points_; }

 private:
  Eigen::MatrixXd entries_;
  Eigen::VectorXd diagonal_;
  PointSet points_;
};

GramMatrix gram(const Kernel& kernel, const PointSet& points);

/// Kernel column of a query point against a point set: K(t,t) and K(t, x_i).
struct QueryColumn {
  double self = 0.0;
  std::vector<double> cross;
};

QueryColumn query_column(const Kernel& kernel, const Point& t, const PointSet& x);

/// (n+1)x(n+1) matrix K(x u t) with the query in the last row and column.
Eigen::MatrixXd extend(const GramMatrix& gx, const QueryColumn& q);

/// Principal submatrix on the given indices, in the given order.
Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& a, std::span<const std::size_t> indices);

double euclidean_distance(std::span<const double> s, std::span<const double> t);

}  // namespace permclass
