#include "permclass/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "permclass/error.hpp"

namespace permclass {

namespace {

constexpr std::pair<KernelFamily, std::string_view> kFamilyNames[] = {
    {KernelFamily::Exponential, "exponential"},
    {KernelFamily::Gaussian, "gaussian"},
    {KernelFamily::DiagonalIndicator, "diagonal"},
    {KernelFamily::Constant, "constant"},
    {KernelFamily::BlockConstant, "block_constant"},
    {KernelFamily::ProjectionMatrix, "projection"},
};

std::size_t ground_index(std::span<const double> p, std::size_t limit, const char* what) {
  if (p.empty()) throw Error(std::string(what) + ": point has no coordinates");
  const double v = p[0];
  if (!(v >= 0.0) || v != std::floor(v) || v >= static_cast<double>(limit)) {
    throw Error(std::string(what) + ": coordinate 0 is not a valid index (" + std::to_string(v) +
                ")");
  }
  return static_cast<std::size_t>(v);
}

long block_id(std::span<const double> p) {
  if (p.empty()) throw Error("block_constant: point has no coordinates");
  const double v = p[0];
  if (v != std::floor(v)) throw Error("block_constant: block id must be integral");
  return static_cast<long>(v);
}

void check_same_dimension(std::span<const double> s, std::span<const double> t) {
  if (s.size() != t.size()) {
    throw Error("kernel: dimension mismatch (" + std::to_string(s.size()) + " vs " +
                std::to_string(t.size()) + ")");
  }
}

}  // namespace

std::string_view to_string(KernelFamily family) {
  for (const auto& [f, name] : kFamilyNames) {
    if (f == family) return name;
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  for (const auto& [f, n] : kFamilyNames) {
    if (n == name) return f;
  }
  if (name == "K1" || name == "k1") return KernelFamily::Exponential;
  if (name == "K2" || name == "k2") return KernelFamily::Gaussian;
  throw Error("unknown kernel family '" + std::string(name) + "'");
}

Kernel Kernel::exponential(double tau) {
  Kernel k;
  k.family = KernelFamily::Exponential;
  k.tau = tau;
  k.validate();
  return k;
}

Kernel Kernel::gaussian(double tau) {
  Kernel k;
  k.family = KernelFamily::Gaussian;
  k.tau = tau;
  k.validate();
  return k;
}

Kernel Kernel::constant(double c) {
  Kernel k;
  k.family = KernelFamily::Constant;
  k.c = c;
  k.validate();
  return k;
}

Kernel Kernel::diagonal(double f) {
  Kernel k;
  k.family = KernelFamily::DiagonalIndicator;
  k.c = f;
  k.validate();
  return k;
}

Kernel Kernel::diagonal(std::vector<double> f_by_index) {
  Kernel k;
  k.family = KernelFamily::DiagonalIndicator;
  k.table = std::move(f_by_index);
  k.validate();
  return k;
}

Kernel Kernel::block_constant(std::vector<double> levels) {
  Kernel k;
  k.family = KernelFamily::BlockConstant;
  k.table = std::move(levels);
  k.validate();
  return k;
}

Kernel Kernel::projection(Eigen::MatrixXd m) {
  Kernel k;
  k.family = KernelFamily::ProjectionMatrix;
  k.matrix = std::move(m);
  k.validate();
  return k;
}

void Kernel::validate() const {
  switch (family) {
    case KernelFamily::Exponential:
    case KernelFamily::Gaussian:
      if (!(tau > 0.0) || !std::isfinite(tau)) throw Error("kernel: tau must be positive");
      break;
    case KernelFamily::Constant:
      if (!(c > 0.0)) throw Error("kernel: c must be positive");
      break;
    case KernelFamily::DiagonalIndicator:
    case KernelFamily::BlockConstant:
      if (table.empty() && !(c > 0.0)) throw Error("kernel: c must be positive");
      for (double v : table) {
        if (!(v >= 0.0)) throw Error("kernel: table entries must be nonnegative");
      }
      break;
    case KernelFamily::ProjectionMatrix: {
      if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
        throw Error("projection kernel: matrix must be square and nonempty");
      }
      if ((matrix.array() < 0.0).any()) {
        throw Error("projection kernel: entries must be nonnegative");
      }
      if (matrix != matrix.transpose()) throw Error("projection kernel: matrix is not symmetric");
      const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
      if (((matrix * matrix) - matrix).cwiseAbs().maxCoeff() > 1e-9 * scale) {
        throw Error("projection kernel: matrix is not idempotent");
      }
      break;
    }
  }
}

bool Kernel::operator==(const Kernel& other) const {
  return family == other.family && tau == other.tau && c == other.c && table == other.table &&
         matrix.rows() == other.matrix.rows() && matrix.cols() == other.matrix.cols() &&
         matrix == other.matrix;
}

double euclidean_distance(std::span<const double> s, std::span<const double> t) {
  check_same_dimension(s, t);
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double d = s[i] - t[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double eval(const Kernel& kernel, std::span<const double> s, std::span<const double> t) {
  check_same_dimension(s, t);
  switch (kernel.family) {
    case KernelFamily::Exponential: {
      if (!(kernel.tau > 0.0)) throw Error("kernel: tau must be positive");
      return std::exp(-euclidean_distance(s, t) / kernel.tau);
    }
    case KernelFamily::Gaussian: {
      if (!(kernel.tau > 0.0)) throw Error("kernel: tau must be positive");
      double d2 = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) d2 += (s[i] - t[i]) * (s[i] - t[i]);
      return std::exp(-d2 / (kernel.tau * kernel.tau));
    }
    case KernelFamily::Constant:
      return kernel.c;
    case KernelFamily::DiagonalIndicator: {
      if (!std::equal(s.begin(), s.end(), t.begin())) return 0.0;
      if (kernel.table.empty()) return kernel.c;
      return kernel.table[ground_index(s, kernel.table.size(), "diagonal kernel")];
    }
    case KernelFamily::BlockConstant: {
      const long bs = block_id(s);
      if (bs != block_id(t)) return 0.0;
      if (kernel.table.empty()) return kernel.c;
      if (bs < 0 || static_cast<std::size_t>(bs) >= kernel.table.size()) {
        throw Error("block_constant: block id " + std::to_string(bs) + " has no level");
      }
      return kernel.table[static_cast<std::size_t>(bs)];
    }
    case KernelFamily::ProjectionMatrix: {
      const auto limit = static_cast<std::size_t>(kernel.matrix.rows());
      const auto i = ground_index(s, limit, "projection kernel");
      const auto j = ground_index(t, limit, "projection kernel");
      return kernel.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  throw Error("kernel: unknown family");
}

GramMatrix::GramMatrix(Eigen::MatrixXd entries, PointSet points)
    : entries_(std::move(entries)), points_(std::move(points)) {
  if (entries_.rows() != entries_.cols()) throw Error("gram: matrix must be square");
  if (!points_.empty() && points_.size() != size()) {
    throw Error("gram: point count does not match matrix size");
  }
  if (entries_ != entries_.transpose()) throw Error("gram: matrix must be symmetric");
  diagonal_ = entries_.diagonal();
}

GramMatrix GramMatrix::from_matrix(Eigen::MatrixXd entries) {
  return GramMatrix(std::move(entries), {});
}

GramMatrix gram(const Kernel& kernel, const PointSet& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  for (const auto& p : points) {
    if (p.size() != points.front().size()) throw Error("gram: points differ in dimension");
  }
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = eval(kernel, points[static_cast<std::size_t>(i)],
                            points[static_cast<std::size_t>(j)]);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return GramMatrix(std::move(k), points);
}

QueryColumn query_column(const Kernel& kernel, const Point& t, const PointSet& x) {
  QueryColumn q;
  q.self = eval(kernel, t, t);
  q.cross.reserve(x.size());
  for (const auto& xi : x) q.cross.push_back(eval(kernel, t, xi));
  return q;
}

Eigen::MatrixXd extend(const GramMatrix& gx, const QueryColumn& q) {
  const auto n = static_cast<Eigen::Index>(gx.size());
  if (q.cross.size() != gx.size()) throw Error("extend: query column does not match gram size");
  Eigen::MatrixXd a(n + 1, n + 1);
  a.topLeftCorner(n, n) = gx.entries();
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, n) = q.cross[static_cast<std::size_t>(i)];
    a(n, i) = q.cross[static_cast<std::size_t>(i)];
  }
  a(n, n) = q.self;
  return a;
}

Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& a, std::span<const std::size_t> indices) {
  const auto m = static_cast<Eigen::Index>(indices.size());
  Eigen::MatrixXd sub(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      sub(i, j) = a(static_cast<Eigen::Index>(indices[static_cast<std::size_t>(i)]),
                    static_cast<Eigen::Index>(indices[static_cast<std::size_t>(j)]));
    }
  }
  return sub;
}

}  // namespace permclass
