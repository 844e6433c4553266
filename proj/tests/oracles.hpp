#pragma once

// Brute-force reference implementations used by the tests. They share no
// code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline int count_cycles(const std::vector<int>& perm) {
  std::vector<bool> seen(perm.size(), false);
  int cycles = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    ++cycles;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(perm[j])) seen[j] = true;
  }
  return cycles;
}

/// sum over all permutations via std::next_permutation.
inline double per_alpha(const Eigen::MatrixXd& a, double alpha) {
  const int n = static_cast<int>(a.rows());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  long double total = 0.0L;
  do {
    long double prod = std::pow(static_cast<long double>(alpha), count_cycles(perm));
    for (int i = 0; i < n; ++i) prod *= a(i, perm[static_cast<std::size_t>(i)]);
    total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(total);
}

inline double cyp(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  long double total = 0.0L;
  do {
    if (count_cycles(perm) != 1) continue;
    long double prod = 1.0L;
    for (int i = 0; i < n; ++i) prod *= a(i, perm[static_cast<std::size_t>(i)]);
    total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(total);
}

/// Determinant by Gaussian elimination with partial pivoting.
inline double det(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  double d = 1.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index p = c;
    for (Eigen::Index r = c + 1; r < n; ++r) {
      if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
    }
    if (a(p, c) == 0.0) return 0.0;
    if (p != c) {
      a.row(p).swap(a.row(c));
      d = -d;
    }
    d *= a(c, c);
    for (Eigen::Index r = c + 1; r < n; ++r) {
      const double f = a(r, c) / a(c, c);
      for (Eigen::Index k = c; k < n; ++k) a(r, k) -= f * a(c, k);
    }
  }
  return d;
}

inline Eigen::MatrixXd submatrix(const Eigen::MatrixXd& a, const std::vector<int>& idx) {
  Eigen::MatrixXd s(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j < idx.size(); ++j) s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(idx[i], idx[j]);
  }
  return s;
}

/// All set partitions of {0..n-1} as restricted growth strings.
inline std::vector<std::vector<int>> set_partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int i, int blocks) {
    if (i == n) {
      out.push_back(rgs);
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      rgs[static_cast<std::size_t>(i)] = b;
      rec(i + 1, std::max(blocks, b + 1));
    }
  };
  if (n == 0) return {{}};
  rec(0, 0);
  return out;
}

/// Ewens probability of a partition with the given block sizes.
inline double ewens(const std::vector<int>& block_sizes, double lambda) {
  int n = 0;
  double num = std::pow(lambda, static_cast<double>(block_sizes.size()));
  for (int s : block_sizes) {
    n += s;
    for (int f = 2; f < s; ++f) num *= f;
  }
  double den = 1.0;
  for (int i = 0; i < n; ++i) den *= lambda + i;
  return num / den;
}

inline Eigen::MatrixXd random_symmetric_nonnegative(int n, std::mt19937_64& rng, double lo = 0.05,
                                                    double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) a(i, j) = a(j, i) = u(rng);
  }
  return a;
}

inline Eigen::MatrixXd random_general(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = u(rng);
  }
  return a;
}

inline double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace oracle
