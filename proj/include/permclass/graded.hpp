#pragma once

#include <string>
#include <utility>

#include "permclass/error.hpp"

namespace permclass {

/// Truncated series in alpha near 0+: alpha^lead * (c0 + c1 * alpha + O(alpha^2)).
///
/// Used to take the alpha -> 0+ limit of the cyclic recursions without
/// evaluating at a small numeric alpha. Zero is represented by c0 == c1 == 0
/// and is absorbing for multiplication. When c0 cancels to zero the value is
/// renormalized upward and the next coefficient is unknown (set to 0); with
/// nonnegative kernels no cancellation occurs.
struct GradedValue {
  int lead = 0;
  double c0 = 0.0;
  double c1 = 0.0;

  static constexpr GradedValue zero() { return {}; }
  static constexpr GradedValue alpha() { return {1, 1.0, 0.0}; }
  static GradedValue constant(double v) { return v == 0.0 ? zero() : GradedValue{0, v, 0.0}; }

  bool is_zero() const { return c0 == 0.0 && c1 == 0.0; }

  /// Value at alpha -> 0+. Throws DegenerateError when the series diverges.
  double limit() const {
    if (is_zero() || lead > 0) return 0.0;
    if (lead < 0) throw DegenerateError("graded value diverges as alpha -> 0+");
    return c0;
  }

  friend GradedValue operator+(GradedValue a, GradedValue b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.lead > b.lead) std::swap(a, b);
    GradedValue r = a;
    const int gap = b.lead - a.lead;
    if (gap == 0) {
      r.c0 += b.c0;
      r.c1 += b.c1;
    } else if (gap == 1) {
      r.c1 += b.c0;
    }
    return r.normalized();
  }

  friend GradedValue operator*(GradedValue a, GradedValue b) {
    if (a.is_zero() || b.is_zero()) return zero();
    return GradedValue{a.lead + b.lead, a.c0 * b.c0, a.c0 * b.c1 + a.c1 * b.c0}.normalized();
  }

  friend GradedValue operator*(GradedValue a, double s) {
    if (s == 0.0 || a.is_zero()) return zero();
    return GradedValue{a.lead, a.c0 * s, a.c1 * s};
  }
  friend GradedValue operator*(double s, GradedValue a) { return a * s; }

  friend GradedValue operator/(GradedValue a, GradedValue b) {
    if (b.is_zero()) throw DegenerateError("graded division by a value that is identically zero");
    if (a.is_zero()) return zero();
    const double q0 = a.c0 / b.c0;
    return GradedValue{a.lead - b.lead, q0, (a.c1 - q0 * b.c1) / b.c0}.normalized();
  }

  friend GradedValue operator/(GradedValue a, double s) {
    if (s == 0.0) throw DegenerateError("graded division by zero");
    return GradedValue{a.lead, a.c0 / s, a.c1 / s};
  }

  GradedValue& operator+=(GradedValue b) { return *this = *this + b; }

 private:
  GradedValue normalized() const {
    if (c0 != 0.0) return *this;
    if (c1 == 0.0) return zero();
    return GradedValue{lead + 1, c1, 0.0};
  }
};

}  // namespace permclass
