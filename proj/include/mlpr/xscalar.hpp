#pragma once

// Unevaluated sum of two doubles (double-double). About 32 significant
// decimal digits; relative error per operation is a small multiple of 2^-104.
// Correctness of the error-free transformations below depends on the compiler
// not contracting a*b+c into an FMA; the build sets -ffp-contract=off.

#include <cmath>
#include <string>

namespace mlpr {

namespace xdetail {

inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

inline void quick_two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  e = b - (s - a);
}

inline void split(double a, double& hi, double& lo) {
  constexpr double splitter = 134217729.0;  // 2^27 + 1
  const double t = splitter * a;
  hi = t - (t - a);
  lo = a - hi;
}

inline void two_prod(double a, double b, double& p, double& e) {
  p = a * b;
#if defined(__FMA__)
  e = std::fma(a, b, -p);
#else
  double ah, al, bh, bl;
  split(a, ah, al);
  split(b, bh, bl);
  e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
#endif
}

}  // namespace xdetail

struct XScalar {
  double hi = 0.0;
  double lo = 0.0;

  constexpr XScalar() = default;
  constexpr XScalar(double h) : hi(h), lo(0.0) {}  // NOLINT: implicit by design
  constexpr XScalar(double h, double l) : hi(h), lo(l) {}

  static XScalar normalized(double h, double l) {
    XScalar r;
    xdetail::quick_two_sum(h, l, r.hi, r.lo);
    return r;
  }

  double to_double() const { return hi + lo; }
  explicit operator double() const { return to_double(); }

  XScalar operator-() const { return {-hi, -lo}; }

  XScalar& operator+=(const XScalar& b);
  XScalar& operator-=(const XScalar& b) { return *this += -b; }
  XScalar& operator*=(const XScalar& b);
  XScalar& operator/=(const XScalar& b);
};

inline XScalar xadd(const XScalar& a, const XScalar& b) {
  double s, e, t, f;
  xdetail::two_sum(a.hi, b.hi, s, e);
  xdetail::two_sum(a.lo, b.lo, t, f);
  e += t;
  xdetail::quick_two_sum(s, e, s, e);
  e += f;
  return XScalar::normalized(s, e);
}

inline XScalar xmul(const XScalar& a, const XScalar& b) {
  double p, e;
  xdetail::two_prod(a.hi, b.hi, p, e);
  e += a.hi * b.lo + a.lo * b.hi;
  return XScalar::normalized(p, e);
}

inline XScalar xdiv(const XScalar& a, const XScalar& b) {
  const double q1 = a.hi / b.hi;
  XScalar r = xadd(a, -xmul(XScalar(q1), b));
  const double q2 = r.hi / b.hi;
  r = xadd(r, -xmul(XScalar(q2), b));
  const double q3 = r.hi / b.hi;
  XScalar q = XScalar::normalized(q1, q2);
  return xadd(q, XScalar(q3));
}

// Exact product of two doubles.
inline XScalar xprod(double a, double b) {
  XScalar r;
  xdetail::two_prod(a, b, r.hi, r.lo);
  return r;
}

inline XScalar& XScalar::operator+=(const XScalar& b) { return *this = xadd(*this, b); }
inline XScalar& XScalar::operator*=(const XScalar& b) { return *this = xmul(*this, b); }
inline XScalar& XScalar::operator/=(const XScalar& b) { return *this = xdiv(*this, b); }

inline XScalar operator+(const XScalar& a, const XScalar& b) { return xadd(a, b); }
inline XScalar operator-(const XScalar& a, const XScalar& b) { return xadd(a, -b); }
inline XScalar operator*(const XScalar& a, const XScalar& b) { return xmul(a, b); }
inline XScalar operator/(const XScalar& a, const XScalar& b) { return xdiv(a, b); }

inline bool operator==(const XScalar& a, const XScalar& b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator<(const XScalar& a, const XScalar& b) {
  return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}
inline bool operator>(const XScalar& a, const XScalar& b) { return b < a; }
inline bool operator<=(const XScalar& a, const XScalar& b) { return !(b < a); }
inline bool operator>=(const XScalar& a, const XScalar& b) { return !(a < b); }

inline XScalar abs(const XScalar& a) { return a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0) ? -a : a; }
inline bool isfinite(const XScalar& a) { return std::isfinite(a.hi) && std::isfinite(a.lo); }

// Decimal rendering with `digits` significant digits, e.g. "2.46552...e-01".
std::string to_string(const XScalar& x, int digits = 34);

// Parses a decimal literal to double-double accuracy.
XScalar parse_xscalar(const std::string& s);

}  // namespace mlpr
