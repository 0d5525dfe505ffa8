#ifndef TASEP_DETAIL_DD_HPP
#define TASEP_DETAIL_DD_HPP

// Double-double arithmetic (Dekker/Knuth error-free transforms).  Gives
// ~31 significant digits, which is what the strongly cancelling sums here
// need: circle quadrature of the contour moments and the antisymmetrized
// N! identity sums both lose up to ~14 digits to cancellation, so plain
// doubles cannot certify 1e-12 agreement.  No FMA requirement: two_prod
// uses Dekker splitting, so results are identical across build targets.

#include <cmath>

namespace tasep::detail {

struct dd {
  double hi = 0.0;
  double lo = 0.0;
  constexpr dd() = default;
  constexpr dd(double h) : hi(h), lo(0.0) {}
  constexpr dd(double h, double l) : hi(h), lo(l) {}
  double to_double() const { return hi + lo; }
};

inline dd two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline dd quick_two_sum(double a, double b) {  // requires |a| >= |b|
  double s = a + b;
  return {s, b - (s - a)};
}

inline dd split(double a) {
  constexpr double f = 134217729.0;  // 2^27 + 1
  double c = f * a;
  double hi = c - (c - a);
  return {hi, a - hi};
}

inline dd two_prod(double a, double b) {
  double p = a * b;
  dd as = split(a), bs = split(b);
  double err = ((as.hi * bs.hi - p) + as.hi * bs.lo + as.lo * bs.hi) + as.lo * bs.lo;
  return {p, err};
}

inline dd add(dd a, dd b) {
  dd s = two_sum(a.hi, b.hi);
  double lo = s.lo + a.lo + b.lo;
  return quick_two_sum(s.hi, lo);
}

inline dd sub(dd a, dd b) { return add(a, {-b.hi, -b.lo}); }

inline dd mul(dd a, dd b) {
  dd p = two_prod(a.hi, b.hi);
  double lo = p.lo + a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, lo);
}

inline dd div(dd a, dd b) {
  double q1 = a.hi / b.hi;
  dd r = sub(a, mul(b, dd(q1)));
  double q2 = r.hi / b.hi;
  r = sub(r, mul(b, dd(q2)));
  double q3 = r.hi / b.hi;
  dd q = quick_two_sum(q1, q2);
  return add(q, dd(q3));
}

inline dd neg(dd a) { return {-a.hi, -a.lo}; }
inline bool is_zero(dd a) { return a.hi == 0.0 && a.lo == 0.0; }

inline dd operator+(dd a, dd b) { return add(a, b); }
inline dd operator-(dd a, dd b) { return sub(a, b); }
inline dd operator*(dd a, dd b) { return mul(a, b); }
inline dd operator/(dd a, dd b) { return div(a, b); }
inline dd operator-(dd a) { return neg(a); }

struct ddcomplex {
  dd re, im;
  constexpr ddcomplex() = default;
  constexpr ddcomplex(dd r) : re(r), im(0.0) {}
  constexpr ddcomplex(dd r, dd i) : re(r), im(i) {}
};

inline ddcomplex operator+(ddcomplex a, ddcomplex b) { return {a.re + b.re, a.im + b.im}; }
inline ddcomplex operator-(ddcomplex a, ddcomplex b) { return {a.re - b.re, a.im - b.im}; }
inline ddcomplex operator*(ddcomplex a, ddcomplex b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline ddcomplex conj(ddcomplex a) { return {a.re, neg(a.im)}; }
inline ddcomplex operator/(ddcomplex a, ddcomplex b) {
  dd n = b.re * b.re + b.im * b.im;
  ddcomplex num = a * conj(b);
  return {num.re / n, num.im / n};
}
inline ddcomplex operator-(ddcomplex a) { return {neg(a.re), neg(a.im)}; }

// a * b^e for integer e (binary powering; e may be negative)
inline ddcomplex powi(ddcomplex b, long e) {
  if (e < 0) return ddcomplex(dd(1.0)) / powi(b, -e);
  ddcomplex acc(dd(1.0));
  while (e > 0) {
    if (e & 1) acc = acc * b;
    b = b * b;
    e >>= 1;
  }
  return acc;
}

inline double abs2_double(ddcomplex a) {
  double r = a.re.to_double(), i = a.im.to_double();
  return r * r + i * i;
}

}  // namespace tasep::detail

#endif
