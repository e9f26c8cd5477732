#pragma once

// Double-double coordinates for orbit computations.
//
// Forward orbits of an expanding map lose one digit of accuracy per
// log10(tau') iterations. Carrying interval coordinates as an unevaluated sum
// hi + lo (about 106 significant bits) keeps orbits exact to double precision
// for roughly twice as many iterations, which is what the graph-invariance
// checks need.

#include <cmath>
#include <compare>

namespace wlab {

struct ddouble {
    double hi = 0.0;
    double lo = 0.0;

    constexpr ddouble() = default;
    constexpr ddouble(double v) : hi(v), lo(0.0) {}  // NOLINT(google-explicit-constructor)
    constexpr ddouble(double h, double l) : hi(h), lo(l) {}

    [[nodiscard]] constexpr double value() const { return hi + lo; }
    explicit constexpr operator double() const { return hi + lo; }
};

namespace dd_detail {

inline ddouble quick_two_sum(double a, double b) {
    const double s = a + b;
    return {s, b - (s - a)};
}

inline ddouble two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline ddouble two_prod(double a, double b) {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

}  // namespace dd_detail

inline ddouble operator+(ddouble a, ddouble b) {
    ddouble s = dd_detail::two_sum(a.hi, b.hi);
    ddouble t = dd_detail::two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = dd_detail::quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return dd_detail::quick_two_sum(s.hi, s.lo);
}

inline ddouble operator-(ddouble a) { return {-a.hi, -a.lo}; }
inline ddouble operator-(ddouble a, ddouble b) { return a + (-b); }

inline ddouble operator*(ddouble a, ddouble b) {
    ddouble p = dd_detail::two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return dd_detail::quick_two_sum(p.hi, p.lo);
}

inline ddouble operator/(ddouble a, ddouble b) {
    const double q1 = a.hi / b.hi;
    ddouble r = a - b * ddouble(q1);
    const double q2 = r.hi / b.hi;
    r = r - b * ddouble(q2);
    const double q3 = r.hi / b.hi;
    return dd_detail::quick_two_sum(q1, q2) + ddouble(q3);
}

inline ddouble& operator+=(ddouble& a, ddouble b) { return a = a + b; }
inline ddouble& operator-=(ddouble& a, ddouble b) { return a = a - b; }
inline ddouble& operator*=(ddouble& a, ddouble b) { return a = a * b; }

inline bool operator==(ddouble a, ddouble b) { return a.hi == b.hi && a.lo == b.lo; }
inline std::partial_ordering operator<=>(ddouble a, ddouble b) {
    if (auto c = a.hi <=> b.hi; c != 0) return c;
    return a.lo <=> b.lo;
}

/// Exact rational k/n to double-double accuracy.
inline ddouble dd_ratio(long k, long n) { return ddouble(static_cast<double>(k)) / ddouble(static_cast<double>(n)); }

}  // namespace wlab
