#pragma once

#include "certquad/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace certquad {

/// Closed bounded integration domain [a, b] with a < b.
struct Interval {
    double a;
    double b;

    Interval(double a_, double b_) : a(a_), b(b_) {
        if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
            throw InvalidInterval("interval endpoints must be finite with a < b (got [" +
                                  std::to_string(a) + ", " + std::to_string(b) + "])");
    }

    double width() const { return b - a; }
    double midpoint() const { return 0.5 * (a + b); }
};

/// Evaluation abscissa restricted to the left half [a, (a+b)/2] of an interval.
///
/// Values up to 4 ulp above the midpoint are clamped onto it (they arise from
/// rounded midpoint arithmetic); anything further out is rejected.
class EvalPoint {
public:
    static EvalPoint checked(const Interval& iv, double x) {
        const double mid = iv.midpoint();
        if (!(x >= iv.a))
            throw OutOfDomain("evaluation point " + std::to_string(x) + " below interval start " +
                              std::to_string(iv.a));
        if (x > mid) {
            const double ulp = std::nextafter(mid, std::numeric_limits<double>::infinity()) - mid;
            if (x <= mid + 4.0 * ulp) return EvalPoint(mid);
            throw OutOfDomain("evaluation point " + std::to_string(x) +
                              " beyond interval midpoint " + std::to_string(mid));
        }
        return EvalPoint(x);
    }

    double value() const { return x_; }

private:
    explicit EvalPoint(double x) : x_(x) {}
    double x_;
};

/// Piecewise-linear kernel behind the companion rule:
///   K(t) = t - a        on [a, x]
///          t - (a+b)/2  on (x, a+b-x]
///          t - b        on (a+b-x, b]
inline double kernel_value(double t, const Interval& iv, EvalPoint x) {
    if (!(t >= iv.a && t <= iv.b))
        throw OutOfDomain("kernel argument " + std::to_string(t) + " outside [" +
                          std::to_string(iv.a) + ", " + std::to_string(iv.b) + "]");
    const double xv = x.value();
    if (t <= xv) return t - iv.a;
    if (t <= (iv.a + iv.b) - xv) return t - iv.midpoint();
    return t - iv.b;
}

/// Closed form of ∫_a^b |K(t)| |t - (a+b)/2| dt:
///   (a + 3b - 4x)(x - a)^2 / 6 + (2/3)((a+b)/2 - x)^3.
inline double moment_integral(const Interval& iv, EvalPoint x) {
    const double xv = x.value();
    const double d = xv - iv.a;
    const double c = iv.midpoint() - xv;
    return (iv.a + 3.0 * iv.b - 4.0 * xv) * d * d / 6.0 + (2.0 / 3.0) * (c * c * c);
}

/// Coefficient of ||f''||_inf in the certified remainder of the single rule:
///   (1/3) [ ((a+3b)/4 - x)(x - a)^2 + ((a+b)/2 - x)^3 ].
/// Equals moment_integral / 2; positive for every admissible x. Minimal at
/// x = (3a+b)/4 where it reduces to (b-a)^3/64.
inline double bound_factor(const Interval& iv, EvalPoint x) {
    const double xv = x.value();
    const double d = xv - iv.a;
    const double c = iv.midpoint() - xv;
    return ((0.25 * (iv.a + 3.0 * iv.b) - xv) * d * d + c * c * c) / 3.0;
}

/// Abscissa minimising bound_factor: (3a + b)/4.
inline double optimal_point(const Interval& iv) { return 0.25 * (3.0 * iv.a + iv.b); }

}  // namespace certquad
