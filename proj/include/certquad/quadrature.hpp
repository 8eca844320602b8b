#pragma once

#include "certquad/compensated.hpp"
#include "certquad/errors.hpp"
#include "certquad/kernel.hpp"

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace certquad {

/// Strictly ascending subdivision a = x_0 < x_1 < ... < x_n = b.
class Partition {
public:
    explicit Partition(std::vector<double> nodes) : nodes_(std::move(nodes)) {
        if (nodes_.size() < 2) throw InvalidPartition("a partition needs at least two nodes");
        for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
            if (!std::isfinite(nodes_[i]) || !(nodes_[i] < nodes_[i + 1]))
                throw InvalidPartition("partition nodes must be finite and strictly ascending");
        }
        if (!std::isfinite(nodes_.back()))
            throw InvalidPartition("partition nodes must be finite and strictly ascending");
    }

    static Partition uniform(const Interval& iv, std::size_t n) {
        if (n == 0) throw InvalidN("subinterval count must be >= 1");
        std::vector<double> nodes(n + 1);
        for (std::size_t i = 0; i <= n; ++i)
            nodes[i] = iv.a + iv.width() * (static_cast<double>(i) / static_cast<double>(n));
        nodes.front() = iv.a;
        nodes.back() = iv.b;
        return Partition(std::move(nodes));
    }

    std::size_t intervals() const { return nodes_.size() - 1; }
    double node(std::size_t i) const { return nodes_[i]; }
    Interval subinterval(std::size_t i) const { return {nodes_[i], nodes_[i + 1]}; }
    double width(std::size_t i) const { return nodes_[i + 1] - nodes_[i]; }
    Interval span() const { return {nodes_.front(), nodes_.back()}; }
    const std::vector<double>& nodes() const { return nodes_; }

    /// Largest subinterval width. Diagnostic only; no bound consumes it.
    double mesh() const {
        double m = 0.0;
        for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) m = std::max(m, width(i));
        return m;
    }

private:
    std::vector<double> nodes_;
};

/// Per-subinterval evaluation points: a symbolic policy or explicit abscissae.
class XiChoice {
public:
    enum class Kind { Optimal, Midpoint, Left, Explicit };

    static XiChoice optimal() { return XiChoice(Kind::Optimal); }    // (3x_i + x_{i+1})/4
    static XiChoice midpoint() { return XiChoice(Kind::Midpoint); }  // (x_i + x_{i+1})/2
    static XiChoice left() { return XiChoice(Kind::Left); }          // x_i
    static XiChoice explicit_points(std::vector<double> xs) {
        XiChoice c(Kind::Explicit);
        c.points_ = std::move(xs);
        return c;
    }

    Kind kind() const { return kind_; }
    const std::vector<double>& points() const { return points_; }

    const char* name() const {
        switch (kind_) {
        case Kind::Optimal: return "optimal";
        case Kind::Midpoint: return "midpoint";
        case Kind::Left: return "left";
        default: return "explicit";
        }
    }

    /// Resolve the evaluation point for one free-standing interval.
    /// Explicit lists only make sense against a partition.
    EvalPoint resolve(const Interval& sub) const {
        switch (kind_) {
        case Kind::Optimal: return EvalPoint::checked(sub, optimal_point(sub));
        case Kind::Midpoint: return EvalPoint::checked(sub, sub.midpoint());
        case Kind::Left: return EvalPoint::checked(sub, sub.a);
        default:
            throw std::invalid_argument("explicit xi points require a partition context");
        }
    }

    /// Resolve ξ_i for subinterval i of p, validating explicit points.
    EvalPoint resolve(const Partition& p, std::size_t i) const {
        const Interval sub = p.subinterval(i);
        if (kind_ != Kind::Explicit) return resolve(sub);
        if (points_.size() != p.intervals())
            throw XiOutOfRange(points_.size(), 0.0, 0.0,
                               "explicit xi list has " + std::to_string(points_.size()) +
                                   " entries for " + std::to_string(p.intervals()) +
                                   " subintervals");
        try {
            return EvalPoint::checked(sub, points_[i]);
        } catch (const OutOfDomain&) {
            throw XiOutOfRange(i, sub.a, sub.midpoint(),
                               "xi[" + std::to_string(i) + "] = " + std::to_string(points_[i]) +
                                   " outside [" + std::to_string(sub.a) + ", " +
                                   std::to_string(sub.midpoint()) + "]");
        }
    }

private:
    explicit XiChoice(Kind k) : kind_(k) {}
    Kind kind_;
    std::vector<double> points_;
};

struct QuadratureResult {
    double value = 0.0;
    double bound = 0.0;  // certified bound on |∫f - value|; always >= 0
    long long evals = 0;  // f plus f' evaluations spent on the rule itself
    std::string rule;
};

namespace detail {
inline void require_norm(double m) {
    if (!(m >= 0.0)) throw NegativeNorm("sup-norm bound must be >= 0");
}
}  // namespace detail

/// Companion rule on one interval:
///   S = (b-a)/4 [f(a) + f(x) + f(a+b-x) + f(b)]
///     - (b-a)/4 (x - (a+b)/2) [f'(x) - f'(a+b-x)].
template <class F, class DF>
double rule_single(F&& f, DF&& df, const Interval& iv, EvalPoint x) {
    const double xv = x.value();
    const double xr = (iv.a + iv.b) - xv;
    const double q = 0.25 * iv.width();
    const double nodes = f(iv.a) + f(xv) + f(xr) + f(iv.b);
    const double corr = (xv - iv.midpoint()) * (df(xv) - df(xr));
    return q * nodes - q * corr;
}

/// Certified remainder of rule_single: bound_factor(iv, x) * m2 where m2 is a
/// sup bound on |f''| over the interval.
inline double bound_single(const Interval& iv, EvalPoint x, double m2) {
    detail::require_norm(m2);
    return bound_factor(iv, x) * m2;
}

/// Composite companion rule over a partition; ξ_i per XiChoice, one global m2.
/// Subinterval contributions are accumulated left to right with compensation.
template <class F, class DF>
QuadratureResult integrate_composite(F&& f, DF&& df, const Partition& p, const XiChoice& xi,
                                     double m2) {
    detail::require_norm(m2);
    CompensatedSum value, bound;
    const std::size_t n = p.intervals();
    for (std::size_t i = 0; i < n; ++i) {
        const Interval sub = p.subinterval(i);
        const EvalPoint xp = xi.resolve(p, i);
        value.add(rule_single(f, df, sub, xp));
        bound.add(bound_single(sub, xp, m2));
    }
    QuadratureResult r;
    r.value = value.value();
    r.bound = bound.value();
    r.evals = static_cast<long long>(n) * 6;
    r.rule = std::string("companion[xi=") + xi.name() + "]";
    return r;
}

/// Uniform n-panel composite rule at the optimal abscissae; its certificate
/// collapses to (1/64) m2 n h^3.
template <class F, class DF>
QuadratureResult integrate_uniform(F&& f, DF&& df, const Interval& iv, std::size_t n, double m2) {
    QuadratureResult r =
        integrate_composite(f, df, Partition::uniform(iv, n), XiChoice::optimal(), m2);
    r.rule = "companion_uniform";
    return r;
}

/// Single-point baseline (midpoint family), integral scale:
///   (b-a) { (1/2)[f(x) + (f(a)+f(b))/2] - (1/2)(x - (a+b)/2) f'(x) }
/// with certificate [1/48 + (1/3)|x-(a+b)/2|^3/(b-a)^3] (b-a)^3 m2.
/// Here x may sit anywhere in [a, b].
template <class F, class DF>
QuadratureResult baseline_midpoint(F&& f, DF&& df, const Interval& iv, double x, double m2) {
    detail::require_norm(m2);
    if (!(x >= iv.a && x <= iv.b))
        throw OutOfDomain("baseline point " + std::to_string(x) + " outside [" +
                          std::to_string(iv.a) + ", " + std::to_string(iv.b) + "]");
    const double w = iv.width();
    const double avg = 0.5 * (f(x) + 0.5 * (f(iv.a) + f(iv.b))) -
                       0.5 * (x - iv.midpoint()) * df(x);
    const double dev = std::abs(x - iv.midpoint());
    const double factor = 1.0 / 48.0 + (dev * dev * dev) / (3.0 * w * w * w);
    QuadratureResult r;
    r.value = w * avg;
    r.bound = factor * w * w * w * m2;
    r.evals = 4;
    r.rule = "baseline_midpoint";
    return r;
}

/// Trapezoid with endpoint-derivative correction, integral scale:
///   (b-a)(f(a)+f(b))/2 - (b-a)^2/8 [f'(b) - f'(a)],
/// certificate (b-a)^3/24 m2. Coincides with rule_single at x = a.
template <class F, class DF>
QuadratureResult perturbed_trapezoid(F&& f, DF&& df, const Interval& iv, double m2) {
    detail::require_norm(m2);
    const double w = iv.width();
    QuadratureResult r;
    r.value = w * 0.5 * (f(iv.a) + f(iv.b)) - (w * w / 8.0) * (df(iv.b) - df(iv.a));
    r.bound = (w * w * w / 24.0) * m2;
    r.evals = 4;
    r.rule = "perturbed_trapezoid";
    return r;
}

}  // namespace certquad
