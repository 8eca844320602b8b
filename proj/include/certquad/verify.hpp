#pragma once

#include "certquad/compensated.hpp"
#include "certquad/errors.hpp"
#include "certquad/expr.hpp"
#include "certquad/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace certquad {

enum class CertificateKind { UserCertified, Analytic, Estimated };

inline const char* to_string(CertificateKind k) {
    switch (k) {
    case CertificateKind::UserCertified: return "USER_CERTIFIED";
    case CertificateKind::Analytic: return "ANALYTIC";
    default: return "ESTIMATED";
    }
}

// ---------------------------------------------------------------------------
// reference oracle: adaptive Simpson with Richardson acceptance. This is the
// desk-scale ground truth the certified rules are checked against, so it is
// deliberately a different algorithm family and shares no code with them.

namespace detail {

inline constexpr int kOracleMinDepth = 3;
inline constexpr int kOracleMaxDepth = 60;

template <class F>
double adapt_simpson(F& f, double a, double m, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth) {
    if (depth > kOracleMaxDepth)
        throw OracleNoConvergence("reference integrator exceeded depth " +
                                  std::to_string(kOracleMaxDepth));
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = (left + right) - whole;
    if (depth >= kOracleMinDepth && std::abs(delta) <= 15.0 * tol)
        return (left + right) + delta / 15.0;
    return adapt_simpson(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           adapt_simpson(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// Ground-truth integral of f over iv to rel_tol relative accuracy
/// (default 1e-13, measured against the integral's own scale with a floor of
/// 1). Throws OracleNoConvergence when bisection bottoms out, which is the
/// signal for non-integrable input.
template <class F>
double reference_integral(F&& f, const Interval& iv, double rel_tol = 1e-13) {
    F& fn = f;
    // crude 64-panel composite Simpson fixes the tolerance scale; immune to
    // the symmetric cancellation that can zero out a single panel
    CompensatedSum scale_acc;
    const double h = iv.width() / 64.0;
    double prev = fn(iv.a);
    for (int i = 0; i < 64; ++i) {
        const double lo = iv.a + h * i;
        const double hi = (i == 63) ? iv.b : iv.a + h * (i + 1);
        const double mid = 0.5 * (lo + hi);
        const double fhi = fn(hi);
        scale_acc.add(std::abs((hi - lo) / 6.0 * (prev + 4.0 * fn(mid) + fhi)));
        prev = fhi;
    }
    const double tol = rel_tol * std::max(1.0, scale_acc.value());

    const double a = iv.a, b = iv.b, m = iv.midpoint();
    const double fa = fn(a), fm = fn(m), fb = fn(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adapt_simpson(fn, a, m, b, fa, fm, fb, whole, tol, 0);
}

// ---------------------------------------------------------------------------
// sup-norm estimation

namespace detail {

template <class G>
double golden_max_abs(G& g, double lo, double hi) {
    constexpr double invphi = 0.6180339887498949;
    double best = std::max(std::abs(g(lo)), std::abs(g(hi)));
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = std::abs(g(x1));
    double f2 = std::abs(g(x2));
    for (int it = 0; it < 80 && (hi - lo) > 0.0; ++it) {
        best = std::max({best, f1, f2});
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = std::abs(g(x2));
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = std::abs(g(x1));
        }
    }
    return std::max({best, f1, f2});
}

}  // namespace detail

/// Sampled estimate of sup |g| over iv: a 4097-point uniform grid, golden-
/// section refinement around the three best cells, and a 1.001 safety factor.
/// Not certified — callers wanting a guaranteed bound must supply their own.
template <class G>
double estimate_sup_norm(G&& g, const Interval& iv) {
    G& gn = g;
    constexpr std::size_t kPoints = 4097;
    const double step = iv.width() / static_cast<double>(kPoints - 1);

    std::array<std::size_t, 3> top{0, 0, 0};
    std::array<double, 3> topv{-1.0, -1.0, -1.0};
    std::vector<double> ts(kPoints);
    double grid_best = 0.0;
    for (std::size_t i = 0; i < kPoints; ++i) {
        const double t = (i == kPoints - 1) ? iv.b : iv.a + step * static_cast<double>(i);
        ts[i] = t;
        const double v = std::abs(gn(t));
        grid_best = std::max(grid_best, v);
        // keep the three largest samples; ties keep the earlier index
        if (v > topv[0]) {
            topv = {v, topv[0], topv[1]};
            top = {i, top[0], top[1]};
        } else if (v > topv[1]) {
            topv = {topv[0], v, topv[1]};
            top = {top[0], i, top[1]};
        } else if (v > topv[2]) {
            topv[2] = v;
            top[2] = i;
        }
    }

    double best = grid_best;
    for (std::size_t k = 0; k < 3; ++k) {
        const std::size_t i = top[k];
        const double lo = ts[i == 0 ? 0 : i - 1];
        const double hi = ts[std::min(i + 1, kPoints - 1)];
        if (lo < hi) best = std::max(best, detail::golden_max_abs(gn, lo, hi));
    }
    return best * 1.001;
}

struct SupNormEstimate {
    double value;
    CertificateKind kind;
};

/// sup |g| with provenance: exact (no safety factor) when g folds to a
/// constant, sampled otherwise.
inline SupNormEstimate resolve_sup_norm(const Expression& g, const Interval& iv) {
    const Expression s = g.simplified();
    if (s.is_constant()) return {std::abs(s.number()), CertificateKind::Analytic};
    return {estimate_sup_norm(g, iv), CertificateKind::Estimated};
}

// ---------------------------------------------------------------------------
// inequality verification

struct VerificationReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool holds = false;
    CertificateKind certificate = CertificateKind::Estimated;
    // context
    std::string f;
    double a = 0.0, b = 0.0, x = 0.0;
};

/// Acceptance predicate shared by all verification paths: a hair of relative
/// and absolute slack over lhs <= rhs so the check tests mathematics, not the
/// last floating-point bit.
inline bool certificate_holds(double lhs, double rhs) {
    return lhs <= rhs * (1.0 + 1e-12) + 1e-15;
}

namespace detail {

// rhs == 0 with lhs below the absolute slack is the 0/0 case and reads as 0;
// a genuinely positive lhs against a zero certificate reads as +inf.
inline double certificate_ratio(double lhs, double rhs) {
    if (rhs == 0.0)
        return lhs <= 1e-15 ? 0.0 : std::numeric_limits<double>::infinity();
    return lhs / rhs;
}

}  // namespace detail

/// Check the averaged companion identity against the reference oracle:
///   lhs = | (1/2)[(f(x)+f(a+b-x))/2 + (f(a)+f(b))/2]
///          - (1/2)(x-(a+b)/2)(f'(x)-f'(a+b-x))/2 - (1/(b-a))∫f |
///   rhs = bound_factor(iv, x) * m2 / (b-a).
/// m2 comes from the caller when given, otherwise from the symbolic second
/// derivative (exact if it folds to a constant, sampled otherwise).
inline VerificationReport verify_inequality(const Expression& f, const Interval& iv, EvalPoint x,
                                            std::optional<double> m2 = {}) {
    double m2v;
    CertificateKind kind;
    if (m2) {
        if (!(*m2 >= 0.0)) throw NegativeNorm("sup-norm bound must be >= 0");
        m2v = *m2;
        kind = CertificateKind::UserCertified;
    } else {
        const SupNormEstimate s = resolve_sup_norm(f.derivative().derivative(), iv);
        m2v = s.value;
        kind = s.kind;
    }

    const double xv = x.value();
    const double xr = (iv.a + iv.b) - xv;
    const Expression df = f.derivative();
    const double bracket = 0.5 * (0.5 * (f(xv) + f(xr)) + 0.5 * (f(iv.a) + f(iv.b)));
    const double corr = 0.5 * (xv - iv.midpoint()) * (0.5 * (df(xv) - df(xr)));
    const double avg = reference_integral(f, iv) / iv.width();

    VerificationReport r;
    r.lhs = std::abs(bracket - corr - avg);
    r.rhs = bound_factor(iv, x) * m2v / iv.width();
    r.ratio = detail::certificate_ratio(r.lhs, r.rhs);
    r.holds = certificate_holds(r.lhs, r.rhs);
    r.certificate = kind;
    r.f = f.str();
    r.a = iv.a;
    r.b = iv.b;
    r.x = xv;
    return r;
}

// ---------------------------------------------------------------------------
// sharpness scanning

struct ScanRow {
    std::string f;
    double a, b, x, lhs, rhs, ratio;
    bool holds;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    double max_ratio = 0.0;
    std::string max_f;
    double max_x = 0.0;

    std::string to_csv() const {
        std::string out = "f,a,b,x,lhs,rhs,ratio,holds\n";
        for (const ScanRow& r : rows) {
            out += r.f + ',' + detail::format_double(r.a) + ',' + detail::format_double(r.b) +
                   ',' + detail::format_double(r.x) + ',' + detail::format_double(r.lhs) + ',' +
                   detail::format_double(r.rhs) + ',' + detail::format_double(r.ratio) + ',' +
                   (r.holds ? "true" : "false") + '\n';
        }
        return out;
    }
};

/// Admissible x-grid of g points spanning [a, (a+b)/2] inclusive.
inline std::vector<double> admissible_grid(const Interval& iv, std::size_t g) {
    std::vector<double> xs;
    if (g == 0) return xs;
    if (g == 1) return {iv.a};
    xs.reserve(g);
    const double span = iv.midpoint() - iv.a;
    for (std::size_t j = 0; j < g; ++j)
        xs.push_back(j + 1 == g ? iv.midpoint()
                                : iv.a + span * (static_cast<double>(j) / (g - 1)));
    return xs;
}

/// Ratio table for each corpus member over an admissible x-grid, with the
/// overall maximum and where it occurred.
inline ScanResult sharpness_scan(const std::vector<Expression>& corpus, const Interval& iv,
                                 std::size_t x_grid_size) {
    ScanResult out;
    for (const Expression& f : corpus) {
        const SupNormEstimate m2 = resolve_sup_norm(f.derivative().derivative(), iv);
        for (double xv : admissible_grid(iv, x_grid_size)) {
            const VerificationReport rep =
                verify_inequality(f, iv, EvalPoint::checked(iv, xv), m2.value);
            out.rows.push_back({rep.f, rep.a, rep.b, rep.x, rep.lhs, rep.rhs, rep.ratio,
                                rep.holds});
            if (rep.ratio > out.max_ratio) {
                out.max_ratio = rep.ratio;
                out.max_f = rep.f;
                out.max_x = rep.x;
            }
        }
    }
    return out;
}

}  // namespace certquad
