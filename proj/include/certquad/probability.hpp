#pragma once

#include "certquad/errors.hpp"
#include "certquad/expr.hpp"
#include "certquad/kernel.hpp"
#include "certquad/verify.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

namespace certquad {

/// Absolutely continuous law on [a, b]: a density expression, a CDF that is
/// either analytic or evaluated through the reference oracle, and a sup bound
/// m1 on |pdf'|. Construction validates nonnegativity on a sample grid and
/// that the CDF runs from 0 to 1 within 1e-9. Immutable afterwards.
class Distribution {
public:
    static Distribution with_cdf(Expression pdf, Expression cdf, const Interval& support,
                                 std::optional<double> m1 = {}) {
        return Distribution(std::move(pdf), std::move(cdf), support, m1);
    }

    static Distribution with_oracle_cdf(Expression pdf, const Interval& support,
                                        std::optional<double> m1 = {}) {
        return Distribution(std::move(pdf), std::nullopt, support, m1);
    }

    const Interval& support() const { return iv_; }
    const Expression& pdf() const { return pdf_; }
    bool has_analytic_cdf() const { return cdf_.has_value(); }

    double pdf_at(double t) const { return pdf_(t); }

    double cdf_at(double t) const {
        if (cdf_) return (*cdf_)(t);
        if (t <= iv_.a) return 0.0;
        return reference_integral(pdf_, Interval(iv_.a, std::min(t, iv_.b)));
    }

    double m1() const { return m1_; }
    CertificateKind m1_kind() const { return m1_kind_; }

    /// E(X) = b - ∫F, computed through the oracle once at construction.
    double expectation() const { return expectation_; }

private:
    Distribution(Expression pdf, std::optional<Expression> cdf, const Interval& support,
                 std::optional<double> m1)
        : pdf_(std::move(pdf)), cdf_(std::move(cdf)), iv_(support) {
        validate();
        if (m1) {
            if (!(*m1 >= 0.0)) throw NegativeNorm("sup-norm bound must be >= 0");
            m1_ = *m1;
            m1_kind_ = CertificateKind::UserCertified;
        } else {
            const SupNormEstimate s = resolve_sup_norm(pdf_.derivative(), iv_);
            m1_ = s.value;
            m1_kind_ = s.kind;
        }
        expectation_ =
            iv_.b - reference_integral([this](double t) { return cdf_at(t); }, iv_);
    }

    void validate() const {
        constexpr int kGrid = 1001;
        for (int i = 0; i < kGrid; ++i) {
            const double t =
                (i == kGrid - 1) ? iv_.b : iv_.a + iv_.width() * (static_cast<double>(i) / (kGrid - 1));
            if (!(pdf_(t) >= 0.0))
                throw DistributionError("density is negative at t = " + std::to_string(t));
        }
        const double Fa = cdf_at(iv_.a);
        const double Fb = cdf_at(iv_.b);
        if (!(std::abs(Fa) <= 1e-9))
            throw DistributionError("CDF at a is " + std::to_string(Fa) + ", expected 0");
        if (!(std::abs(Fb - 1.0) <= 1e-9))
            throw DistributionError("CDF at b is " + std::to_string(Fb) +
                                    ", expected 1 (density not normalised?)");
    }

    Expression pdf_;
    std::optional<Expression> cdf_;
    Interval iv_;
    double m1_ = 0.0;
    CertificateKind m1_kind_ = CertificateKind::Estimated;
    double expectation_ = 0.0;
};

inline double expectation(const Distribution& d) { return d.expectation(); }

/// Check the CDF companion inequality against the oracle expectation:
///   lhs = | (1/2)[(F(x)+F(a+b-x))/2 + 1/2]
///          - (1/2)(x-(a+b)/2)(f(x)-f(a+b-x))/2 - (b-E)/(b-a) |
///   rhs = bound_factor(iv, x) * m1 / (b-a).
inline VerificationReport verify_prob_inequality(const Distribution& d, EvalPoint x) {
    const Interval& iv = d.support();
    const double xv = x.value();
    const double xr = (iv.a + iv.b) - xv;

    const double bracket = 0.5 * (0.5 * (d.cdf_at(xv) + d.cdf_at(xr)) + 0.5);
    const double corr = 0.5 * (xv - iv.midpoint()) * (0.5 * (d.pdf_at(xv) - d.pdf_at(xr)));
    const double target = (iv.b - d.expectation()) / iv.width();

    VerificationReport r;
    r.lhs = std::abs(bracket - corr - target);
    r.rhs = bound_factor(iv, x) * d.m1() / iv.width();
    r.ratio = detail::certificate_ratio(r.lhs, r.rhs);
    r.holds = certificate_holds(r.lhs, r.rhs);
    r.certificate = d.m1_kind();
    r.f = d.pdf().str();
    r.a = iv.a;
    r.b = iv.b;
    r.x = xv;
    return r;
}

/// Certified bracket for E(X) built from two CDF and two density evaluations —
/// no integral of F required:
///   center    = b - (b-a) [ (1/2)((F(x)+F(a+b-x))/2 + 1/2)
///                          - (1/2)(x-(a+b)/2)(f(x)-f(a+b-x))/2 ]
///   halfwidth = bound_factor(iv, x) * m1.
struct ExpectationInterval {
    double center = 0.0;
    double halfwidth = 0.0;

    double low() const { return center - halfwidth; }
    double high() const { return center + halfwidth; }
    double width() const { return 2.0 * halfwidth; }
    bool contains(double v) const { return low() <= v && v <= high(); }
};

inline ExpectationInterval expectation_interval(const Distribution& d, EvalPoint x) {
    const Interval& iv = d.support();
    const double xv = x.value();
    const double xr = (iv.a + iv.b) - xv;
    const double bracket = 0.5 * (0.5 * (d.cdf_at(xv) + d.cdf_at(xr)) + 0.5) -
                           0.5 * (xv - iv.midpoint()) * (0.5 * (d.pdf_at(xv) - d.pdf_at(xr)));
    ExpectationInterval e;
    e.center = iv.b - iv.width() * bracket;
    e.halfwidth = bound_factor(iv, x) * d.m1();
    return e;
}

}  // namespace certquad
