#include "certquad/probability.hpp"

#include "testutil.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

using namespace certquad;

TEST_CASE("uniform law on [0,1]") {
    const Distribution d =
        Distribution::with_cdf(parse("1"), parse("t"), Interval(0.0, 1.0));
    REQUIRE(d.has_analytic_cdf());
    REQUIRE(d.expectation() == Catch::Approx(0.5).epsilon(1e-12));
    REQUIRE(expectation(d) == d.expectation());
    REQUIRE(d.m1() == 0.0);  // density derivative folds to zero
    REQUIRE(d.m1_kind() == CertificateKind::Analytic);

    const EvalPoint x = EvalPoint::checked(d.support(), 0.25);
    const VerificationReport r = verify_prob_inequality(d, x);
    REQUIRE(r.lhs <= 1e-12);
    REQUIRE(r.rhs == 0.0);
    REQUIRE(r.ratio == 0.0);
    REQUIRE(r.holds);

    const ExpectationInterval e = expectation_interval(d, x);
    REQUIRE(e.center == 0.5);  // dyadic CDF values make this exact
    REQUIRE(e.halfwidth == 0.0);
    REQUIRE(e.contains(0.5));
}

TEST_CASE("uniform law on an offset support [2,6]") {
    const Distribution d =
        Distribution::with_cdf(parse("0.25"), parse("(t-2)/4"), Interval(2.0, 6.0));
    REQUIRE(d.expectation() == Catch::Approx(4.0).epsilon(1e-12));
    const EvalPoint x = EvalPoint::checked(d.support(), 3.0);  // optimal abscissa
    const ExpectationInterval e = expectation_interval(d, x);
    REQUIRE(e.center == 4.0);
    REQUIRE(e.halfwidth == 0.0);
    REQUIRE(verify_prob_inequality(d, x).holds);
}

TEST_CASE("triangular law frozen values: pdf 2t, cdf t^2 on [0,1]") {
    const Distribution d =
        Distribution::with_cdf(parse("2*t"), parse("t^2"), Interval(0.0, 1.0));
    REQUIRE(d.expectation() == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
    REQUIRE(d.m1() == 2.0);
    REQUIRE(d.m1_kind() == CertificateKind::Analytic);

    const EvalPoint x = EvalPoint::checked(d.support(), 0.25);
    const VerificationReport r = verify_prob_inequality(d, x);
    REQUIRE(r.lhs == Catch::Approx(1.0 / 96.0).margin(1e-10));
    REQUIRE(r.rhs == 0.03125);  // bound_factor(1/4) * m1 / width, exact
    REQUIRE(r.ratio == Catch::Approx(1.0 / 3.0).margin(1e-9));
    REQUIRE(r.holds);
    REQUIRE(r.certificate == CertificateKind::Analytic);
    REQUIRE(r.f == "2*t");

    const ExpectationInterval e = expectation_interval(d, x);
    REQUIRE(e.center == 0.65625);  // 21/32, exact in binary
    REQUIRE(e.halfwidth == 0.03125);
    REQUIRE(e.low() == 0.625);
    REQUIRE(e.high() == 0.6875);
    REQUIRE(e.width() == 0.0625);
    REQUIRE(e.contains(2.0 / 3.0));
    REQUIRE(e.contains(d.expectation()));
    REQUIRE_FALSE(e.contains(0.624));
    REQUIRE_FALSE(e.contains(0.69));
}

TEST_CASE("oracle-backed CDF matches the analytic route") {
    const Distribution analytic =
        Distribution::with_cdf(parse("2*t"), parse("t^2"), Interval(0.0, 1.0));
    const Distribution oracle = Distribution::with_oracle_cdf(parse("2*t"), Interval(0.0, 1.0));
    REQUIRE_FALSE(oracle.has_analytic_cdf());
    REQUIRE(oracle.expectation() == Catch::Approx(2.0 / 3.0).epsilon(1e-9));
    REQUIRE(oracle.cdf_at(0.25) == Catch::Approx(0.0625).margin(1e-11));
    REQUIRE(oracle.cdf_at(-3.0) == 0.0);  // clamped below the support

    const EvalPoint x = EvalPoint::checked(oracle.support(), 0.25);
    const VerificationReport r = verify_prob_inequality(oracle, x);
    REQUIRE(r.lhs == Catch::Approx(1.0 / 96.0).margin(1e-9));
    REQUIRE(r.rhs == 0.03125);  // m1 still resolves analytically from the pdf
    REQUIRE(r.holds);

    const ExpectationInterval ea = expectation_interval(analytic, x);
    const ExpectationInterval eo = expectation_interval(oracle, x);
    REQUIRE(eo.center == Catch::Approx(ea.center).margin(1e-10));
    REQUIRE(eo.halfwidth == ea.halfwidth);
}

TEST_CASE("distribution validation") {
    // density integrating to 1/2: the CDF tops out at 0.5
    REQUIRE_THROWS_AS(
        Distribution::with_cdf(parse("t"), parse("t^2/2"), Interval(0.0, 1.0)),
        DistributionError);
    // negative density
    REQUIRE_THROWS_AS(Distribution::with_oracle_cdf(parse("t-0.5"), Interval(0.0, 1.0)),
                      DistributionError);
    // CDF anchored away from 0 at the left end
    REQUIRE_THROWS_AS(
        Distribution::with_cdf(parse("1"), parse("t+0.5"), Interval(0.0, 1.0)),
        DistributionError);
    // negative user-certified m1
    REQUIRE_THROWS_AS(
        Distribution::with_cdf(parse("1"), parse("t"), Interval(0.0, 1.0), -1.0),
        NegativeNorm);
}

TEST_CASE("m1 provenance") {
    const Distribution user =
        Distribution::with_cdf(parse("2*t"), parse("t^2"), Interval(0.0, 1.0), 2.5);
    REQUIRE(user.m1() == 2.5);
    REQUIRE(user.m1_kind() == CertificateKind::UserCertified);

    // a density with a kink cannot auto-resolve m1 ...
    REQUIRE_THROWS_AS(Distribution::with_oracle_cdf(parse("abs(2*t)"), Interval(0.0, 1.0)),
                      NonDifferentiable);
    // ... but works once the caller certifies the bound
    const Distribution kinked =
        Distribution::with_oracle_cdf(parse("abs(2*t)"), Interval(0.0, 1.0), 2.0);
    REQUIRE(kinked.m1_kind() == CertificateKind::UserCertified);
    REQUIRE(kinked.expectation() == Catch::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("inequality and bracket across an x-grid") {
    const Expression gauss_kernel = parse("exp(-(t-0.5)^2*8)");
    const Interval unit(0.0, 1.0);
    const double mass = reference_integral(gauss_kernel, unit);
    const Expression gauss_pdf = constant(1.0 / mass) * gauss_kernel;

    std::vector<Distribution> laws;
    laws.push_back(Distribution::with_cdf(parse("2*t"), parse("t^2"), unit));
    laws.push_back(Distribution::with_oracle_cdf(gauss_pdf, unit));

    for (const Distribution& d : laws) {
        const double e_true = d.expectation();
        double best_width = std::numeric_limits<double>::infinity();
        double best_x = -1.0;
        for (double xv : admissible_grid(d.support(), 101)) {
            const EvalPoint x = EvalPoint::checked(d.support(), xv);
            const VerificationReport r = verify_prob_inequality(d, x);
            INFO(r.f << " at x=" << xv << " lhs=" << r.lhs << " rhs=" << r.rhs);
            REQUIRE(r.holds);
            const ExpectationInterval e = expectation_interval(d, x);
            REQUIRE(e.low() - 1e-12 <= e_true);
            REQUIRE(e_true <= e.high() + 1e-12);
            if (e.width() < best_width) {
                best_width = e.width();
                best_x = xv;
            }
        }
        // the narrowest bracket sits at the optimal abscissa (3a+b)/4,
        // which the 101-point grid hits exactly
        REQUIRE(best_x == 0.25);
    }
}
