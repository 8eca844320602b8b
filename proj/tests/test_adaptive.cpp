#include "certquad/adaptive.hpp"

#include "testutil.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>

using namespace certquad;

namespace {

AdaptiveResult run_expr(const char* src, const Interval& iv, const AdaptiveConfig& cfg) {
    const Expression f = parse(src);
    const Expression df = f.derivative();
    return integrate_adaptive(f, df, df.derivative(), iv, cfg);
}

}  // namespace

TEST_CASE("adaptive on a linear integrand stops at one interval") {
    const AdaptiveResult r = run_expr("2*t+1", Interval(0.0, 1.0), {});
    REQUIRE(r.converged());
    REQUIRE(r.trace.size() == 1);
    REQUIRE(r.result.value == 2.0);
    REQUIRE(r.result.bound == 0.0);
    REQUIRE(r.result.evals == 6);
    REQUIRE(r.certificate == CertificateKind::Analytic);  // f'' folds to 0
    REQUIRE(r.bound_history.size() == 1);
    REQUIRE(r.bound_history.front() == 0.0);
    REQUIRE(r.result.rule == "adaptive[xi=optimal]");
}

TEST_CASE("adaptive t^2 run: certified, near-optimal leaf count") {
    AdaptiveConfig cfg;
    cfg.tol = 1e-6;
    cfg.m2 = 2.0;
    const AdaptiveResult r = run_expr("t^2", Interval(0.0, 1.0), cfg);

    REQUIRE(r.converged());
    REQUIRE(r.certificate == CertificateKind::UserCertified);
    REQUIRE(r.result.bound <= 1e-6);
    REQUIRE(std::abs(r.result.value - 1.0 / 3.0) <= r.result.bound);

    // a uniform mesh needs 177 panels for this tolerance; bisection-only
    // refinement should stay within a factor of two of that
    REQUIRE(r.trace.size() >= 89);
    REQUIRE(r.trace.size() <= 354);
    REQUIRE(r.result.evals == static_cast<long long>(r.trace.size()) * 6);

    // the trace tiles [0,1] in ascending order with the optimal abscissae
    REQUIRE(r.trace.front().a == 0.0);
    REQUIRE(r.trace.back().b == 1.0);
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
        const TraceEntry& e = r.trace[i];
        REQUIRE(e.a < e.b);
        if (i > 0) REQUIRE(e.a == r.trace[i - 1].b);
        REQUIRE(e.xi == optimal_point(Interval(e.a, e.b)));
        REQUIRE(e.bound > 0.0);
    }
}

TEST_CASE("certificate history decreases monotonically") {
    AdaptiveConfig cfg;
    cfg.tol = 1e-6;
    cfg.m2 = 2.0;
    const AdaptiveResult r = run_expr("t^2", Interval(0.0, 1.0), cfg);
    REQUIRE(r.bound_history.size() == r.trace.size());
    REQUIRE(r.bound_history.front() == 0.03125);  // single-cell certificate, 1/32
    for (std::size_t i = 1; i < r.bound_history.size(); ++i)
        REQUIRE(r.bound_history[i] < r.bound_history[i - 1] + 1e-15);
    REQUIRE(r.bound_history.back() <= 1e-6);
}

TEST_CASE("adaptive exp run with estimated sup-norm") {
    AdaptiveConfig cfg;
    cfg.tol = 1e-8;
    const AdaptiveResult r = run_expr("exp(t)", Interval(0.0, 1.0), cfg);
    REQUIRE(r.converged());
    REQUIRE(r.certificate == CertificateKind::Estimated);
    REQUIRE(r.result.bound <= 1e-8);
    REQUIRE(std::abs(r.result.value - std::expm1(1.0)) <= r.result.bound);
}

TEST_CASE("adaptive refinement is deterministic") {
    AdaptiveConfig cfg;
    cfg.tol = 1e-8;
    const AdaptiveResult r1 = run_expr("exp(t)", Interval(0.0, 1.0), cfg);
    const AdaptiveResult r2 = run_expr("exp(t)", Interval(0.0, 1.0), cfg);
    REQUIRE(r1.result.value == r2.result.value);
    REQUIRE(r1.result.bound == r2.result.bound);
    REQUIRE(r1.trace.size() == r2.trace.size());
    for (std::size_t i = 0; i < r1.trace.size(); ++i) {
        REQUIRE(r1.trace[i].a == r2.trace[i].a);
        REQUIRE(r1.trace[i].b == r2.trace[i].b);
        REQUIRE(r1.trace[i].xi == r2.trace[i].xi);
        REQUIRE(r1.trace[i].bound == r2.trace[i].bound);
    }
}

TEST_CASE("interval budget exhaustion is reported, not hidden") {
    AdaptiveConfig cfg;
    cfg.tol = 1e-30;
    cfg.max_intervals = 64;
    cfg.m2 = 2.0;
    const AdaptiveResult r = run_expr("t^2", Interval(0.0, 1.0), cfg);
    REQUIRE_FALSE(r.converged());
    REQUIRE(r.status == AdaptiveStatus::ToleranceNotMet);
    REQUIRE(r.trace.size() == 64);
    REQUIRE(r.bound_history.size() == 64);
    REQUIRE(r.result.bound > 1e-30);
    // the partial answer is still certified
    REQUIRE(std::abs(r.result.value - 1.0 / 3.0) <= r.result.bound);

    cfg.max_intervals = 1;
    const AdaptiveResult one = run_expr("t^2", Interval(0.0, 1.0), cfg);
    REQUIRE_FALSE(one.converged());
    REQUIRE(one.trace.size() == 1);
    REQUIRE(one.result.bound == 0.03125);
}

TEST_CASE("local sup-norm mode stays sound on a peaked integrand") {
    AdaptiveConfig cfg;
    cfg.tol = 1e-4;
    cfg.m2_mode = SupNormMode::Local;
    const AdaptiveResult r = run_expr("exp(-(t-0.5)^2*8)", Interval(0.0, 1.0), cfg);
    REQUIRE(r.converged());
    REQUIRE(r.certificate == CertificateKind::Estimated);
    REQUIRE(r.result.bound <= 1e-4);
    const double truth = std::sqrt(std::acos(-1.0) / 8.0) * std::erf(std::sqrt(2.0));
    REQUIRE(std::abs(r.result.value - truth) <= r.result.bound);
}

TEST_CASE("alternative xi policy is honoured") {
    AdaptiveConfig cfg;
    cfg.tol = 1e-6;
    cfg.m2 = 2.0;
    cfg.xi = XiChoice::midpoint();
    const AdaptiveResult r = run_expr("t^2", Interval(0.0, 1.0), cfg);
    REQUIRE(r.converged());
    REQUIRE(r.result.rule == "adaptive[xi=midpoint]");
    // the midpoint abscissa is exactly tight for t^2, so the computed error
    // may sit a rounding error above the computed bound
    REQUIRE(std::abs(r.result.value - 1.0 / 3.0) <= r.result.bound + 1e-15);
    for (const TraceEntry& e : r.trace) REQUIRE(e.xi == Interval(e.a, e.b).midpoint());
}

TEST_CASE("domain errors surface instead of being averaged over") {
    const Expression f = parse("log(t)");
    const Expression df = f.derivative();
    const Expression ddf = df.derivative();
    const Interval iv(-1.0, 1.0);

    // automatic sup-norm estimation touches t = 0 where f'' blows up
    REQUIRE_THROWS_AS(integrate_adaptive(f, df, ddf, iv, {}), DomainError);

    // with a user-certified m2 the refinement itself needs no f values, but
    // the final evaluation pass does
    AdaptiveConfig cfg;
    cfg.tol = 0.2;
    cfg.m2 = 1.0;
    REQUIRE_THROWS_AS(integrate_adaptive(f, df, ddf, iv, cfg), DomainError);
}

TEST_CASE("configuration validation") {
    const Expression f = parse("t^2");
    const Expression df = f.derivative();
    const Expression ddf = df.derivative();
    const Interval iv(0.0, 1.0);

    AdaptiveConfig bad_tol;
    bad_tol.tol = 0.0;
    REQUIRE_THROWS_AS(integrate_adaptive(f, df, ddf, iv, bad_tol), std::invalid_argument);

    AdaptiveConfig neg_tol;
    neg_tol.tol = -1e-8;
    REQUIRE_THROWS_AS(integrate_adaptive(f, df, ddf, iv, neg_tol), std::invalid_argument);

    AdaptiveConfig no_budget;
    no_budget.max_intervals = 0;
    REQUIRE_THROWS_AS(integrate_adaptive(f, df, ddf, iv, no_budget), std::invalid_argument);

    AdaptiveConfig expl;
    expl.xi = XiChoice::explicit_points({0.1});
    REQUIRE_THROWS_AS(integrate_adaptive(f, df, ddf, iv, expl), std::invalid_argument);

    AdaptiveConfig neg_m2;
    neg_m2.m2 = -1.0;
    REQUIRE_THROWS_AS(integrate_adaptive(f, df, ddf, iv, neg_m2), NegativeNorm);
}

TEST_CASE("adaptive accepts plain callables for all three functions") {
    AdaptiveConfig cfg;
    cfg.tol = 1e-7;
    const AdaptiveResult r = integrate_adaptive(
        [](double t) { return std::sin(t); }, [](double t) { return std::cos(t); },
        [](double t) { return -std::sin(t); }, Interval(0.0, 1.0), cfg);
    REQUIRE(r.converged());
    REQUIRE(r.certificate == CertificateKind::Estimated);
    REQUIRE(std::abs(r.result.value - (1.0 - std::cos(1.0))) <= r.result.bound);
}
