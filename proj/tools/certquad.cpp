// certquad — certified quadrature from the command line.
//
// Subcommands: integrate, verify, compare, prob. Every command can emit
// human-readable text (default), --json (schema_version 1) or --csv.
// Exit codes: 0 success, 2 bad input, 3 tolerance not met.

#include "certquad/certquad.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstddef>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace cq = certquad;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitTolerance = 3;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

std::string fmt(double v) { return cq::detail::format_double(v); }

// --m1/--m2 accept a real number or the word "auto"
std::optional<double> norm_flag(const std::string& s, const char* flag) {
    if (s == "auto") return std::nullopt;
    try {
        std::size_t idx = 0;
        const double v = std::stod(s, &idx);
        if (idx != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw cq::Error(std::string(flag) + " expects a real number or 'auto'");
    }
}

cq::XiChoice xi_flag(const std::string& s) {
    if (s == "optimal") return cq::XiChoice::optimal();
    if (s == "midpoint") return cq::XiChoice::midpoint();
    if (s == "left") return cq::XiChoice::left();
    throw cq::Error("--xi must be one of optimal|midpoint|left");
}

json base_report(const std::string& command, json inputs) {
    json j;
    j["schema_version"] = 1;
    j["command"] = command;
    j["inputs"] = std::move(inputs);
    return j;
}

void emit_json(json& j, const Timer& timer) {
    j["timing_ms"] = timer.ms();
    std::cout << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------

struct IntegrateArgs {
    std::string f;
    double a = 0.0, b = 1.0;
    std::optional<std::size_t> n;
    std::optional<double> tol;
    std::string xi = "optimal";
    std::string m2 = "auto";
    std::size_t max_intervals = 1'000'000;
    bool oracle = false;
    bool as_json = false, as_csv = false;
};

int run_integrate(const IntegrateArgs& args) {
    if (args.n.has_value() == args.tol.has_value())
        throw cq::Error("pass exactly one of --n and --tol");

    Timer timer;
    const cq::Interval iv(args.a, args.b);
    const cq::Expression f = cq::parse(args.f);
    const cq::Expression df = f.derivative();
    const cq::Expression ddf = df.derivative();
    const std::optional<double> m2 = norm_flag(args.m2, "--m2");
    const char* kind = m2 ? "USER_CERTIFIED" : "ESTIMATED";

    cq::QuadratureResult res;
    std::vector<cq::TraceEntry> trace;
    bool adaptive = false;
    bool converged = true;

    if (args.n) {
        const double m2v = m2 ? *m2 : cq::estimate_sup_norm(ddf, iv);
        res = cq::integrate_composite(f, df, cq::Partition::uniform(iv, *args.n),
                                      xi_flag(args.xi), m2v);
    } else {
        adaptive = true;
        cq::AdaptiveConfig cfg;
        cfg.tol = *args.tol;
        cfg.max_intervals = args.max_intervals;
        cfg.xi = xi_flag(args.xi);
        cfg.m2 = m2;
        cq::AdaptiveResult ar = cq::integrate_adaptive(f, df, ddf, iv, cfg);
        res = ar.result;
        trace = std::move(ar.trace);
        converged = ar.converged();
    }

    std::optional<double> oracle_error;
    if (args.oracle)
        oracle_error = std::abs(res.value - cq::reference_integral(f, iv));

    if (args.as_json) {
        json inputs = {{"f", args.f}, {"a", args.a}, {"b", args.b},
                       {"xi", args.xi}, {"m2", args.m2}};
        if (args.n) inputs["n"] = *args.n;
        if (args.tol) inputs["tol"] = *args.tol;
        json j = base_report("integrate", std::move(inputs));
        j["result"] = {{"value", res.value},
                       {"bound", res.bound},
                       {"certificate_kind", kind},
                       {"rule", res.rule},
                       {"evals", res.evals}};
        if (adaptive) {
            j["result"]["converged"] = converged;
            json tr = json::array();
            for (const auto& e : trace)
                tr.push_back({{"a", e.a}, {"b", e.b}, {"xi", e.xi}, {"bound", e.bound}});
            j["trace"] = std::move(tr);
        }
        if (oracle_error) j["result"]["oracle_error"] = *oracle_error;
        emit_json(j, timer);
    } else if (args.as_csv) {
        std::cout << "f,a,b,rule,n,value,bound,certificate_kind,oracle_error\n"
                  << args.f << ',' << fmt(args.a) << ',' << fmt(args.b) << ',' << res.rule << ','
                  << (args.n ? *args.n : trace.size()) << ',' << fmt(res.value) << ','
                  << fmt(res.bound) << ',' << kind << ','
                  << (oracle_error ? fmt(*oracle_error) : "") << "\n";
    } else {
        std::cout << "rule        " << res.rule << "\n"
                  << "value       " << fmt(res.value) << "\n"
                  << "bound       " << fmt(res.bound) << "  (" << kind << ")\n"
                  << "evals       " << res.evals << "\n";
        if (adaptive)
            std::cout << "intervals   " << trace.size() << "\n"
                      << "converged   " << (converged ? "yes" : "no") << "\n";
        if (oracle_error) std::cout << "oracle err  " << fmt(*oracle_error) << "\n";
        std::cout << "timing_ms   " << timer.ms() << "\n";
    }
    return converged ? kExitOk : kExitTolerance;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
    std::string f;
    double a = 0.0, b = 1.0;
    std::optional<double> x;
    std::optional<std::size_t> x_grid;
    std::string m2 = "auto";
    bool as_json = false, as_csv = false;
};

int run_verify(const VerifyArgs& args) {
    if (args.x.has_value() == args.x_grid.has_value())
        throw cq::Error("pass exactly one of --x and --x-grid");

    Timer timer;
    const cq::Interval iv(args.a, args.b);
    const cq::Expression f = cq::parse(args.f);
    const std::optional<double> m2 = norm_flag(args.m2, "--m2");

    if (args.x) {
        const cq::VerificationReport rep =
            cq::verify_inequality(f, iv, cq::EvalPoint::checked(iv, *args.x), m2);
        if (args.as_json) {
            json j = base_report("verify", {{"f", args.f}, {"a", args.a}, {"b", args.b},
                                            {"x", *args.x}, {"m2", args.m2}});
            j["result"] = {{"lhs", rep.lhs},
                           {"rhs", rep.rhs},
                           {"ratio", rep.ratio},
                           {"holds", rep.holds},
                           {"certificate_kind", cq::to_string(rep.certificate)}};
            emit_json(j, timer);
        } else if (args.as_csv) {
            std::cout << "f,a,b,x,lhs,rhs,ratio,holds\n"
                      << rep.f << ',' << fmt(rep.a) << ',' << fmt(rep.b) << ',' << fmt(rep.x)
                      << ',' << fmt(rep.lhs) << ',' << fmt(rep.rhs) << ',' << fmt(rep.ratio)
                      << ',' << (rep.holds ? "true" : "false") << "\n";
        } else {
            std::cout << "f           " << rep.f << "\n"
                      << "x           " << fmt(rep.x) << "\n"
                      << "lhs         " << fmt(rep.lhs) << "\n"
                      << "rhs         " << fmt(rep.rhs) << "  ("
                      << cq::to_string(rep.certificate) << ")\n"
                      << "ratio       " << fmt(rep.ratio) << "\n"
                      << "holds       " << (rep.holds ? "yes" : "no") << "\n"
                      << "timing_ms   " << timer.ms() << "\n";
        }
        return rep.holds ? kExitOk : kExitTolerance;
    }

    const cq::ScanResult scan = cq::sharpness_scan({f}, iv, *args.x_grid);
    bool all_hold = true;
    for (const auto& r : scan.rows) all_hold = all_hold && r.holds;
    if (args.as_json) {
        json j = base_report("verify", {{"f", args.f}, {"a", args.a}, {"b", args.b},
                                        {"x_grid", *args.x_grid}, {"m2", args.m2}});
        json rows = json::array();
        for (const auto& r : scan.rows)
            rows.push_back({{"f", r.f}, {"a", r.a}, {"b", r.b}, {"x", r.x}, {"lhs", r.lhs},
                            {"rhs", r.rhs}, {"ratio", r.ratio}, {"holds", r.holds}});
        j["result"] = {{"rows", std::move(rows)},
                       {"max_ratio", scan.max_ratio},
                       {"max_x", scan.max_x},
                       {"all_hold", all_hold}};
        emit_json(j, timer);
    } else if (args.as_csv) {
        std::cout << scan.to_csv();
    } else {
        std::cout << "f           " << args.f << "\n"
                  << "points      " << scan.rows.size() << "\n"
                  << "max ratio   " << fmt(scan.max_ratio) << " at x = " << fmt(scan.max_x)
                  << "\n"
                  << "all hold    " << (all_hold ? "yes" : "no") << "\n"
                  << "timing_ms   " << timer.ms() << "\n";
    }
    return all_hold ? kExitOk : kExitTolerance;
}

// ---------------------------------------------------------------------------

struct CompareArgs {
    std::string f;
    double a = 0.0, b = 1.0;
    std::size_t n = 8;
    std::string m2 = "auto";
    bool as_json = false, as_csv = false;
};

int run_compare(const CompareArgs& args) {
    Timer timer;
    const cq::Interval iv(args.a, args.b);
    const cq::Expression f = cq::parse(args.f);
    const cq::Expression df = f.derivative();
    const cq::Expression ddf = df.derivative();
    const std::optional<double> m2 = norm_flag(args.m2, "--m2");
    const double m2v = m2 ? *m2 : cq::estimate_sup_norm(ddf, iv);
    const char* kind = m2 ? "USER_CERTIFIED" : "ESTIMATED";

    const cq::Partition p = cq::Partition::uniform(iv, args.n);
    const double oracle = cq::reference_integral(f, iv);

    struct Row {
        const char* name;
        cq::QuadratureResult res;
        double err;
    };
    std::vector<Row> rows;
    for (const cq::XiChoice& xi :
         {cq::XiChoice::optimal(), cq::XiChoice::midpoint(), cq::XiChoice::left()}) {
        cq::QuadratureResult r = cq::integrate_composite(f, df, p, xi, m2v);
        const char* name = xi.kind() == cq::XiChoice::Kind::Optimal    ? "companion_optimal"
                           : xi.kind() == cq::XiChoice::Kind::Midpoint ? "midpoint_baseline"
                                                                       : "perturbed_trapezoid";
        const double err = std::abs(r.value - oracle);
        rows.push_back({name, std::move(r), err});
    }

    if (args.as_json) {
        json j = base_report("compare", {{"f", args.f}, {"a", args.a}, {"b", args.b},
                                         {"n", args.n}, {"m2", args.m2}});
        json jrows = json::array();
        for (const Row& r : rows)
            jrows.push_back({{"rule", r.name}, {"value", r.res.value}, {"bound", r.res.bound},
                             {"true_error", r.err}});
        j["result"] = {{"rows", std::move(jrows)},
                       {"oracle", oracle},
                       {"certificate_kind", kind}};
        emit_json(j, timer);
    } else if (args.as_csv) {
        std::cout << "rule,value,bound,true_error\n";
        for (const Row& r : rows)
            std::cout << r.name << ',' << fmt(r.res.value) << ',' << fmt(r.res.bound) << ','
                      << fmt(r.err) << "\n";
    } else {
        std::cout << "oracle      " << fmt(oracle) << "   (n = " << args.n << ", m2 " << kind
                  << ")\n";
        for (const Row& r : rows)
            std::cout << r.name << "\n  value " << fmt(r.res.value) << "\n  bound "
                      << fmt(r.res.bound) << "\n  error " << fmt(r.err) << "\n";
        std::cout << "timing_ms   " << timer.ms() << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct ProbArgs {
    std::string pdf;
    std::optional<std::string> cdf;
    double a = 0.0, b = 1.0;
    std::optional<double> x;
    std::optional<std::size_t> x_grid;
    std::string m1 = "auto";
    bool as_json = false, as_csv = false;
};

int run_prob(const ProbArgs& args) {
    if (args.x.has_value() == args.x_grid.has_value())
        throw cq::Error("pass exactly one of --x and --x-grid");

    Timer timer;
    const cq::Interval iv(args.a, args.b);
    const cq::Expression pdf = cq::parse(args.pdf);
    const std::optional<double> m1 = norm_flag(args.m1, "--m1");
    const cq::Distribution dist =
        args.cdf ? cq::Distribution::with_cdf(pdf, cq::parse(*args.cdf), iv, m1)
                 : cq::Distribution::with_oracle_cdf(pdf, iv, m1);

    json inputs = {{"pdf", args.pdf}, {"a", args.a}, {"b", args.b}, {"m1", args.m1}};
    if (args.cdf) inputs["cdf"] = *args.cdf;

    if (args.x) {
        const cq::EvalPoint xp = cq::EvalPoint::checked(iv, *args.x);
        const cq::VerificationReport rep = cq::verify_prob_inequality(dist, xp);
        const cq::ExpectationInterval ei = cq::expectation_interval(dist, xp);
        if (args.as_json) {
            inputs["x"] = *args.x;
            json j = base_report("prob", std::move(inputs));
            j["result"] = {{"lhs", rep.lhs},
                           {"rhs", rep.rhs},
                           {"ratio", rep.ratio},
                           {"holds", rep.holds},
                           {"certificate_kind", cq::to_string(rep.certificate)},
                           {"expectation", dist.expectation()},
                           {"interval",
                            {{"low", ei.low()},
                             {"high", ei.high()},
                             {"center", ei.center},
                             {"width", ei.width()}}}};
            emit_json(j, timer);
        } else if (args.as_csv) {
            std::cout << "f,a,b,x,lhs,rhs,ratio,holds,center,width\n"
                      << rep.f << ',' << fmt(rep.a) << ',' << fmt(rep.b) << ',' << fmt(rep.x)
                      << ',' << fmt(rep.lhs) << ',' << fmt(rep.rhs) << ',' << fmt(rep.ratio)
                      << ',' << (rep.holds ? "true" : "false") << ',' << fmt(ei.center) << ','
                      << fmt(ei.width()) << "\n";
        } else {
            std::cout << "pdf         " << rep.f << "\n"
                      << "x           " << fmt(rep.x) << "\n"
                      << "lhs         " << fmt(rep.lhs) << "\n"
                      << "rhs         " << fmt(rep.rhs) << "  ("
                      << cq::to_string(rep.certificate) << ")\n"
                      << "holds       " << (rep.holds ? "yes" : "no") << "\n"
                      << "E(X)        " << fmt(dist.expectation()) << "\n"
                      << "E interval  [" << fmt(ei.low()) << ", " << fmt(ei.high())
                      << "]  center " << fmt(ei.center) << "  width " << fmt(ei.width()) << "\n"
                      << "timing_ms   " << timer.ms() << "\n";
        }
        return rep.holds ? kExitOk : kExitTolerance;
    }

    // grid scan: report each x and where the bracket is tightest
    struct Row {
        cq::VerificationReport rep;
        cq::ExpectationInterval ei;
    };
    std::vector<Row> rows;
    double min_width_x = iv.a;
    double min_width = std::numeric_limits<double>::infinity();
    bool all_hold = true;
    for (double xv : cq::admissible_grid(iv, *args.x_grid)) {
        const cq::EvalPoint xp = cq::EvalPoint::checked(iv, xv);
        Row row{cq::verify_prob_inequality(dist, xp), cq::expectation_interval(dist, xp)};
        all_hold = all_hold && row.rep.holds;
        if (row.ei.width() < min_width) {
            min_width = row.ei.width();
            min_width_x = xv;
        }
        rows.push_back(std::move(row));
    }

    if (args.as_json) {
        inputs["x_grid"] = *args.x_grid;
        json j = base_report("prob", std::move(inputs));
        json jrows = json::array();
        for (const Row& r : rows)
            jrows.push_back({{"x", r.rep.x}, {"lhs", r.rep.lhs}, {"rhs", r.rep.rhs},
                             {"ratio", r.rep.ratio}, {"holds", r.rep.holds},
                             {"center", r.ei.center}, {"width", r.ei.width()}});
        j["result"] = {{"rows", std::move(jrows)},
                       {"expectation", dist.expectation()},
                       {"min_width_x", min_width_x},
                       {"min_width", min_width},
                       {"all_hold", all_hold}};
        emit_json(j, timer);
    } else if (args.as_csv) {
        std::cout << "f,a,b,x,lhs,rhs,ratio,holds,center,width\n";
        for (const Row& r : rows)
            std::cout << r.rep.f << ',' << fmt(r.rep.a) << ',' << fmt(r.rep.b) << ','
                      << fmt(r.rep.x) << ',' << fmt(r.rep.lhs) << ',' << fmt(r.rep.rhs) << ','
                      << fmt(r.rep.ratio) << ',' << (r.rep.holds ? "true" : "false") << ','
                      << fmt(r.ei.center) << ',' << fmt(r.ei.width()) << "\n";
    } else {
        std::cout << "pdf         " << args.pdf << "\n"
                  << "points      " << rows.size() << "\n"
                  << "E(X)        " << fmt(dist.expectation()) << "\n"
                  << "min width   " << fmt(min_width) << " at x = " << fmt(min_width_x) << "\n"
                  << "all hold    " << (all_hold ? "yes" : "no") << "\n"
                  << "timing_ms   " << timer.ms() << "\n";
    }
    return all_hold ? kExitOk : kExitTolerance;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certified quadrature toolkit"};
    app.require_subcommand(1);

    IntegrateArgs ia;
    CLI::App* integrate = app.add_subcommand("integrate", "integrate with a certified bound");
    integrate->add_option("--f", ia.f, "integrand expression in t")->required();
    integrate->add_option("--a", ia.a, "left endpoint (default 0)");
    integrate->add_option("--b", ia.b, "right endpoint (default 1)");
    integrate->add_option("--n", ia.n, "uniform subinterval count");
    integrate->add_option("--tol", ia.tol, "target certified bound (adaptive)");
    integrate->add_option("--xi", ia.xi, "evaluation point: optimal|midpoint|left");
    integrate->add_option("--m2", ia.m2, "sup |f''| bound, or 'auto'");
    integrate->add_option("--max-intervals", ia.max_intervals, "adaptive interval budget");
    integrate->add_flag("--oracle", ia.oracle, "also report |value - reference integral|");
    integrate->add_flag("--json", ia.as_json, "emit JSON");
    integrate->add_flag("--csv", ia.as_csv, "emit CSV");

    VerifyArgs va;
    CLI::App* verify = app.add_subcommand("verify", "check the certificate against the oracle");
    verify->add_option("--f", va.f, "function expression in t")->required();
    verify->add_option("--a", va.a, "left endpoint (default 0)");
    verify->add_option("--b", va.b, "right endpoint (default 1)");
    verify->add_option("--x", va.x, "evaluation point in [a,(a+b)/2]");
    verify->add_option("--x-grid", va.x_grid, "scan an admissible grid of this many points");
    verify->add_option("--m2", va.m2, "sup |f''| bound, or 'auto'");
    verify->add_flag("--json", va.as_json, "emit JSON");
    verify->add_flag("--csv", va.as_csv, "emit CSV");

    CompareArgs ca;
    CLI::App* compare = app.add_subcommand("compare", "main rule vs baselines, same budget");
    compare->add_option("--f", ca.f, "integrand expression in t")->required();
    compare->add_option("--a", ca.a, "left endpoint (default 0)");
    compare->add_option("--b", ca.b, "right endpoint (default 1)");
    compare->add_option("--n", ca.n, "uniform subinterval count (default 8)");
    compare->add_option("--m2", ca.m2, "sup |f''| bound, or 'auto'");
    compare->add_flag("--json", ca.as_json, "emit JSON");
    compare->add_flag("--csv", ca.as_csv, "emit CSV");

    ProbArgs pa;
    CLI::App* prob = app.add_subcommand("prob", "expectation bounds from CDF evaluations");
    prob->add_option("--pdf", pa.pdf, "density expression in t")->required();
    prob->add_option("--cdf", pa.cdf, "analytic CDF (omit to integrate the density)");
    prob->add_option("--a", pa.a, "left endpoint (default 0)");
    prob->add_option("--b", pa.b, "right endpoint (default 1)");
    prob->add_option("--x", pa.x, "evaluation point in [a,(a+b)/2]");
    prob->add_option("--x-grid", pa.x_grid, "scan an admissible grid of this many points");
    prob->add_option("--m1", pa.m1, "sup |pdf'| bound, or 'auto'");
    prob->add_flag("--json", pa.as_json, "emit JSON");
    prob->add_flag("--csv", pa.as_csv, "emit CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (integrate->parsed()) return run_integrate(ia);
        if (verify->parsed()) return run_verify(va);
        if (compare->parsed()) return run_compare(ca);
        if (prob->parsed()) return run_prob(pa);
    } catch (const cq::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
