#pragma once

#include "certquad/expr.hpp"
#include "certquad/quadrature.hpp"
#include "certquad/verify.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace certquad {

enum class SupNormMode {
    Global,  // one sup of |f''| over the whole interval
    Local,   // re-estimated on every subinterval
};

struct AdaptiveConfig {
    double tol = 1e-8;
    std::size_t max_intervals = 1'000'000;
    XiChoice xi = XiChoice::optimal();
    SupNormMode m2_mode = SupNormMode::Global;
    std::optional<double> m2;  // user-certified global sup; overrides estimation
};

struct TraceEntry {
    double a, b, xi, bound;
};

enum class AdaptiveStatus {
    Converged,
    ToleranceNotMet,  // interval budget ran out first
};

struct AdaptiveResult {
    QuadratureResult result;
    std::vector<TraceEntry> trace;      // final subintervals, ascending
    std::vector<double> bound_history;  // summed certificate after each refinement
    AdaptiveStatus status = AdaptiveStatus::Converged;
    CertificateKind certificate = CertificateKind::Estimated;

    bool converged() const { return status == AdaptiveStatus::Converged; }
};

namespace detail {

struct AdaptiveCell {
    double a, b, xi, bound;
};

// max-heap on the certified bound; equal bounds pop leftmost-first
struct CellWorse {
    bool operator()(const AdaptiveCell& p, const AdaptiveCell& q) const {
        if (p.bound != q.bound) return p.bound < q.bound;
        return p.a > q.a;
    }
};

}  // namespace detail

/// Certificate-driven refinement: always bisect the subinterval with the
/// largest certified bound (ties resolved leftmost) until the summed
/// certificate drops to tol or the interval budget runs out. Refinement is
/// deterministic; the final value and bound are re-accumulated left to right
/// with compensation.
template <class F, class DF, class DDF>
AdaptiveResult integrate_adaptive(F&& f, DF&& df, DDF&& ddf, const Interval& iv,
                                  const AdaptiveConfig& cfg) {
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("adaptive tolerance must be > 0");
    if (cfg.max_intervals < 1) throw std::invalid_argument("interval budget must be >= 1");
    if (cfg.xi.kind() == XiChoice::Kind::Explicit)
        throw std::invalid_argument("adaptive refinement needs a symbolic xi choice");

    AdaptiveResult out;

    // resolve the second-derivative sup policy
    double global_m2 = 0.0;
    const bool local = !cfg.m2 && cfg.m2_mode == SupNormMode::Local;
    if (cfg.m2) {
        if (!(*cfg.m2 >= 0.0)) throw NegativeNorm("sup-norm bound must be >= 0");
        global_m2 = *cfg.m2;
        out.certificate = CertificateKind::UserCertified;
    } else if (!local) {
        if constexpr (std::is_same_v<std::remove_cvref_t<DDF>, Expression>) {
            const SupNormEstimate s = resolve_sup_norm(ddf, iv);
            global_m2 = s.value;
            out.certificate = s.kind;
        } else {
            global_m2 = estimate_sup_norm(ddf, iv);
            out.certificate = CertificateKind::Estimated;
        }
    } else {
        out.certificate = CertificateKind::Estimated;
    }

    auto certify = [&](double a, double b) {
        const Interval sub(a, b);
        const EvalPoint xp = cfg.xi.resolve(sub);
        const double m2v = local ? estimate_sup_norm(ddf, sub) : global_m2;
        return detail::AdaptiveCell{a, b, xp.value(), bound_single(sub, xp, m2v)};
    };

    std::vector<detail::AdaptiveCell> heap;
    heap.push_back(certify(iv.a, iv.b));

    auto exact_total = [&heap]() {
        std::vector<const detail::AdaptiveCell*> order;
        order.reserve(heap.size());
        for (const auto& c : heap) order.push_back(&c);
        std::sort(order.begin(), order.end(),
                  [](const auto* p, const auto* q) { return p->a < q->a; });
        CompensatedSum s;
        for (const auto* c : order) s.add(c->bound);
        return s.value();
    };

    double running = heap.front().bound;
    out.bound_history.push_back(running);
    for (;;) {
        if (running <= cfg.tol) {
            const double exact = exact_total();
            if (exact <= cfg.tol) break;
            running = exact;  // compensation drift; keep refining
            continue;
        }
        if (heap.size() >= cfg.max_intervals) {
            out.status = AdaptiveStatus::ToleranceNotMet;
            break;
        }
        std::pop_heap(heap.begin(), heap.end(), detail::CellWorse{});
        const detail::AdaptiveCell worst = heap.back();
        heap.pop_back();

        const double mid = 0.5 * (worst.a + worst.b);
        const detail::AdaptiveCell c1 = certify(worst.a, mid);
        const detail::AdaptiveCell c2 = certify(mid, worst.b);
        running += (c1.bound + c2.bound) - worst.bound;
        heap.push_back(c1);
        std::push_heap(heap.begin(), heap.end(), detail::CellWorse{});
        heap.push_back(c2);
        std::push_heap(heap.begin(), heap.end(), detail::CellWorse{});
        out.bound_history.push_back(running);
    }

    // final report, leaves ascending
    std::sort(heap.begin(), heap.end(),
              [](const detail::AdaptiveCell& p, const detail::AdaptiveCell& q) { return p.a < q.a; });
    CompensatedSum value, bound;
    out.trace.reserve(heap.size());
    for (const detail::AdaptiveCell& c : heap) {
        const Interval sub(c.a, c.b);
        const EvalPoint xp = cfg.xi.resolve(sub);
        value.add(rule_single(f, df, sub, xp));
        bound.add(c.bound);
        out.trace.push_back({c.a, c.b, c.xi, c.bound});
    }
    out.result.value = value.value();
    out.result.bound = bound.value();
    out.result.evals = static_cast<long long>(heap.size()) * 6;
    out.result.rule = std::string("adaptive[xi=") + cfg.xi.name() + "]";
    return out;
}

}  // namespace certquad
