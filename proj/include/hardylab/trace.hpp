#pragma once

#include <cmath>
#include <vector>

#include "hardylab/exponents.hpp"
#include "hardylab/quadrature.hpp"

namespace hardylab {

// Normalized boundary-mass estimate: samples of T(eps) = eps^{-alpha_-}
// integral_{Sigma_eps} u dS on a geometric eps sequence, with the
// extrapolated limit of the fitted model T ~ L + C eps^p.
struct TraceEstimate {
    std::vector<double> eps;
    std::vector<double> values;
    double extrapolated_limit = 0.0;
    double fitted_rate = 0.0;
    bool converged = false;
    double fit_residual = 0.0;
};

namespace detail {

inline TraceEstimate fit_trace(std::vector<double> eps, std::vector<double> T,
                               double fit_tol = 0.02) {
    TraceEstimate est;
    est.eps = std::move(eps);
    est.values = std::move(T);
    const int m = int(est.values.size());
    if (m < 3) {
        est.extrapolated_limit = est.values.empty() ? 0.0 : est.values.back();
        est.converged = false;
        return est;
    }
    double scale = 0.0;
    for (double v : est.values) scale = std::max(scale, std::abs(v));
    scale = std::max(scale, 1e-300);
    const double d1 = est.values[m - 2] - est.values[m - 3];
    const double d2 = est.values[m - 1] - est.values[m - 2];
    if (std::abs(d2) <= 1e-11 * scale && std::abs(d1) <= 1e-10 * scale) {
        est.extrapolated_limit = est.values[m - 1];
        est.fitted_rate = std::numeric_limits<double>::infinity();
        est.converged = true;
        return est;
    }
    // extrapolate from the innermost contracting triple; deeper samples may
    // sit in interpolation noise once the increments fall to that level
    int kt = -1;
    for (int k = m - 1; k >= 2; --k) {
        const double da = est.values[k - 1] - est.values[k - 2];
        const double db = est.values[k] - est.values[k - 1];
        if (da != 0.0 && db / da > 0.0 && db / da < 0.95) {
            kt = k;
            break;
        }
    }
    if (kt < 0) {
        // non-contracting or oscillating: report the last sample, unconverged
        est.extrapolated_limit = est.values[m - 1];
        est.fitted_rate = std::numeric_limits<double>::quiet_NaN();
        est.converged = false;
        return est;
    }
    const double da = est.values[kt - 1] - est.values[kt - 2];
    const double db = est.values[kt] - est.values[kt - 1];
    const double ratio = db / da;
    est.fitted_rate = -std::log2(ratio);
    est.extrapolated_limit = est.values[kt] + db * ratio / (1.0 - ratio);
    // model residual over the samples from the triple inward, against the
    // sample scale; wild oscillation never yields a contracting triple and is
    // rejected above, so this guards against a sloppy power fit only
    const double C = (est.values[kt] - est.extrapolated_limit) /
                     std::pow(est.eps[kt], est.fitted_rate);
    const int k0 = std::max(0, kt - 4);
    double resid = 0.0;
    for (int k = k0; k < m; ++k) {
        const double pred = est.extrapolated_limit + C * std::pow(est.eps[k], est.fitted_rate);
        resid = std::max(resid, std::abs(pred - est.values[k]));
    }
    est.fit_residual = resid / scale;
    est.converged = est.fit_residual < fit_tol;
    return est;
}

} // namespace detail

struct TraceOptions {
    int eps_count = 8;        // requested sequence length (>= 3)
    double first_eps = 0.0;   // 0: strip width / 8
    double ratio = 0.5;
    double fit_tol = 0.02;    // scale-relative model residual bound
};

// T(eps) samples over all covered components (aggregate).
inline TraceEstimate normalized_trace(const GridFunction& u, const ExponentPair& pair,
                                      TraceOptions opt = {}) {
    if (opt.eps_count < 3) throw DomainError("trace estimation needs eps_count >= 3");
    const Grid& g = *u.grid;
    const double strip = std::min(g.max_delta(), g.domain.inradius());
    double eps = (opt.first_eps > 0.0) ? opt.first_eps : strip / 8.0;
    const double eps_min = min_resolvable_eps(g);
    std::vector<double> es, Ts;
    for (int k = 0; k < opt.eps_count && eps >= eps_min; ++k, eps *= opt.ratio) {
        const auto S = surface_integral(u, eps);
        es.push_back(eps);
        Ts.push_back(std::pow(eps, -pair.alpha_minus) * S.total);
    }
    return detail::fit_trace(std::move(es), std::move(Ts), opt.fit_tol);
}

// Per-component trace estimates, aligned with grid->covered_components().
inline std::vector<TraceEstimate> normalized_trace_per_component(
    const GridFunction& u, const ExponentPair& pair, TraceOptions opt = {}) {
    if (opt.eps_count < 3) throw DomainError("trace estimation needs eps_count >= 3");
    const Grid& g = *u.grid;
    const int nc = int(g.covered_components().size());
    const double strip = std::min(g.max_delta(), g.domain.inradius());
    double eps0 = (opt.first_eps > 0.0) ? opt.first_eps : strip / 8.0;
    const double eps_min = min_resolvable_eps(g);
    std::vector<std::vector<double>> es(nc), Ts(nc);
    double eps = eps0;
    for (int k = 0; k < opt.eps_count && eps >= eps_min; ++k, eps *= opt.ratio) {
        const auto S = surface_integral(u, eps);
        for (int c = 0; c < nc; ++c) {
            es[c].push_back(eps);
            Ts[c].push_back(std::pow(eps, -pair.alpha_minus) * S.per_component[c]);
        }
    }
    std::vector<TraceEstimate> out;
    for (int c = 0; c < nc; ++c)
        out.push_back(detail::fit_trace(std::move(es[c]), std::move(Ts[c]), opt.fit_tol));
    return out;
}

} // namespace hardylab
