#pragma once

#include <algorithm>
#include <cmath>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hardylab/hardy.hpp"
#include "hardylab/linear.hpp"
#include "hardylab/operator.hpp"
#include "hardylab/trace.hpp"

namespace hardylab {

// Boundary-value data for -L_mu u + |u|^{q-1} u = 0 with prescribed
// normalized boundary mass (density c per boundary component).
struct NonlinearProblem {
    RadialDomain domain;
    double mu = 0.0;             // < 1/4
    double q = 2.0;              // > 1
    double trace_mass = 0.0;     // density c of nu = c dS per component, >= 0
    std::optional<double> inner_data;  // Dirichlet value on an inner surface (strip runs)

    NonlinearProblem(RadialDomain dom, double mu_, double q_, double c)
        : domain(std::move(dom)), mu(mu_), q(q_), trace_mass(c) {
        if (!(mu < 0.25)) throw DomainError("nonlinear problem requires mu < 1/4");
        if (!(q > 1.0)) throw DomainError("nonlinear problem requires q > 1");
        if (!(trace_mass >= 0.0)) throw DomainError("trace mass must be >= 0");
    }
};

struct NewtonOptions {
    double tol = 1e-9;
    int max_iterations = 80;
    int max_backtracks = 30;
    bool clamp_positive = true;
};

struct NewtonOutcome {
    int iterations = 0;
    bool converged = false;
    double final_residual = 0.0;
    std::vector<double> residual_history;
};

namespace detail {

inline double signed_power(double u, double q) {
    return std::copysign(std::pow(std::abs(u), q), u);
}

// Damped Newton for A u + m.(|u|^{q-1}u) = b. Residuals are judged per
// volume against a per-node scale (the potential term varies by many orders
// across a graded mesh).
inline NewtonOutcome newton_nonlinear(const DiscreteOperator& op, double q,
                                      const std::vector<double>& b,
                                      std::vector<double>& u, NewtonOptions opt = {}) {
    const int n = op.grid->n;
    TriDiag A = op.matrix();
    auto nl_residual = [&](const std::vector<double>& x) {
        std::vector<double> F = A.apply(x);
        for (int i = 0; i < n; ++i)
            F[i] += op.mass[i] * signed_power(x[i], q) - b[i];
        return F;
    };
    auto scaled_norm = [&](const std::vector<double>& F, const std::vector<double>& x) {
        // mass-relative residual; the small stiffness-row term only absorbs
        // the cancellation roundoff of A*u on strongly graded meshes and sits
        // below any resolvable physics
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const double s = op.mass[i] * (1.0 + std::pow(std::abs(x[i]), q)) +
                             std::abs(op.mu) * op.pot[i] * (1.0 + std::abs(x[i])) +
                             std::abs(b[i]) +
                             1e-6 * (op.cpl[i] + op.cpl[i + 1]) * (1.0 + std::abs(x[i]));
            worst = std::max(worst, std::abs(F[i]) / s);
        }
        return worst;
    };
    NewtonOutcome out;
    std::vector<double> F = nl_residual(u);
    double fn = scaled_norm(F, u);
    int stagnant = 0;
    for (int it = 0; it < opt.max_iterations; ++it) {
        out.iterations = it;
        out.residual_history.push_back(fn);
        out.final_residual = fn;
        if (fn < opt.tol) {
            out.converged = true;
            return out;
        }
        TriDiag J = A;
        for (int i = 0; i < n; ++i)
            J.diag[i] += q * op.mass[i] * std::pow(std::abs(u[i]), q - 1.0);
        std::vector<double> rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = -F[i];
        std::vector<double> du = solve_tridiag(J, std::move(rhs));
        // a negligible step means u is determined to machine precision even
        // when the scaled residual is pinned at the roundoff floor
        double step = 0.0;
        for (int i = 0; i < n; ++i)
            step = std::max(step, std::abs(du[i]) / (1.0 + std::abs(u[i])));
        if (step < 1e-13) {
            out.converged = true;
            return out;
        }
        if (it > 0 && fn > 0.9 * out.residual_history[it - 1]) {
            if (++stagnant >= 4) break;  // roundoff floor, no meaningful step left
        } else {
            stagnant = 0;
        }
        double lambda = 1.0;
        std::vector<double> trial(n), Ft;
        for (int bt = 0; bt <= opt.max_backtracks; ++bt) {
            for (int i = 0; i < n; ++i) {
                trial[i] = u[i] + lambda * du[i];
                if (opt.clamp_positive && trial[i] < 0.0) trial[i] = 0.0;
            }
            Ft = nl_residual(trial);
            const double fnt = scaled_norm(Ft, trial);
            if (fnt <= (1.0 - 1e-4 * lambda) * fn || bt == opt.max_backtracks) {
                u.swap(trial);
                F.swap(Ft);
                fn = fnt;
                break;
            }
            lambda *= 0.5;
        }
    }
    out.final_residual = fn;
    out.converged = fn < opt.tol;
    return out;
}

// discrete energy functional 0.5 |grad u|^2 - 0.5 mu u^2/delta^2 + |u|^{q+1}/(q+1)
inline double discrete_energy(const DiscreteOperator& op, const std::vector<double>& u,
                              double q, double g_lo, double g_hi) {
    const int n = op.grid->n;
    double grad = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double ul = (j == 0) ? g_lo : u[j - 1];
        const double ur = (j == n) ? g_hi : u[j];
        const double d = ur - ul;
        grad += op.cpl[j] * d * d;
    }
    double rest = 0.0;
    for (int i = 0; i < n; ++i)
        rest += -0.5 * op.mu * op.pot[i] * u[i] * u[i] +
                op.mass[i] * std::pow(std::abs(u[i]), q + 1.0) / (q + 1.0);
    return op.grid->domain.angular_factor() * (0.5 * grad + rest);
}

inline double ko_envelope_constant(double q) {
    return std::pow(2.0 * (q + 1.0) / ((q - 1.0) * (q - 1.0)), 1.0 / (q - 1.0));
}

inline double interp_r(const GridFunction& u, double r) {
    const Grid& g = *u.grid;
    if (r <= g.node_r(0)) return u[0];
    if (r >= g.node_r(g.n - 1)) return u[g.n - 1];
    int lo = 0, hi = g.n - 1;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        (g.node_r(mid) < r ? lo : hi) = mid;
    }
    const double t = (r - g.node_r(lo)) / (g.node_r(hi) - g.node_r(lo));
    return (1.0 - t) * u[lo] + t * u[hi];
}

} // namespace detail

// Provenance record for a nonlinear solve.
struct SolveReport {
    GridFunction solution;
    int iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
    bool ordering_certificate = false;
    TraceEstimate trace;                 // estimator output on the final level
    double trace_mass_estimate = 0.0;    // extrapolated boundary mass
    bool trace_loss = false;
    double ko_constant = 0.0;            // sup u delta^{2/(q-1)} over the stable window
    double layer_constant = 0.0;         // u delta^{2/(q-1)} at the window anchor
    double energy = 0.0;                 // discrete functional value where applicable
    double lambda_shift = 0.0;           // monotone-iteration shift actually used
    bool admissible = true;              // weighted-kernel precondition verdict
    double identity_deviation = 0.0;     // max rel |u + G[u^q] - h_c| on the final level
    std::vector<std::pair<double, double>> exhaustion_history;  // (cut, trace level)
    std::string notes;
};

// Per-run archive of computed solutions; sealed writes, concurrent reads.
class SolutionArchive {
public:
    struct Entry {
        std::string label;
        GridFunction u;
    };
    void add(std::string label, GridFunction u) {
        std::lock_guard<std::mutex> lk(m_);
        entries_.push_back({std::move(label), std::move(u)});
    }
    std::vector<Entry> snapshot() const {
        std::lock_guard<std::mutex> lk(m_);
        return entries_;
    }

private:
    mutable std::mutex m_;
    std::vector<Entry> entries_;
};

struct DirichletOptions {
    NewtonOptions newton;
    bool cross_check_starts = true;  // restart from 0 and from a large constant
    double agreement_tol = 1e-8;
};

// Interior / strip Dirichlet problem: -L_mu u + u^q = 0 on the grid's
// interval with the given edge values (mu/delta^2 is bounded there).
// Uniqueness is cross-checked by solving from two ordered starts.
inline SolveReport solve_dirichlet(const RadialDomain& dom, double mu, double q,
                                   const GridPtr& grid, double bc_lo, double bc_hi,
                                   DirichletOptions opt = {}) {
    if (!(mu < 0.25)) throw DomainError("solver requires mu < 1/4");
    if (!(q > 1.0)) throw DomainError("solver requires q > 1");
    (void)dom;
    DiscreteOperator op(grid, mu);
    const int n = grid->n;
    const auto b = op.boundary_lift(bc_lo, bc_hi);
    const double bmax = std::max(bc_lo, bc_hi);
    std::vector<double> u(n, 0.0);
    auto out0 = detail::newton_nonlinear(op, q, b, u, opt.newton);
    SolveReport rep;
    rep.iterations = out0.iterations;
    rep.final_residual = out0.final_residual;
    rep.converged = out0.converged;
    rep.ordering_certificate = true;
    if (opt.cross_check_starts) {
        std::vector<double> u2(n, 2.0 * bmax + 1.0);
        auto out2 = detail::newton_nonlinear(op, q, b, u2, opt.newton);
        double dev = 0.0;
        for (int i = 0; i < n; ++i)
            dev = std::max(dev, std::abs(u[i] - u2[i]) / (1.0 + std::abs(u[i])));
        rep.converged = rep.converged && out2.converged;
        if (dev > opt.agreement_tol) {
            rep.ordering_certificate = false;
            rep.notes = "two-start cross-check deviation " + std::to_string(dev);
        }
    }
    if (!rep.converged)
        throw SolverFailure("interior Dirichlet solve did not converge (residual " +
                            std::to_string(rep.final_residual) + ")");
    rep.energy = detail::discrete_energy(op, u, q, bc_lo, bc_hi);
    rep.solution = GridFunction(grid, std::move(u));
    return rep;
}

struct MonotoneOptions {
    double tol = 1e-10;
    int max_iterations = 4000;
    double ordering_tol = 1e-9;
    double lambda_override = 0.0;  // testing hook; 0 = automatic
};

// Monotone iteration between an ordered subsolution/supersolution pair:
// w_{k+1} = (A + Lambda M)^{-1} (M (Lambda w_k - w_k^q) + b), descending from
// the supersolution. Lambda starts at 1.1 q (sup super)^{q-1} and is raised
// if needed to keep A + Lambda M positive definite (inverse positivity).
inline SolveReport monotone_iteration(const RadialDomain& dom, double mu, double q,
                                      const GridFunction& sub, const GridFunction& super,
                                      double bc_lo, double bc_hi, MonotoneOptions opt = {}) {
    (void)dom;
    const GridPtr grid = super.grid;
    const int n = grid->n;
    if (sub.grid != super.grid) throw DomainError("sub/supersolution grids differ");
    for (int i = 0; i < n; ++i)
        if (!(sub[i] <= super[i] + 1e-14 * (1.0 + std::abs(super[i]))) || sub[i] < -1e-14)
            throw DomainError("monotone iteration needs 0 <= sub <= super nodewise (node " +
                              std::to_string(i) + ")");
    DiscreteOperator op(grid, mu);
    TriDiag A = op.matrix();
    double sup_super = 0.0;
    for (double v : super.values) sup_super = std::max(sup_super, v);
    double lambda = 1.1 * q * std::pow(std::max(sup_super, 1e-300), q - 1.0);
    // positive-definiteness safeguard for the shifted operator
    {
        TriDiag M;
        M.diag = op.mass;
        M.off.assign(n - 1, 0.0);
        std::vector<double> s(n);
        for (int i = 0; i < n; ++i) s[i] = 1.0 / std::sqrt(op.mass[i]);
        TriDiag As, Ms;
        As.diag.resize(n);
        As.off.resize(n - 1);
        Ms.diag.assign(n, 1.0);
        Ms.off.assign(n - 1, 0.0);
        for (int i = 0; i < n; ++i) As.diag[i] = A.diag[i] * s[i] * s[i];
        for (int i = 0; i + 1 < n; ++i) As.off[i] = A.off[i] * s[i] * s[i + 1];
        auto eig = smallest_pencil_eigen(As, Ms, 1e-8, 60);
        if (eig.value < 0.0) lambda += 1.25 * (-eig.value);
    }
    if (opt.lambda_override > 0.0) lambda = opt.lambda_override;
    TriDiag Ashift = A;
    for (int i = 0; i < n; ++i) Ashift.diag[i] += lambda * op.mass[i];
    const auto b = op.boundary_lift(bc_lo, bc_hi);
    SolveReport rep;
    rep.lambda_shift = lambda;
    std::vector<double> w = super.values;
    std::vector<double> rhs(n);
    bool ordered = true;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        for (int i = 0; i < n; ++i)
            rhs[i] = op.mass[i] * (lambda * w[i] - detail::signed_power(w[i], q)) + b[i];
        std::vector<double> wn = solve_tridiag(Ashift, rhs);
        double change = 0.0;
        for (int i = 0; i < n; ++i) {
            const double scale = 1.0 + std::abs(w[i]);
            if (wn[i] > w[i] + opt.ordering_tol * scale) {
                ordered = false;
                throw SolverFailure("monotone iteration: ordering violated at node " +
                                    std::to_string(i) + " (iterate rose by " +
                                    std::to_string(wn[i] - w[i]) + ")");
            }
            if (wn[i] < sub[i] - opt.ordering_tol * (1.0 + std::abs(sub[i]))) {
                ordered = false;
                throw SolverFailure("monotone iteration: iterate fell below the "
                                    "subsolution at node " + std::to_string(i));
            }
            change = std::max(change, std::abs(wn[i] - w[i]) / scale);
        }
        w.swap(wn);
        if (change < opt.tol) break;
    }
    rep.iterations = it + 1;
    rep.ordering_certificate = ordered;
    rep.converged = it < opt.max_iterations;
    // residual of the limit under the plain operator
    {
        std::vector<double> F = A.apply(w);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            F[i] += op.mass[i] * detail::signed_power(w[i], q) - b[i];
            const double s = op.mass[i] * (1.0 + std::pow(std::abs(w[i]), q) +
                                           std::abs(op.mu) * op.pot[i] / op.mass[i] *
                                               std::abs(w[i])) + std::abs(b[i]);
            worst = std::max(worst, std::abs(F[i]) / s);
        }
        rep.final_residual = worst;
    }
    rep.solution = GridFunction(grid, std::move(w));
    return rep;
}

// Calibrated trace-carrying kernel surrogate: the alpha_- branch profiles,
// scaled per component so the normalized-trace estimator reports mass
// c * area(component) at each component.
struct CalibratedKernel {
    GridFunction values;
    double total_mass = 0.0;  // c * |boundary|
    std::vector<double> component_scales;
};

inline CalibratedKernel calibrated_kernel(const RadialDomain& dom, double mu, double c,
                                          const GridPtr& grid) {
    const ExponentPair pair = exponents(mu);
    CalibratedKernel out;
    out.values = GridFunction(grid);
    const auto comps = dom.boundary_components();
    if (dom.kind() == RadialDomain::Kind::ball) {
        auto prof = harmonic_profile(dom, mu, Branch::alpha_minus, grid);
        if (!prof.ok) throw SolverFailure("kernel profile integration failed: " + prof.message);
        auto est = normalized_trace(prof.values, pair);
        if (!est.converged || !(est.extrapolated_limit > 0.0))
            throw SolverFailure("kernel calibration trace did not converge");
        const double scale = c * comps[0].area / est.extrapolated_limit;
        out.component_scales = {scale};
        for (int i = 0; i < grid->n; ++i) out.values[i] = scale * prof.values[i];
    } else {
        for (int ci = 0; ci < 2; ++ci) {
            auto prof = harmonic_profile(dom, mu, Branch::alpha_minus, grid, ci);
            if (!prof.ok)
                throw SolverFailure("kernel profile integration failed: " + prof.message);
            auto per = normalized_trace_per_component(prof.values, pair);
            if (!per[ci].converged || !(per[ci].extrapolated_limit > 0.0))
                throw SolverFailure("kernel calibration trace did not converge");
            const double scale = c * comps[ci].area / per[ci].extrapolated_limit;
            out.component_scales.push_back(scale);
            for (int i = 0; i < grid->n; ++i) out.values[i] += scale * prof.values[i];
        }
    }
    out.total_mass = c * dom.boundary_area();
    return out;
}

struct TraceSolveOptions {
    int n = 2048;
    double gamma = 2.0;
    double rho_factor = 0.25;      // working strip = rho_factor * inradius
    int max_levels = 9;
    double loss_threshold = 0.5;   // declare loss below this fraction of the mass
    double level_tol = 5e-3;       // relative stall tolerance between levels
    double fit_tol = 0.02;         // trace-fit residual bound
    NewtonOptions newton;
    SolutionArchive* archive = nullptr;
};

// Moderate solution with prescribed boundary mass by the exhaustion scheme:
// solve on truncations {delta > cut} with the calibrated kernel as data,
// deepen the cut geometrically until the per-level trace estimates contract
// (then extrapolate) or collapse (trace loss), and verify the integral
// identity u + G[u^q] = h_c on the final level.
inline SolveReport solve_with_trace(const NonlinearProblem& prob, TraceSolveOptions opt = {}) {
    const RadialDomain& dom = prob.domain;
    const ExponentPair pair = exponents(prob.mu);
    const double inr = dom.inradius();
    SolveReport rep;
    if (prob.trace_mass == 0.0) {
        auto g0 = make_grid(dom, opt.n, opt.gamma);
        rep.solution = GridFunction(g0);
        rep.converged = true;
        rep.ordering_certificate = true;
        rep.trace_mass_estimate = 0.0;
        rep.notes = "zero boundary mass: the exhaustion limit is the zero solution";
        return rep;
    }
    if (prob.inner_data && dom.kind() != RadialDomain::Kind::ball)
        throw DomainError("prescribed inner-surface data needs a single-component "
                          "strip; use the ball model or a direct strip solve");
    auto gfull = make_grid(dom, opt.n, opt.gamma);
    const auto kern = calibrated_kernel(dom, prob.mu, prob.trace_mass, gfull);
    const double target = kern.total_mass;
    // admissibility of the kernel data (attached as a warning, not an error)
    {
        auto wn = weighted_lq_norm(kern.values, prob.q, pair.alpha_plus);
        rep.admissible = !wn.diverged;
        if (wn.diverged)
            rep.notes += "kernel data fails the weighted-L^q admissibility check; ";
    }
    const double koc = detail::ko_envelope_constant(prob.q);
    const double floor_cut =
        std::max(2e-4 * inr, 8.0 * inr * std::pow(0.5 / opt.n, opt.gamma));
    std::vector<double> levels;
    GridFunction final_u;
    GridPtr final_grid;
    double cut = opt.rho_factor * inr / 8.0;
    TraceEstimate final_est;
    rep.ordering_certificate = true;
    // level-to-level descent holds when the data stays kernel-dominated;
    // a larger prescribed inner value voids that premise
    bool ordering_applicable = true;
    if (prob.inner_data) {
        const double kern_inner =
            detail::interp_r(kern.values, dom.hi() - opt.rho_factor * inr);
        if (*prob.inner_data > kern_inner * (1.0 + 1e-9)) {
            ordering_applicable = false;
            rep.notes += "inner data exceeds the kernel at the inner surface; "
                         "level ordering not asserted; ";
        }
    }
    double prev_cut = 0.0;
    const double rho_bar = opt.rho_factor * inr;
    for (int lev = 0; lev < opt.max_levels; ++lev) {
        GridPtr g;
        double inner_bc = 0.0;
        if (prob.inner_data) {
            // strip run: inner surface at delta = rho_bar carries the data
            g = make_interval_grid(dom, dom.hi() - rho_bar, dom.hi() - cut, opt.n,
                                   opt.gamma, false, true);
            inner_bc = *prob.inner_data;
        } else {
            g = make_truncated_grid(dom, cut, opt.n, opt.gamma);
        }
        DiscreteOperator op(g, prob.mu);
        // kernel data at the truncation surfaces
        const double blo = prob.inner_data
                               ? inner_bc
                               : (g->cluster_lo ? detail::interp_r(kern.values, g->lo) : 0.0);
        const double bhi = detail::interp_r(kern.values, g->hi);
        std::vector<double> u(g->n);
        for (int i = 0; i < g->n; ++i) {
            const double hv = detail::interp_r(kern.values, g->node_r(i));
            const double cap = 4.0 * koc * std::pow(g->node_delta(i), -2.0 / (prob.q - 1.0));
            u[i] = std::min(hv, cap);
            u[i] = std::min(u[i], std::max(blo, bhi) + 1.0);
        }
        const auto b = op.boundary_lift(
            (dom.kind() == RadialDomain::Kind::ball && !prob.inner_data) ? 0.0 : blo, bhi);
        auto nres = detail::newton_nonlinear(op, prob.q, b, u, opt.newton);
        if (!nres.converged)
            throw SolverFailure("exhaustion level at cut " + std::to_string(cut) +
                                " did not converge");
        rep.iterations += nres.iterations;
        rep.final_residual = nres.final_residual;
        GridFunction uf(g, std::move(u));
        // deeper levels descend pointwise on the previously covered region
        // (tolerance absorbs interpolation error between the level grids)
        if (lev > 0 && ordering_applicable) {
            for (int i = 0; i < g->n; ++i) {
                if (g->node_delta(i) <= 2.0 * prev_cut) continue;
                const double prev = detail::interp_r(final_u, g->node_r(i));
                if (uf[i] > prev + 1e-3 * (1.0 + std::abs(prev)))
                    rep.ordering_certificate = false;
            }
        }
        prev_cut = cut;
        TraceOptions topt;
        topt.eps_count = 14;
        topt.first_eps = opt.rho_factor * inr / 2.0;
        // keep the sequence two cuts above the artificial surface
        {
            std::vector<double> es, Ts;
            double eps = topt.first_eps;
            const double eps_min = std::max(2.0 * cut, min_resolvable_eps(*g));
            for (int k = 0; k < topt.eps_count && eps >= eps_min; ++k, eps *= 0.5) {
                const auto S = surface_integral(uf, eps);
                es.push_back(eps);
                Ts.push_back(std::pow(eps, -pair.alpha_minus) * S.total);
            }
            final_est = detail::fit_trace(std::move(es), std::move(Ts), opt.fit_tol);
        }
        levels.push_back(final_est.extrapolated_limit);
        rep.exhaustion_history.push_back({cut, final_est.extrapolated_limit});
        final_u = std::move(uf);
        final_grid = g;
        const int m = int(levels.size());
        if (m >= 3) {
            const double d1 = levels[m - 2] - levels[m - 3];
            const double d2 = levels[m - 1] - levels[m - 2];
            if (std::abs(d2) < opt.level_tol * target ||
                (std::abs(d1) > 1e-13 && d2 / d1 > 0.0 && d2 / d1 < 0.9))
                break;
        }
        if (levels.back() < 0.35 * target) break;
        if (cut * 0.5 < floor_cut) break;
        cut *= 0.5;
    }
    // extrapolate the level sequence when it contracts
    double Lstar = levels.back();
    if (levels.size() >= 3) {
        const int m = int(levels.size());
        const double d1 = levels[m - 2] - levels[m - 3];
        const double d2 = levels[m - 1] - levels[m - 2];
        if (std::abs(d1) > 1e-13 && d2 / d1 > 0.0 && d2 / d1 < 0.9) {
            const double r = d2 / d1;
            Lstar = levels[m - 1] + d2 * r / (1.0 - r);
        }
    }
    {
        DiscreteOperator op(final_grid, prob.mu);
        const double blo = prob.inner_data ? *prob.inner_data : 0.0;
        rep.energy = detail::discrete_energy(op, final_u.values, prob.q, blo,
                                             detail::interp_r(kern.values, final_grid->hi));
    }
    rep.trace = final_est;
    rep.trace_mass_estimate = Lstar;
    rep.trace_loss = Lstar < opt.loss_threshold * target;
    rep.converged = true;
    // integral identity on the final level: u + G[u^q] = h_c
    {
        DiscreteOperator op(final_grid, prob.mu);
        TriDiag A = op.matrix();
        std::vector<double> rhs(final_grid->n);
        for (int i = 0; i < final_grid->n; ++i)
            rhs[i] = op.mass[i] * detail::signed_power(final_u[i], prob.q);
        auto v = solve_tridiag(A, std::move(rhs));
        double dev = 0.0;
        for (int i = 0; i < final_grid->n; ++i) {
            const double hv = detail::interp_r(kern.values, final_grid->node_r(i));
            dev = std::max(dev, std::abs(final_u[i] + v[i] - hv) / std::max(std::abs(hv), 1e-12));
        }
        rep.identity_deviation = dev;
    }
    // stable-window cap diagnostics
    {
        const double anchor = std::max(1e-3 * inr, 32.0 * inr * std::pow(1.0 / opt.n, opt.gamma));
        double sup = 0.0;
        for (int i = 0; i < final_grid->n; ++i) {
            const double d = final_grid->node_delta(i);
            if (d >= anchor)
                sup = std::max(sup, final_u[i] * std::pow(d, 2.0 / (prob.q - 1.0)));
        }
        rep.ko_constant = sup;
    }
    rep.solution = final_u;
    if (opt.archive)
        opt.archive->add("trace-solution c=" + std::to_string(prob.trace_mass), rep.solution);
    return rep;
}

struct MaximalOptions {
    int n = 2048;
    double gamma = 2.0;
    double k_start = 1.0;
    double k_cap = 1e20;
    double core_tol = 1e-8;
    NewtonOptions newton;
    SolutionArchive* archive = nullptr;
};

// Maximal solution by doubling the boundary data until the interior core
// saturates. The reported cap constant is taken over delta >= anchor; the
// nodes adjacent to the artificial data scale like k^{1/q} and are excluded.
inline SolveReport maximal_solution(const RadialDomain& dom, double mu, double q,
                                    MaximalOptions opt = {}) {
    if (!(q > 1.0)) throw DomainError("maximal solution requires q > 1");
    if (!(mu < 0.25)) throw DomainError("maximal solution requires mu < 1/4");
    auto g = make_grid(dom, opt.n, opt.gamma);
    DiscreteOperator op(g, mu);
    const int n = g->n;
    const double inr = dom.inradius();
    const double koc = detail::ko_envelope_constant(q);
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i)
        u[i] = std::min(1.0, 4.0 * koc * std::pow(g->node_delta(i), -2.0 / (q - 1.0)));
    SolveReport rep;
    std::vector<double> core_prev;
    std::vector<int> core_idx;
    for (int i = 0; i < n; ++i)
        if (g->node_delta(i) >= 0.5 * inr) core_idx.push_back(i);
    double k = opt.k_start;
    int stable_rounds = 0;
    while (k <= opt.k_cap) {
        const double blo = g->cluster_lo ? k : 0.0;
        const auto b = op.boundary_lift(blo, k);
        auto nres = detail::newton_nonlinear(op, q, b, u, opt.newton);
        if (!nres.converged)
            throw SolverFailure("maximal solve stalled at boundary level " + std::to_string(k));
        rep.iterations += nres.iterations;
        rep.final_residual = nres.final_residual;
        std::vector<double> core(core_idx.size());
        for (size_t j = 0; j < core_idx.size(); ++j) core[j] = u[core_idx[j]];
        if (!core_prev.empty()) {
            double ch = 0.0;
            for (size_t j = 0; j < core.size(); ++j)
                ch = std::max(ch, std::abs(core[j] - core_prev[j]) / (1.0 + std::abs(core[j])));
            rep.exhaustion_history.push_back({k, ch});
            if (ch < opt.core_tol) {
                if (++stable_rounds >= 2) break;
            } else {
                stable_rounds = 0;
            }
        }
        core_prev = std::move(core);
        k *= 2.0;
    }
    rep.converged = true;
    rep.notes = "boundary data saturated at level " + std::to_string(k);
    const double anchor = std::max(1e-3 * inr, 32.0 * inr * std::pow(1.0 / opt.n, opt.gamma));
    double sup = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = g->node_delta(i);
        if (d >= anchor) sup = std::max(sup, u[i] * std::pow(d, 2.0 / (q - 1.0)));
    }
    rep.ko_constant = sup;
    // boundary-layer constant: profile value at the anchor depth
    {
        GridFunction uf(g, u);
        double best = 1e300;
        int ia = 0;
        for (int i = 0; i < n; ++i)
            if (std::abs(g->node_delta(i) - anchor) < best) {
                best = std::abs(g->node_delta(i) - anchor);
                ia = i;
            }
        rep.layer_constant = u[ia] * std::pow(g->node_delta(ia), 2.0 / (q - 1.0));
        rep.solution = std::move(uf);
    }
    if (opt.archive) opt.archive->add("maximal", rep.solution);
    return rep;
}

struct KellerOssermanCheck {
    double constant = 0.0;        // sup u delta^{2/(q-1)} over the stable window
    bool is_subsolution = false;
    double max_violation = 0.0;   // worst positive scaled residual
};

// Verifies the discrete subsolution property of u and returns the cap
// constant over the stable window. Non-subsolutions are rejected.
inline KellerOssermanCheck keller_osserman_check(const GridFunction& u, double mu, double q,
                                                 double tolerance = 1e-6) {
    const Grid& g = *u.grid;
    DiscreteOperator op(u.grid, mu);
    const int n = g.n;
    KellerOssermanCheck out;
    const int skip = 2;
    for (int i = skip; i < n - skip; ++i) {
        // three-point residual needs no ghost values on interior nodes
        const double flux =
            op.cpl[i] * (u[i] - u[i - 1]) - op.cpl[i + 1] * (u[i + 1] - u[i]);
        const double F = flux - mu * op.pot[i] * u[i] +
                         op.mass[i] * detail::signed_power(u[i], q);
        const double scale = op.mass[i] * (1.0 + std::pow(std::abs(u[i]), q)) +
                             std::abs(mu) * op.pot[i] * std::abs(u[i]) + 1e-300;
        out.max_violation = std::max(out.max_violation, F / scale);
    }
    out.is_subsolution = out.max_violation <= tolerance;
    if (!out.is_subsolution)
        throw DomainError("cap check rejects the input: discrete subsolution residual "
                          "violation " + std::to_string(out.max_violation));
    const double inr = g.domain.inradius();
    const double anchor = std::max(1e-3 * inr, 32.0 * inr * std::pow(1.0 / g.n, g.gamma));
    for (int i = 0; i < n; ++i) {
        const double d = g.node_delta(i);
        if (d >= anchor)
            out.constant = std::max(out.constant, u[i] * std::pow(d, 2.0 / (q - 1.0)));
    }
    return out;
}

// Largest dyadic scale tau with -L_mu(tau phi) + (tau phi)^q <= 0 at all
// windowed interior nodes.
inline double select_dyadic_subsolution_scale(const GridFunction& phi, double mu, double q,
                                              int skip = 4) {
    const Grid& g = *phi.grid;
    DiscreteOperator op(phi.grid, mu);
    const int n = g.n;
    auto is_sub = [&](double tau) {
        for (int i = skip; i < n - skip; ++i) {
            const double ui = tau * phi[i];
            const double flux = op.cpl[i] * (ui - tau * phi[i - 1]) -
                                op.cpl[i + 1] * (tau * phi[i + 1] - ui);
            const double F = flux - mu * op.pot[i] * ui +
                             op.mass[i] * detail::signed_power(ui, q);
            if (F > 0.0) return false;
        }
        return true;
    };
    for (int j = 8; j >= -60; --j) {
        const double tau = std::pow(2.0, j);
        if (is_sub(tau)) return tau;
    }
    return 0.0;
}

enum class RieszProfile { constant_density, dirac };

struct RieszVerdict {
    IntegrabilityVerdict gamma1_condition = IntegrabilityVerdict::inconclusive;
    IntegrabilityVerdict poisson_condition = IntegrabilityVerdict::inconclusive;
    bool sufficient_holds = false;   // first-kernel convolution condition
    bool necessary_holds = false;    // flat-Laplacian boundary-kernel condition
    bool consistent_with_kernel_test = true;
    std::array<double, 3> gamma1_values{};
    std::array<double, 3> poisson_values{};
};

namespace detail {

// product quadrature over the unit half-ball in (rho, zeta = cos phi), both
// directions graded toward their singular ends and refined together
template <class F>
double halfball_quadrature(F&& f, int dim, int n, double grading = 6.0) {
    const double sn2 = (dim >= 3)
                           ? 2.0 * std::pow(M_PI, 0.5 * (dim - 1)) / std::tgamma(0.5 * (dim - 1))
                           : 2.0;
    std::vector<double> zc(n), zw(n), rc(n), rw(n);
    double prev = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double t = (2.0 * i - 1.0) / (2.0 * n);
        const double e = std::pow(double(i) / n, grading);
        zc[i - 1] = std::pow(t, grading);
        zw[i - 1] = e - prev;
        prev = e;
    }
    rc = zc;
    rw = zw;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double rho = rc[i];
        double inner = 0.0;
        for (int j = 0; j < n; ++j) {
            const double zeta = zc[j];
            // dOmega = |S^{N-2}| (1-zeta^2)^{(N-3)/2} dzeta
            const double ang = std::pow(std::max(1.0 - zeta * zeta, 0.0), 0.5 * (dim - 3));
            inner += f(rho, zeta) * ang * zw[j];
        }
        total += inner * std::pow(rho, dim - 1) * rw[i];
    }
    return total * sn2;
}

} // namespace detail

// Quadrature verdicts for the two weighted-norm conditions of the flat-model
// existence criterion, for a constant boundary density or a point mass.
inline RieszVerdict riesz_criterion_check(double mu, int dim, double q,
                                          RieszProfile profile, int n0 = 512) {
    if (!(q > 1.0)) throw DomainError("criterion check requires q > 1");
    const ExponentPair e = exponents(mu);
    const double w = 1.0 + (q - 1.0) * e.alpha_minus;  // weight power on delta
    RieszVerdict out;
    auto run = [&](auto&& f, std::array<double, 3>& vals) {
        for (int k = 0; k < 3; ++k)
            vals[k] = detail::halfball_quadrature(f, dim, n0 << k);
        double ratio;
        return detail::refinement_verdict(vals, ratio);
    };
    if (profile == RieszProfile::constant_density) {
        // first-kernel convolution of a bounded density obeys the log envelope
        out.gamma1_condition = run(
            [&](double rho, double zeta) {
                const double d = rho * zeta;
                return std::pow(1.0 + std::abs(std::log(d)), q) * std::pow(d, w);
            },
            out.gamma1_values);
        out.poisson_condition = run(
            [&](double rho, double zeta) {
                return std::pow(rho * zeta, w);
            },
            out.poisson_values);
    } else {
        out.gamma1_condition = run(
            [&](double rho, double zeta) {
                return std::pow(rho, (1.0 - dim) * q) * std::pow(rho * zeta, w);
            },
            out.gamma1_values);
        out.poisson_condition = run(
            [&](double rho, double zeta) {
                return std::pow(zeta, q) * std::pow(rho, (1.0 - dim) * q) *
                       std::pow(rho * zeta, w);
            },
            out.poisson_values);
    }
    out.sufficient_holds = out.gamma1_condition == IntegrabilityVerdict::finite;
    out.necessary_holds = out.poisson_condition == IntegrabilityVerdict::finite;
    if (profile == RieszProfile::dirac) {
        const auto k = kernel_lq_test(mu, dim, q, 512);
        out.consistent_with_kernel_test =
            (out.sufficient_holds == (k.verdict == IntegrabilityVerdict::finite));
    }
    return out;
}

struct NonuniquenessReport {
    enum class Status { refused, produced, failed };
    Status status = Status::failed;
    std::string message;
    double hardy_bound = 0.0;       // radial upper bound for the Hardy constant
    double mu_used = 0.0;
    double tau = 0.0;               // subsolution scale
    SolveReport solution;           // the nontrivial solution U_0
    double min_ratio_to_ground_state = 0.0;
    double trace_magnitude = 0.0;
    double fine_mesh_residual = 0.0;
    bool certified = false;
};

struct NonuniquenessOptions {
    int n = 1024;
    double gamma = 2.0;
    double margin = 1e-2;   // demand hardy bound < 1/4 - margin
    SolutionArchive* archive = nullptr;
};

namespace detail {

// Maximal solution on the strip along one boundary component: zero data at
// the domain boundary, data k -> infinity at the inner surface.
inline GridFunction strip_maximal(const RadialDomain& dom, int comp, double rho, double mu,
                                  double q, int n, double gamma) {
    auto g = make_strip_grid(dom, comp, rho, n, gamma);
    DiscreteOperator op(g, mu);
    const double koc = ko_envelope_constant(q);
    std::vector<double> u(g->n);
    for (int i = 0; i < g->n; ++i)
        u[i] = std::min(1.0, 4.0 * koc * std::pow(g->node_delta(i), -2.0 / (q - 1.0)));
    std::vector<double> core_prev;
    double k = 1.0;
    int stable = 0;
    while (k <= 1e20) {
        // the parent boundary sits at the clustered end; data k on the other
        const double blo = g->cluster_lo ? 0.0 : k;
        const double bhi = g->cluster_hi ? 0.0 : k;
        const auto b = op.boundary_lift(blo, bhi);
        NewtonOptions no;
        auto nres = newton_nonlinear(op, q, b, u, no);
        if (!nres.converged)
            throw SolverFailure("strip maximal solve stalled at level " + std::to_string(k));
        std::vector<double> core;
        for (int i = 0; i < g->n; ++i)
            if (g->node_delta(i) >= 0.25 * rho && g->node_delta(i) <= 0.5 * rho)
                core.push_back(u[i]);
        if (!core_prev.empty()) {
            double ch = 0.0;
            for (size_t j = 0; j < core.size(); ++j)
                ch = std::max(ch, std::abs(core[j] - core_prev[j]) / (1.0 + std::abs(core[j])));
            if (ch < 1e-8) {
                if (++stable >= 2) break;
            } else {
                stable = 0;
            }
        }
        core_prev = std::move(core);
        k *= 2.0;
    }
    return GridFunction(g, std::move(u));
}

} // namespace detail

// Attempt the zero-trace nontrivial solution above the Hardy constant:
// subsolution tau * phi_H, supersolution glued from the strip maximal
// solutions and an interior lift, monotone iteration in between. On radial
// domains where the radial Hardy bound sits at 1/4 the construction has no
// room and the demo refuses, reporting the computed bound.
inline NonuniquenessReport nonuniqueness_demo(const RadialDomain& dom, double q,
                                              NonuniquenessOptions opt = {}) {
    if (dom.kind() != RadialDomain::Kind::annulus)
        throw DomainError("the non-uniqueness construction runs on annuli");
    NonuniquenessReport rep;
    auto hg = make_grid(dom, opt.n, hardy_grading(opt.n));
    auto H = hardy_constant(dom, hg);
    rep.hardy_bound = H.extrapolated;
    if (H.extrapolated >= 0.25 - opt.margin) {
        rep.status = NonuniquenessReport::Status::refused;
        rep.message =
            "refused: the radial Hardy bound " + std::to_string(H.extrapolated) +
            " is not below 1/4 - " + std::to_string(opt.margin) +
            "; above the Hardy constant the zero-trace problem is in the uniqueness "
            "regime for this model and no gap is available";
        return rep;
    }
    // construction path (requires a genuine spectral gap)
    const double mu = 0.5 * (H.extrapolated + 0.25);
    rep.mu_used = mu;
    auto g = make_grid(dom, opt.n, opt.gamma);
    // resample the ground state onto the working grid
    GridFunction phi(g);
    for (int i = 0; i < g->n; ++i)
        phi[i] = std::max(detail::interp_r(H.eigenfunction, g->node_r(i)), 0.0);
    rep.tau = select_dyadic_subsolution_scale(phi, mu, q);
    if (rep.tau <= 0.0) {
        rep.status = NonuniquenessReport::Status::failed;
        rep.message = "no dyadic subsolution scale verified";
        return rep;
    }
    // supersolution: strip maximal solutions near each component, an interior
    // Dirichlet lift past them, min on the overlap
    const double rho = 0.5 * dom.inradius();
    const double cutR = 0.25 * rho;
    auto sm0 = detail::strip_maximal(dom, 0, rho, mu, q, opt.n, opt.gamma);
    auto sm1 = detail::strip_maximal(dom, 1, rho, mu, q, opt.n, opt.gamma);
    auto strip_value = [&](double r, double d) -> double {
        const auto comps = dom.boundary_components();
        const bool near0 = std::abs(r - comps[0].position) <= std::abs(r - comps[1].position);
        (void)d;
        return near0 ? detail::interp_r(sm0, r) : detail::interp_r(sm1, r);
    };
    auto gi = make_truncated_grid(dom, cutR, opt.n, opt.gamma);
    const double f0 = 2.0 * strip_value(gi->lo, cutR);
    const double f1 = 2.0 * strip_value(gi->hi, cutR);
    auto ur = solve_dirichlet(dom, mu, q, gi, f0, f1);
    GridFunction super(g);
    for (int i = 0; i < g->n; ++i) {
        const double r = g->node_r(i), d = g->node_delta(i);
        if (d <= cutR)
            super[i] = strip_value(r, d);
        else if (d >= rho)
            super[i] = detail::interp_r(ur.solution, r);
        else
            super[i] = std::min(strip_value(r, d), detail::interp_r(ur.solution, r));
    }
    // enforce ordering, halving tau if the interior lift undercuts it anywhere
    GridFunction sub(g);
    for (int halvings = 0; halvings < 40; ++halvings) {
        bool ordered = true;
        for (int i = 0; i < g->n; ++i) {
            sub[i] = rep.tau * phi[i];
            if (sub[i] > super[i]) ordered = false;
        }
        if (ordered) break;
        rep.tau *= 0.5;
    }
    for (int i = 0; i < g->n; ++i) sub[i] = rep.tau * phi[i];
    auto it = monotone_iteration(dom, mu, q, sub, super, 0.0, 0.0);
    rep.solution = it;
    const ExponentPair pair = exponents(mu);
    auto est = normalized_trace(it.solution, pair);
    rep.trace_magnitude = std::abs(est.extrapolated_limit);
    double minratio = 1e300;
    for (int i = 0; i < g->n; ++i)
        if (phi[i] > 0.0) minratio = std::min(minratio, it.solution[i] / phi[i]);
    rep.min_ratio_to_ground_state = minratio;
    // independent residual on a doubled mesh
    {
        auto g2 = make_grid(dom, 2 * opt.n, opt.gamma);
        DiscreteOperator op2(g2, mu);
        std::vector<double> u2(g2->n);
        for (int i = 0; i < g2->n; ++i)
            u2[i] = std::max(detail::interp_r(it.solution, g2->node_r(i)), 0.0);
        const auto b2 = op2.boundary_lift(0.0, 0.0);
        NewtonOptions no;
        auto nr = detail::newton_nonlinear(op2, q, b2, u2, no);
        rep.fine_mesh_residual = nr.final_residual;
    }
    rep.certified = rep.min_ratio_to_ground_state >= 0.5 * rep.tau &&
                    rep.trace_magnitude < 0.02 && rep.fine_mesh_residual < 1e-6;
    rep.status = NonuniquenessReport::Status::produced;
    if (opt.archive) opt.archive->add("nonuniqueness U0", rep.solution.solution);
    return rep;
}

} // namespace hardylab
