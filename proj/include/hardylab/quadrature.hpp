#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "hardylab/grid.hpp"

namespace hardylab {

namespace detail {

// Linear interpolation of nodal values at distance eps from a covered
// boundary component (delta decreases toward the component).
inline double interp_at_delta(const GridFunction& u, const Grid::CoveredComponent& cc,
                              double eps) {
    const Grid& g = *u.grid;
    const int n = g.n;
    auto off = [&](int i) { return cc.at_hi_end ? g.node_off_hi(i) : g.node_off_lo(i); };
    // offsets decrease toward the component end; locate bracketing nodes
    if (cc.at_hi_end) {
        // off_hi decreases with i
        int loidx = 0, hiidx = n - 1;
        if (eps >= off(0) || eps <= off(n - 1)) throw DomainError("surface outside grid range");
        while (hiidx - loidx > 1) {
            const int mid = (loidx + hiidx) / 2;
            (off(mid) > eps ? loidx : hiidx) = mid;
        }
        const double o1 = off(loidx), o2 = off(hiidx);
        const double t = (o1 - eps) / (o1 - o2);
        return (1.0 - t) * u[loidx] + t * u[hiidx];
    }
    int loidx = 0, hiidx = n - 1;
    if (eps <= off(0) || eps >= off(n - 1)) throw DomainError("surface outside grid range");
    while (hiidx - loidx > 1) {
        const int mid = (loidx + hiidx) / 2;
        (off(mid) < eps ? loidx : hiidx) = mid;
    }
    const double o1 = off(loidx), o2 = off(hiidx);
    const double t = (eps - o1) / (o2 - o1);
    return (1.0 - t) * u[loidx] + t * u[hiidx];
}

inline std::pair<double, double> fit_line(const std::vector<double>& x,
                                          const std::vector<double>& y) {
    const int m = int(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < m; ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    const double det = m * sxx - sx * sx;
    const double slope = (m * sxy - sx * sy) / det;
    const double icpt = (sy - slope * sx) / m;
    return {slope, icpt};
}

} // namespace detail

struct SurfaceIntegral {
    double total = 0.0;
    std::vector<double> per_component;  // aligned with grid->covered_components()
};

// Integral of u over the level surface {delta = eps}, by radial reduction:
// each boundary component of the parent domain contributes area(r*) * u(r*)
// with u linearly interpolated at the surface radius r*. Components whose
// boundary the grid reaches use exact-offset interpolation (surfaces at tiny
// eps); on truncated grids the surfaces are interior and plain coordinates
// suffice.
inline SurfaceIntegral surface_integral(const GridFunction& u, double eps) {
    const Grid& g = *u.grid;
    const auto covered = g.covered_components();
    SurfaceIntegral out;
    for (const auto& comp : g.domain.boundary_components()) {
        if (!(eps > 0.0) || eps >= g.max_delta())
            throw DomainError("surface parameter outside the strip");
        const Grid::CoveredComponent* cc = nullptr;
        const double postol = 1e-12 * (g.hi - g.lo);
        for (const auto& c : covered)
            if (std::abs(c.comp.position - comp.position) <= postol) cc = &c;
        double uval = 0.0;
        if (cc) {
            if (eps < 2.0 * cc->boundary_cell_width)
                throw DomainError("surface parameter below the resolvable range "
                                  "(need eps >= twice the boundary cell width)");
            uval = detail::interp_at_delta(u, *cc, eps);
        } else {
            // interior surface of a truncated grid: locate by coordinate
            const double rstar = comp.position + comp.orientation * eps;
            int loidx = 0, hiidx = g.n - 1;
            if (rstar <= g.node_r(1) || rstar >= g.node_r(g.n - 2))
                throw DomainError("surface parameter outside the resolvable range "
                                  "of the truncated grid");
            while (hiidx - loidx > 1) {
                const int mid = (loidx + hiidx) / 2;
                (g.node_r(mid) < rstar ? loidx : hiidx) = mid;
            }
            const double t = (rstar - g.node_r(loidx)) / (g.node_r(hiidx) - g.node_r(loidx));
            uval = (1.0 - t) * u[loidx] + t * u[hiidx];
        }
        const double rstar = comp.position + comp.orientation * eps;
        const double area = g.domain.is_slab()
                                ? 1.0
                                : unit_sphere_area(g.domain.dim()) *
                                      std::pow(rstar, g.domain.dim() - 1);
        out.per_component.push_back(area * uval);
        out.total += area * uval;
    }
    return out;
}

// Smallest eps the grid can resolve for surface sampling (over all parent
// boundary components, covered or not).
inline double min_resolvable_eps(const Grid& g) {
    const auto covered = g.covered_components();
    const double postol = 1e-12 * (g.hi - g.lo);
    double m = 0.0;
    for (const auto& comp : g.domain.boundary_components()) {
        const Grid::CoveredComponent* cc = nullptr;
        for (const auto& c : covered)
            if (std::abs(c.comp.position - comp.position) <= postol) cc = &c;
        if (cc) {
            m = std::max(m, 2.0 * cc->boundary_cell_width);
        } else {
            // truncated side: surfaces must stay two nodes inside the interval
            const bool at_hi = comp.position >= g.hi;
            const double d3 = at_hi ? g.node_delta(g.n - 3) : g.node_delta(2);
            m = std::max(m, d3 * (1.0 + 1e-9));
        }
    }
    return m;
}

struct WeightedNorm {
    double value = 0.0;             // integral of |u|^q delta^w dV
    double refinement_error = 0.0;  // |fine - coarsened| midpoint-rule estimate
    bool diverged = false;          // boundary tail incompatible with integrability
    double tail_exponent = 0.0;     // fitted effective power of the integrand density
};

// Weighted Lebesgue norm integral(|u|^q delta^w dx) by the midpoint rule with
// the radial volume factor. Divergence shows up as a boundary tail whose
// fitted power s_eff = d log(|u|^q delta^w) / d log delta is <= -1; that is
// reported, never thrown.
inline WeightedNorm weighted_lq_norm(const GridFunction& u, double q, double weight_exp) {
    if (!(q >= 1.0)) throw DomainError("weighted norm requires q >= 1");
    const Grid& g = *u.grid;
    const int n = g.n;
    const double ang = g.domain.angular_factor();
    WeightedNorm out;
    std::vector<double> cellint(n);
    for (int i = 0; i < n; ++i) {
        const double dens = std::pow(std::abs(u[i]), q) * std::pow(g.node_delta(i), weight_exp);
        cellint[i] = dens * g.domain.coefficient(g.node_r(i)) * g.width[i];
        out.value += ang * cellint[i];
    }
    // coarsened midpoint rule: pair adjacent cells, value at the shared edge
    double coarse = 0.0;
    for (int i = 0; i + 1 < n; i += 2) {
        const double um = 0.5 * (u[i] + u[i + 1]);
        const double dm = 0.5 * (g.node_delta(i) + g.node_delta(i + 1));
        const double rm = 0.5 * (g.node_r(i) + g.node_r(i + 1));
        coarse += ang * std::pow(std::abs(um), q) * std::pow(dm, weight_exp) *
                  g.domain.coefficient(rm) * (g.width[i] + g.width[i + 1]);
    }
    if (n % 2 == 1) coarse += ang * cellint[n - 1];
    out.refinement_error = std::abs(out.value - coarse);

    // boundary-tail slope per covered component over the innermost resolved cells
    const double tiny = 1e-300;
    for (const auto& cc : g.covered_components()) {
        std::vector<double> lx, ly;
        for (int k = 1; k <= 24 && k < n / 2; ++k) {
            const int i = cc.at_hi_end ? n - k : k - 1;
            const double dens = std::pow(std::abs(u[i]) + tiny, q) *
                                std::pow(g.node_delta(i), weight_exp);
            if (!(dens > 0.0) || !std::isfinite(dens)) continue;
            lx.push_back(std::log(g.node_delta(i)));
            ly.push_back(std::log(dens));
        }
        if (lx.size() >= 6) {
            const double slope = detail::fit_line(lx, ly).first;
            out.tail_exponent = slope;
            if (slope <= -1.0 + 0.02) out.diverged = true;
        }
    }
    return out;
}

} // namespace hardylab
