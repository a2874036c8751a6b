#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <vector>

#include "hardylab/domain.hpp"
#include "hardylab/errors.hpp"

namespace hardylab {

// Cell-centered graded grid on a radial interval [lo, hi] of a RadialDomain.
//
// Positions near a clustered end are carried as exact offsets from that end:
// with grading powers up to ~50 the offsets reach 1e-150 and would be absorbed
// entirely if stored as absolute coordinates. All spacings and distance values
// are derived from same-end offset differences; the absolute coordinate r is
// kept only for the smooth volume factor r^{N-1}.
//
// Point layout: index 0 = lo end, 1..n = cell centers, n+1 = hi end.
class Grid {
public:
    RadialDomain domain;
    double lo = 0.0, hi = 0.0;
    int n = 0;
    double gamma = 1.0;
    bool cluster_lo = false, cluster_hi = false;
    bool dirichlet_lo = true, dirichlet_hi = true; // where solvers may impose data

    std::vector<double> off_lo;   // n+2 point offsets from lo
    std::vector<double> off_hi;   // n+2 point offsets from hi
    std::vector<double> r_point;  // n+2 absolute coordinates
    std::vector<double> delta_pt; // n+2 dist to the parent boundary
    std::vector<double> spacing;  // n+1 gaps between consecutive points
    std::vector<double> width;    // n cell widths

    Grid(const RadialDomain& dom, double lo_, double hi_, int n_, double gamma_,
         bool clo, bool chi)
        : domain(dom), lo(lo_), hi(hi_), n(n_), gamma(gamma_),
          cluster_lo(clo), cluster_hi(chi) {
        if (n < 16) throw DomainError("grid requires n >= 16");
        if (!(gamma >= 1.0)) throw DomainError("grading power must be >= 1");
        if (!(lo < hi)) throw DomainError("grid interval is empty");
        build();
    }

    double node_r(int i) const { return r_point[i + 1]; }
    double node_delta(int i) const { return delta_pt[i + 1]; }
    double node_off_lo(int i) const { return off_lo[i + 1]; }
    double node_off_hi(int i) const { return off_hi[i + 1]; }

    // Width of the cell adjacent to an end (resolvability scale for traces).
    double boundary_cell_width_lo() const { return width.front(); }
    double boundary_cell_width_hi() const { return width.back(); }

    double min_delta() const {
        double m = delta_pt[1];
        for (int i = 1; i <= n; ++i) m = std::min(m, delta_pt[i]);
        return m;
    }
    // Largest delta over the covered interval.
    double max_delta() const {
        double m = 0.0;
        for (int i = 1; i <= n; ++i) m = std::max(m, delta_pt[i]);
        return m;
    }

    // Boundary components of the parent domain that touch an end of this grid.
    struct CoveredComponent {
        BoundaryComponent comp;
        bool at_hi_end;                 // component adjoins the hi end of the interval
        double boundary_cell_width;     // width of the nearest cell
    };
    std::vector<CoveredComponent> covered_components() const {
        std::vector<CoveredComponent> out;
        const double tol = 1e-12 * (hi - lo);
        for (const auto& c : domain.boundary_components()) {
            if (std::abs(c.position - lo) <= tol)
                out.push_back({c, false, boundary_cell_width_lo()});
            else if (std::abs(c.position - hi) <= tol)
                out.push_back({c, true, boundary_cell_width_hi()});
        }
        return out;
    }

private:
    // offsets of the grading map from both ends, in [0,1]
    void map_offsets(double t, double tcomp, double& olo, double& ohi) const {
        if (cluster_lo && cluster_hi) {
            const double a = std::pow(t, gamma), b = std::pow(tcomp, gamma);
            olo = a / (a + b);
            ohi = b / (a + b);
        } else if (cluster_hi) {
            ohi = std::pow(tcomp, gamma);
            olo = 1.0 - ohi;
        } else if (cluster_lo) {
            olo = std::pow(t, gamma);
            ohi = 1.0 - olo;
        } else {
            olo = t;
            ohi = tcomp;
        }
    }

    double gap(double olo_a, double ohi_a, double olo_b, double ohi_b) const {
        // b is the point at larger r; use the end where both offsets are smaller
        if (olo_b <= ohi_b && olo_a <= ohi_a) return olo_b - olo_a;
        return ohi_a - ohi_b;
    }

    void build() {
        const double L = hi - lo;
        off_lo.assign(n + 2, 0.0);
        off_hi.assign(n + 2, 0.0);
        off_lo[0] = 0.0;        off_hi[0] = L;
        off_lo[n + 1] = L;      off_hi[n + 1] = 0.0;
        for (int i = 1; i <= n; ++i) {
            const double t = double(2 * i - 1) / (2 * n);
            const double tc = double(2 * (n - i) + 1) / (2 * n);
            double olo, ohi;
            map_offsets(t, tc, olo, ohi);
            off_lo[i] = L * olo;
            off_hi[i] = L * ohi;
        }
        r_point.assign(n + 2, 0.0);
        delta_pt.assign(n + 2, 0.0);
        const auto comps = domain.boundary_components();
        for (int j = 0; j < n + 2; ++j) {
            r_point[j] = (off_lo[j] <= off_hi[j]) ? lo + off_lo[j] : hi - off_hi[j];
            double d = std::numeric_limits<double>::infinity();
            for (const auto& c : comps) {
                if (c.position <= lo)
                    d = std::min(d, off_lo[j] + (lo - c.position));
                else
                    d = std::min(d, off_hi[j] + (c.position - hi));
            }
            delta_pt[j] = d;
        }
        spacing.assign(n + 1, 0.0);
        for (int j = 0; j <= n; ++j)
            spacing[j] = gap(off_lo[j], off_hi[j], off_lo[j + 1], off_hi[j + 1]);
        // cell widths from the edge map
        width.assign(n, 0.0);
        double prev_olo = 0.0, prev_ohi = 1.0;
        for (int j = 1; j <= n; ++j) {
            const double t = double(j) / n;
            const double tc = double(n - j) / n;
            double olo, ohi;
            map_offsets(t, tc, olo, ohi);
            width[j - 1] = L * gap(prev_olo, prev_ohi, olo, ohi);
            prev_olo = olo;
            prev_ohi = ohi;
        }
    }
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_interval_grid(const RadialDomain& dom, double lo, double hi,
                                  int n, double gamma, bool clo, bool chi) {
    return std::make_shared<const Grid>(dom, lo, hi, n, gamma, clo, chi);
}

// Full-domain grid, clustered toward every boundary component.
inline GridPtr make_grid(const RadialDomain& dom, int n, double gamma) {
    switch (dom.kind()) {
        case RadialDomain::Kind::ball:
            return make_interval_grid(dom, 0.0, dom.hi(), n, gamma, false, true);
        case RadialDomain::Kind::annulus:
            return make_interval_grid(dom, dom.lo(), dom.hi(), n, gamma, true, true);
        case RadialDomain::Kind::slab:
            return make_interval_grid(dom, 0.0, dom.hi(), n, gamma, true, true);
    }
    throw DomainError("unknown domain kind");
}

// Grid on the strip of width rho along one boundary component.
inline GridPtr make_strip_grid(const RadialDomain& dom, int component, double rho,
                               int n, double gamma) {
    auto comps = dom.boundary_components();
    if (component < 0 || component >= int(comps.size()))
        throw DomainError("no such boundary component");
    if (!(rho > 0.0 && rho < dom.inradius()))
        throw DomainError("strip width must lie in (0, inradius)");
    const auto& c = comps[component];
    if (c.orientation > 0)   // domain at larger r: strip [P, P+rho], boundary at lo
        return make_interval_grid(dom, c.position, c.position + rho, n, gamma, true, false);
    return make_interval_grid(dom, c.position - rho, c.position, n, gamma, false, true);
}

// Grid on the truncation {delta > cut} (cut = 0 gives the full grid).
inline GridPtr make_truncated_grid(const RadialDomain& dom, double cut, int n, double gamma) {
    if (cut < 0.0 || cut >= dom.inradius())
        throw DomainError("truncation depth must lie in [0, inradius)");
    switch (dom.kind()) {
        case RadialDomain::Kind::ball:
            return make_interval_grid(dom, 0.0, dom.hi() - cut, n, gamma, false, true);
        case RadialDomain::Kind::annulus:
            return make_interval_grid(dom, dom.lo() + cut, dom.hi() - cut, n, gamma, true, true);
        case RadialDomain::Kind::slab:
            return make_interval_grid(dom, cut, dom.hi() - cut, n, gamma, true, true);
    }
    throw DomainError("unknown domain kind");
}

// Nodal values on a grid; immutable grid, value semantics for the data.
struct GridFunction {
    GridPtr grid;
    std::vector<double> values;

    GridFunction() = default;
    explicit GridFunction(GridPtr g) : grid(std::move(g)), values(grid->n, 0.0) {}
    GridFunction(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        if (int(values.size()) != grid->n)
            throw DomainError("value count does not match grid");
    }

    int size() const { return grid ? grid->n : 0; }
    double operator[](int i) const { return values[i]; }
    double& operator[](int i) { return values[i]; }

    template <class F>
    static GridFunction sample(GridPtr g, F&& f) {
        GridFunction u(g);
        for (int i = 0; i < g->n; ++i) u.values[i] = f(g->node_r(i), g->node_delta(i));
        return u;
    }
};

inline void write_csv(std::ostream& os, const GridFunction& u) {
    os << "r,delta,value\n";
    char buf[96];
    for (int i = 0; i < u.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n",
                      u.grid->node_r(i), u.grid->node_delta(i), u.values[i]);
        os << buf;
    }
}

} // namespace hardylab
