#pragma once

#include <cmath>
#include <vector>

#include "hardylab/grid.hpp"
#include "hardylab/tridiag.hpp"

namespace hardylab {

// Conservative finite-volume form of -(Delta_radial + mu/delta^2) on a Grid.
//
// Flux couplings use the harmonic mean of the volume coefficient k = r^{N-1}
// at the two stencil points; k(0) = 0 then removes the coupling to the ball
// center / axis automatically (the natural regularity condition). After
// multiplying rows by the cell volumes m_i the matrix is symmetric.
struct DiscreteOperator {
    GridPtr grid;
    double mu = 0.0;
    std::vector<double> cpl;   // n+1 flux couplings k_e / h_e
    std::vector<double> mass;  // n cell volumes (per angular unit)
    std::vector<double> pot;   // n potential weights m_i / delta_i^2

    DiscreteOperator() = default;
    DiscreteOperator(GridPtr g, double mu_) : grid(std::move(g)), mu(mu_) {
        const Grid& G = *grid;
        const int n = G.n;
        cpl.resize(n + 1);
        for (int j = 0; j <= n; ++j) {
            const double ka = G.domain.coefficient(G.r_point[j]);
            const double kb = G.domain.coefficient(G.r_point[j + 1]);
            const double ke = (ka <= 0.0 || kb <= 0.0) ? 0.0 : 2.0 * ka * kb / (ka + kb);
            cpl[j] = ke / G.spacing[j];
        }
        mass.resize(n);
        pot.resize(n);
        for (int i = 0; i < n; ++i) {
            mass[i] = G.domain.coefficient(G.node_r(i)) * G.width[i];
            const double d = G.node_delta(i);
            pot[i] = mass[i] / (d * d);
        }
    }

    // Volume-weighted matrix A = Stiff - mu * diag(pot): A u = m .* (-L_mu u).
    TriDiag matrix() const {
        const int n = grid->n;
        TriDiag A;
        A.diag.resize(n);
        A.off.resize(n - 1);
        for (int i = 0; i < n; ++i)
            A.diag[i] = cpl[i] + cpl[i + 1] - mu * pot[i];
        for (int i = 0; i + 1 < n; ++i)
            A.off[i] = -cpl[i + 1];
        return A;
    }

    // Right-hand-side lifting of Dirichlet ghost values at the interval ends.
    std::vector<double> boundary_lift(double g_lo, double g_hi) const {
        std::vector<double> b(grid->n, 0.0);
        b.front() += cpl.front() * g_lo;
        b.back() += cpl.back() * g_hi;
        return b;
    }
};

// Residual of the operator applied nodewise: returns -L_mu u (per unit volume),
// using the supplied Dirichlet ghost values at the interval ends.
inline GridFunction apply_Lmu(const DiscreteOperator& op, const GridFunction& u,
                              double bc_lo = 0.0, double bc_hi = 0.0) {
    const int n = op.grid->n;
    if (u.size() != n) throw DomainError("grid function does not match operator grid");
    GridFunction out(op.grid);
    const TriDiag A = op.matrix();
    const auto lift = op.boundary_lift(bc_lo, bc_hi);
    const auto Au = A.apply(u.values);
    for (int i = 0; i < n; ++i)
        out.values[i] = (Au[i] - lift[i]) / op.mass[i];
    return out;
}

} // namespace hardylab
