#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hardylab/errors.hpp"

namespace hardylab {

inline double unit_sphere_area(int dim) {
    // |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2)
    return 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim);
}

// One connected piece of the boundary, seen in the radial coordinate.
struct BoundaryComponent {
    double position;   // radial coordinate of the boundary sphere / plane
    int orientation;   // +1: domain lies at larger r (delta = r - position), -1: smaller r
    double area;       // |S^{N-1}| position^{N-1}, or 1 per unit section for slabs
};

// Radial model domains: ball, spherical annulus, or a slab 0 < z < H
// (flat model, per unit cross-section). The radial coordinate is |x| for
// ball/annulus and the height z for the slab.
class RadialDomain {
public:
    enum class Kind { ball, annulus, slab };

    static RadialDomain ball(double radius, int dim) {
        if (!(radius > 0.0)) throw DomainError("ball radius must be positive");
        check_dim(dim);
        return RadialDomain(Kind::ball, 0.0, radius, dim);
    }
    static RadialDomain annulus(double inner, double outer, int dim) {
        if (!(0.0 < inner && inner < outer))
            throw DomainError("annulus requires 0 < inner < outer");
        check_dim(dim);
        return RadialDomain(Kind::annulus, inner, outer, dim);
    }
    static RadialDomain slab(double height, int dim) {
        if (!(height > 0.0)) throw DomainError("slab height must be positive");
        check_dim(dim);
        return RadialDomain(Kind::slab, 0.0, height, dim);
    }

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    bool is_slab() const { return kind_ == Kind::slab; }

    // dist(x, boundary) at radial coordinate r; rejects points outside the closure.
    double delta(double r) const {
        if (r < lo_ - tol() || r > hi_ + tol())
            throw DomainError("radial coordinate outside the domain closure");
        switch (kind_) {
            case Kind::ball:    return hi_ - r;
            case Kind::annulus: return std::min(r - lo_, hi_ - r);
            case Kind::slab:    return std::min(r, hi_ - r);
        }
        return 0.0;
    }

    // Largest delta value attained in the domain.
    double inradius() const {
        switch (kind_) {
            case Kind::ball:    return hi_;
            case Kind::annulus: return 0.5 * (hi_ - lo_);
            case Kind::slab:    return 0.5 * hi_;
        }
        return 0.0;
    }

    // Volume density in the radial coordinate (without the angular factor).
    double coefficient(double r) const {
        return is_slab() ? 1.0 : std::pow(r, dim_ - 1);
    }
    // Total angular factor for volume/surface integrals.
    double angular_factor() const {
        return is_slab() ? 1.0 : unit_sphere_area(dim_);
    }

    std::vector<BoundaryComponent> boundary_components() const {
        std::vector<BoundaryComponent> c;
        switch (kind_) {
            case Kind::ball:
                c.push_back({hi_, -1, unit_sphere_area(dim_) * std::pow(hi_, dim_ - 1)});
                break;
            case Kind::annulus:
                c.push_back({lo_, +1, unit_sphere_area(dim_) * std::pow(lo_, dim_ - 1)});
                c.push_back({hi_, -1, unit_sphere_area(dim_) * std::pow(hi_, dim_ - 1)});
                break;
            case Kind::slab:
                c.push_back({0.0, +1, 1.0});
                c.push_back({hi_, -1, 1.0});
                break;
        }
        return c;
    }

    double boundary_area() const {
        double a = 0.0;
        for (const auto& c : boundary_components()) a += c.area;
        return a;
    }

    std::string describe() const {
        switch (kind_) {
            case Kind::ball:    return "ball(R=" + fmt(hi_) + ",N=" + std::to_string(dim_) + ")";
            case Kind::annulus: return "annulus(" + fmt(lo_) + "," + fmt(hi_) + ",N=" + std::to_string(dim_) + ")";
            case Kind::slab:    return "slab(H=" + fmt(hi_) + ",N=" + std::to_string(dim_) + ")";
        }
        return "?";
    }

    bool operator==(const RadialDomain& o) const {
        return kind_ == o.kind_ && dim_ == o.dim_ && lo_ == o.lo_ && hi_ == o.hi_;
    }

private:
    RadialDomain(Kind k, double lo, double hi, int dim)
        : kind_(k), lo_(lo), hi_(hi), dim_(dim) {}
    static void check_dim(int dim) {
        if (dim < 2) throw DomainError("dimension must be an integer >= 2");
    }
    double tol() const { return 1e-12 * (hi_ - lo_); }
    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", v);
        return buf;
    }

    Kind kind_;
    double lo_, hi_;
    int dim_;
};

} // namespace hardylab
