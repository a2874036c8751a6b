#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "hardylab/exponents.hpp"
#include "hardylab/grid.hpp"
#include "hardylab/quadrature.hpp"
#include "hardylab/trace.hpp"

using namespace hardylab;

TEST_CASE("distance function on the three domain kinds") {
    CHECK(RadialDomain::ball(1.0, 3).delta(0.75) == Catch::Approx(0.25));
    CHECK(RadialDomain::annulus(0.5, 1.0, 3).delta(0.6) == Catch::Approx(0.1));
    CHECK(RadialDomain::slab(1.0, 2).delta(0.5) == Catch::Approx(0.5));
    CHECK_THROWS_AS(RadialDomain::ball(1.0, 3).delta(1.5), DomainError);
    CHECK_THROWS_AS(RadialDomain::annulus(0.5, 1.0, 3).delta(0.2), DomainError);
    CHECK_THROWS_AS(RadialDomain::ball(1.0, 1), DomainError);
}

TEST_CASE("uniform grid has the expected cell centers") {
    auto g = make_grid(RadialDomain::ball(1.0, 3), 16, 1.0);
    for (int i = 0; i < 16; ++i)
        CHECK(g->node_r(i) == Catch::Approx((2.0 * i + 1.0) / 32.0).margin(1e-15));
}

TEST_CASE("graded ball grid reaches the grading-map depth") {
    // first cell center from the boundary under t -> 1-(1-t)^gamma
    auto g = make_grid(RadialDomain::ball(1.0, 3), 1024, 2.0);
    CHECK(g->min_delta() == Catch::Approx(std::pow(1.0 / 2048.0, 2.0)).epsilon(1e-12));
    // deep grading: offsets must stay exact where absolute positions absorb
    auto gs = make_strip_grid(RadialDomain::annulus(0.5, 1.0, 3), 0, 0.1, 64, 20.0);
    CHECK(gs->min_delta() > 0.0);
    CHECK(gs->min_delta() == Catch::Approx(0.1 * std::pow(1.0 / 128.0, 20.0)).epsilon(1e-12));
    for (int j = 0; j <= gs->n; ++j) CHECK(gs->spacing[j] > 0.0);
}

TEST_CASE("annulus grid clusters symmetrically at both ends") {
    auto g = make_grid(RadialDomain::annulus(0.5, 1.0, 3), 64, 2.0);
    for (int i = 0; i < 64; ++i) {
        CHECK(g->node_off_lo(i) == Catch::Approx(g->node_off_hi(63 - i)).epsilon(1e-13));
        CHECK(g->node_delta(i) > 0.0);
    }
}

TEST_CASE("surface integral of known fields") {
    auto dom = RadialDomain::ball(1.0, 3);
    auto g = make_grid(dom, 512, 2.0);
    auto one = GridFunction::sample(g, [](double, double) { return 1.0; });
    // area of the sphere at distance 0.1: 4 pi 0.9^2
    CHECK(surface_integral(one, 0.1).total ==
          Catch::Approx(4.0 * M_PI * 0.81).epsilon(1e-6));

    auto dom2 = RadialDomain::ball(1.0, 2);
    auto g2 = make_grid(dom2, 512, 2.0);
    auto del = GridFunction::sample(g2, [](double, double d) { return d; });
    CHECK(surface_integral(del, 0.25).total ==
          Catch::Approx(2.0 * M_PI * 0.75 * 0.25).epsilon(1e-6));

    CHECK_THROWS_AS(surface_integral(one, 1e-9), DomainError);

    // annulus: two components, reported separately and summed
    auto ga = make_grid(RadialDomain::annulus(0.5, 1.0, 3), 512, 2.0);
    auto onea = GridFunction::sample(ga, [](double, double) { return 1.0; });
    auto S = surface_integral(onea, 0.1);
    REQUIRE(S.per_component.size() == 2);
    CHECK(S.per_component[0] == Catch::Approx(4.0 * M_PI * 0.36).epsilon(1e-6));
    CHECK(S.per_component[1] == Catch::Approx(4.0 * M_PI * 0.81).epsilon(1e-6));
    CHECK(S.total == Catch::Approx(S.per_component[0] + S.per_component[1]));
}

TEST_CASE("surface integral of delta^alpha+ shows the expected small-eps power") {
    const auto pair = exponents(3.0 / 16.0);
    auto g = make_grid(RadialDomain::ball(1.0, 3), 2048, 2.0);
    auto u = GridFunction::sample(
        g, [&](double, double d) { return std::pow(d, pair.alpha_plus); });
    // log-log fit of I(eps)/(1-eps)^2 against eps recovers alpha_+ = 3/4
    double xs[3] = {0.2, 0.1, 0.05};
    std::vector<double> lx, ly;
    for (double eps : xs) {
        const double I = surface_integral(u, eps).total;
        CHECK(I == Catch::Approx(4.0 * M_PI * std::pow(1 - eps, 2.0) *
                                 std::pow(eps, 0.75)).epsilon(1e-5));
        lx.push_back(std::log(eps));
        ly.push_back(std::log(I / std::pow(1 - eps, 2.0)));
    }
    const double slope = (ly[0] - ly[2]) / (lx[0] - lx[2]);
    CHECK(slope == Catch::Approx(0.75).margin(1e-4));
}

TEST_CASE("weighted Lq norms: closed forms and divergence flag") {
    auto dom = RadialDomain::ball(1.0, 3);
    auto g = make_grid(dom, 2048, 2.0);
    auto one = GridFunction::sample(g, [](double, double) { return 1.0; });
    auto w0 = weighted_lq_norm(one, 1.0, 0.0);
    CHECK(w0.value == Catch::Approx(4.0 * M_PI / 3.0).epsilon(1e-5));
    CHECK_FALSE(w0.diverged);

    auto dinv = GridFunction::sample(g, [](double, double d) { return 1.0 / d; });
    CHECK(weighted_lq_norm(dinv, 1.0, 0.0).diverged);

    // Beta-integral anchor: int_0^1 (1-r)^3 4 pi r^2 dr = pi/15 for
    // u = delta^{alpha_+}, q = 2, weight alpha_+, at mu = 0 (alpha_+ = 1)
    auto lin = GridFunction::sample(g, [](double, double d) { return d; });
    auto w2 = weighted_lq_norm(lin, 2.0, 1.0);
    CHECK(w2.value == Catch::Approx(M_PI / 15.0).epsilon(1e-5));
    CHECK_FALSE(w2.diverged);
    CHECK(w2.refinement_error < 1e-4 * w2.value + 1e-12);

    CHECK_THROWS_AS(weighted_lq_norm(one, 0.5, 0.0), DomainError);
}

TEST_CASE("normalized trace of the decaying branch vanishes") {
    for (double mu : {-2.0, 0.0, 3.0 / 16.0}) {
        const auto pair = exponents(mu);
        auto g = make_grid(RadialDomain::ball(1.0, 3), 1024, 2.0);
        auto u = GridFunction::sample(
            g, [&](double, double d) { return std::pow(d, pair.alpha_plus); });
        auto est = normalized_trace(u, pair);
        CHECK(est.converged);
        CHECK(std::abs(est.extrapolated_limit) < 5e-3 * est.values.front() + 1e-12);
        CHECK(est.fitted_rate ==
              Catch::Approx(pair.alpha_plus - pair.alpha_minus).margin(0.15));
    }
}

TEST_CASE("trace estimate is linear in the field") {
    const auto pair = exponents(0.1);
    auto g = make_grid(RadialDomain::ball(1.0, 3), 1024, 2.0);
    auto u = GridFunction::sample(
        g, [&](double, double d) { return std::pow(d, pair.alpha_minus) * (1.0 + d); });
    auto u3 = u;
    for (auto& v : u3.values) v *= 3.0;
    auto e1 = normalized_trace(u, pair);
    auto e3 = normalized_trace(u3, pair);
    REQUIRE(e1.converged);
    REQUIRE(e3.converged);
    CHECK(e3.extrapolated_limit ==
          Catch::Approx(3.0 * e1.extrapolated_limit).epsilon(1e-9));
}

TEST_CASE("csv dump carries r, delta, value columns") {
    auto g = make_grid(RadialDomain::ball(1.0, 3), 16, 1.0);
    auto u = GridFunction::sample(g, [](double r, double) { return r * r; });
    std::ostringstream os;
    write_csv(os, u);
    const std::string s = os.str();
    CHECK(s.rfind("r,delta,value\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 17);
}

TEST_CASE("grid construction rejects undersized or ungraded input") {
    CHECK_THROWS_AS(make_grid(RadialDomain::ball(1.0, 3), 8, 2.0), DomainError);
    CHECK_THROWS_AS(make_grid(RadialDomain::ball(1.0, 3), 64, 0.5), DomainError);
    CHECK_THROWS_AS(make_strip_grid(RadialDomain::ball(1.0, 3), 0, 2.0, 64, 2.0),
                    DomainError);
    CHECK_THROWS_AS(make_strip_grid(RadialDomain::ball(1.0, 3), 3, 0.1, 64, 2.0),
                    DomainError);
}
