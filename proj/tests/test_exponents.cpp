#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hardylab/exponents.hpp"

using namespace hardylab;

namespace {
double ulp_of(double x) {
    const double ax = std::abs(x);
    return std::nextafter(ax, 1e308) - ax;
}
} // namespace

TEST_CASE("exponent pairs at closed-form points") {
    auto e0 = exponents(0.0);
    CHECK(e0.alpha_plus == 1.0);
    CHECK(e0.alpha_minus == 0.0);

    auto e1 = exponents(3.0 / 16.0);
    CHECK(e1.alpha_plus == 0.75);
    CHECK(e1.alpha_minus == 0.25);

    auto e2 = exponents(-2.0);
    CHECK(e2.alpha_plus == 2.0);
    CHECK(e2.alpha_minus == -1.0);
}

TEST_CASE("exponents reject mu >= 1/4") {
    CHECK_THROWS_AS(exponents(0.25), DomainError);
    CHECK_THROWS_AS(exponents(0.3), DomainError);
    CHECK_THROWS_MATCHES(exponents(1.0), DomainError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("mu < 1/4")));
}

TEST_CASE("exponent algebra holds to 4 ulp over random mu") {
    std::mt19937_64 rng(20240817u);
    std::uniform_real_distribution<double> dist(-10.0, 0.25);
    for (int k = 0; k < 10000; ++k) {
        const double mu = dist(rng);
        if (!(mu < 0.25)) continue;
        const auto e = exponents(mu);
        CHECK(std::abs(e.alpha_plus + e.alpha_minus - 1.0) <= 4.0 * ulp_of(1.0));
        const double prod = e.alpha_plus * e.alpha_minus;
        CHECK(std::abs(prod - mu) <= 4.0 * std::max(ulp_of(mu), ulp_of(prod)));
        CHECK(e.alpha_plus >= 0.5);
        CHECK(e.alpha_minus < 0.5);
        CHECK(((e.alpha_minus < 0.0) == (mu < 0.0)));
    }
}

TEST_CASE("critical exponents at closed-form points") {
    auto c0 = critical_q(0.0, 3);
    CHECK(c0.q_c == Catch::Approx(2.0).margin(1e-15));
    CHECK(c0.q_star.is_infinite);

    auto c1 = critical_q(-2.0, 3);
    CHECK(c1.q_c == Catch::Approx(5.0 / 3.0).epsilon(1e-15));
    REQUIRE_FALSE(c1.q_star.is_infinite);
    CHECK(c1.q_star.value == Catch::Approx(3.0).margin(1e-14));
}

TEST_CASE("both algebraic forms of q_c agree to 1 ulp") {
    std::mt19937_64 rng(911u);
    std::uniform_real_distribution<double> dist(-10.0, 0.25);
    for (int k = 0; k < 10000; ++k) {
        const double mu = dist(rng);
        if (!(mu < 0.25)) continue;
        for (int dim : {2, 3, 5, 11}) {
            const auto e = exponents(mu);
            const auto c = critical_q(mu, dim);
            // second route: 1 + 2/(N - 1 - alpha_-), evaluated in long double
            const long double am = (long double)e.alpha_minus;
            const double alt = double(1.0L + 2.0L / ((long double)dim - 1.0L - am));
            CHECK(std::abs(c.q_c - alt) <= ulp_of(c.q_c));
            CHECK(c.q_c > 1.0);
        }
    }
}

TEST_CASE("q_c monotone in mu and dim on sampled grids") {
    for (int dim : {2, 3, 4, 7}) {
        double prev = 0.0;
        bool first = true;
        for (double mu = -8.0; mu < 0.24; mu += 0.04) {
            const double qc = critical_q(mu, dim).q_c;
            if (!first) CHECK(qc > prev);
            prev = qc;
            first = false;
        }
    }
    for (double mu : {-3.0, -0.5, 0.2}) {
        double prev = 1e30;
        for (int dim = 2; dim <= 12; ++dim) {
            const double qc = critical_q(mu, dim).q_c;
            CHECK(qc < prev);
            prev = qc;
        }
    }
}

TEST_CASE("classification at the worked points") {
    CHECK(classify(0.0, 3, 1.5).regime == ExistenceRegime::all_measures);
    CHECK(classify(-2.0, 3, 3.5).regime == ExistenceRegime::no_nontrivial);
    CHECK(classify(-2.0, 3, 2.0).regime == ExistenceRegime::dirac_excluded);
    CHECK_THROWS_AS(classify(0.0, 3, 1.0), DomainError);
    CHECK_THROWS_AS(classify(0.0, 1, 2.0), DomainError);
}

TEST_CASE("classification is monotone in q") {
    std::mt19937_64 rng(7u);
    std::uniform_real_distribution<double> dist(-6.0, 0.24);
    auto rank = [](ExistenceRegime r) {
        switch (r) {
            case ExistenceRegime::all_measures: return 0;
            case ExistenceRegime::dirac_excluded: return 1;
            case ExistenceRegime::L1_only: return 1;
            case ExistenceRegime::no_nontrivial: return 2;
        }
        return -1;
    };
    for (int k = 0; k < 200; ++k) {
        const double mu = dist(rng);
        for (int dim : {2, 3, 6}) {
            int prev = -1;
            for (double q = 1.01; q < 9.0; q += 0.05) {
                const int r = rank(classify(mu, dim, q).regime);
                CHECK(r >= prev);
                prev = r;
            }
            // mu >= 0 never loses all solutions
            if (mu >= 0.0) CHECK(rank(classify(mu, dim, 50.0).regime) <= 1);
        }
    }
}
