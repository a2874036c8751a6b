#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hardylab/errors.hpp"

namespace hardylab {

// Characteristic exponents alpha_+/- = 1/2 +- sqrt(1/4 - mu).
//
// Internals run in long double so that the algebraic identities
// alpha_+ + alpha_- = 1 and alpha_+ * alpha_- = mu survive rounding to
// double within a few ulp even when alpha_- is tiny. alpha_- is derived
// as mu / alpha_+, which keeps its full relative precision near mu = 0.
struct ExponentPair {
    double mu;
    double alpha_plus;
    double alpha_minus;
};

inline ExponentPair exponents(double mu) {
    if (!(mu < 0.25))
        throw DomainError("exponents require mu < 1/4 (admissible range: -inf < mu < 0.25)");
    const long double m = mu;
    const long double s = sqrtl(0.25L - m);
    const long double ap = 0.5L + s;
    const long double am = (m == 0.0L) ? 0.5L - s : m / ap;
    return ExponentPair{mu, double(ap), double(am)};
}

// Extended real: finite value or +infinity, as an explicit tag.
struct ExtendedReal {
    bool is_infinite = false;
    double value = 0.0;

    static ExtendedReal infinite() { return {true, 0.0}; }
    static ExtendedReal finite(double v) { return {false, v}; }
    bool leq(double x) const { return !is_infinite && value <= x; }
};

struct CriticalExponents {
    double mu;
    int dim;
    double q_c;            // (N + alpha_+) / (N - 1 - alpha_-)
    ExtendedReal q_star;   // +infinity for mu >= 0, else 1 - 2/alpha_-
};

inline CriticalExponents critical_q(double mu, int dim) {
    if (dim < 2) throw DomainError("critical exponents require dim >= 2");
    const ExponentPair e = exponents(mu);
    const long double ap = 0.5L + sqrtl(0.25L - (long double)mu);
    const long double am = (mu == 0.0) ? 0.0L : (long double)mu / ap;
    const long double qc = ((long double)dim + ap) / ((long double)dim - 1.0L - am);
    CriticalExponents c;
    c.mu = mu;
    c.dim = dim;
    c.q_c = double(qc);
    c.q_star = (mu >= 0.0) ? ExtendedReal::infinite()
                           : ExtendedReal::finite(double(1.0L - 2.0L / am));
    (void)e;
    return c;
}

enum class ExistenceRegime {
    all_measures,    // q < q_c: every finite boundary measure admissible
    L1_only,         // retained for the regime taxonomy; the classifier emits
                     // dirac_excluded for the middle band (L^1 data stay admissible there)
    dirac_excluded,  // q_c <= q < q_star: point masses not attainable
    no_nontrivial    // q >= q_star: only the trivial solution
};

inline std::string to_string(ExistenceRegime r) {
    switch (r) {
        case ExistenceRegime::all_measures:   return "all_measures";
        case ExistenceRegime::L1_only:        return "L1_only";
        case ExistenceRegime::dirac_excluded: return "dirac_excluded";
        case ExistenceRegime::no_nontrivial:  return "no_nontrivial";
    }
    return "?";
}

struct ExistenceClassification {
    ExistenceRegime regime;
    std::vector<std::string> reasons;
};

inline ExistenceClassification classify(double mu, int dim, double q) {
    if (!(q > 1.0)) throw DomainError("classification requires q > 1");
    const CriticalExponents c = critical_q(mu, dim);
    ExistenceClassification out;
    if (c.q_star.leq(q)) {
        out.regime = ExistenceRegime::no_nontrivial;
        out.reasons = {"q >= q_star: no nontrivial solution for any boundary measure",
                       "only reachable for mu < 0"};
    } else if (q < c.q_c) {
        out.regime = ExistenceRegime::all_measures;
        out.reasons = {"q < q_c: every finite positive boundary measure is admissible"};
    } else {
        out.regime = ExistenceRegime::dirac_excluded;
        out.reasons = {"q_c <= q: the Dirac measure admits no solution",
                       "q < q_star: L1 boundary densities remain admissible"};
    }
    return out;
}

} // namespace hardylab
