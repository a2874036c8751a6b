#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "hardylab/exponents.hpp"
#include "hardylab/hardy.hpp"
#include "hardylab/linear.hpp"
#include "hardylab/nonlinear.hpp"

namespace hardylab {

using json = nlohmann::ordered_json;

// JSON never carries raw non-finite doubles; they become tagged values so
// artifacts stay byte-stable and diffable.
inline json json_real(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "infinity" : "-infinity";
    return v;
}

inline json to_json(const ExponentPair& e) {
    return {{"mu", e.mu}, {"alpha_plus", e.alpha_plus}, {"alpha_minus", e.alpha_minus}};
}

inline json to_json(const CriticalExponents& c) {
    json j{{"mu", c.mu}, {"dim", c.dim}, {"q_c", c.q_c}};
    j["q_star"] = c.q_star.is_infinite ? json("infinity") : json(c.q_star.value);
    return j;
}

inline json to_json(const ExistenceClassification& c) {
    return {{"regime", to_string(c.regime)}, {"reasons", c.reasons}};
}

inline json to_json(const TraceEstimate& t) {
    return {{"eps", t.eps},
            {"values", t.values},
            {"extrapolated_limit", json_real(t.extrapolated_limit)},
            {"fitted_rate", json_real(t.fitted_rate)},
            {"converged", t.converged},
            {"fit_residual", json_real(t.fit_residual)}};
}

inline json to_json(const WeightedNorm& w) {
    return {{"value", json_real(w.value)},
            {"refinement_error", json_real(w.refinement_error)},
            {"diverged", w.diverged},
            {"tail_exponent", json_real(w.tail_exponent)}};
}

inline json to_json(const HardyResult& h, const std::string& domain = {}) {
    json j;
    if (!domain.empty()) j["domain"] = domain;
    j["constant"] = h.constant;
    j["extrapolated"] = h.extrapolated;
    j["converged"] = h.converged;
    j["certified_smallest"] = h.certified_smallest;
    j["rayleigh_quotient"] = h.rayleigh_quotient;
    j["sign_changes"] = h.sign_changes;
    j["boundary_exponent_fit"] = json_real(h.boundary_exponent_fit);
    json hist = json::array();
    for (auto& [n, v] : h.mesh_refinement_history) hist.push_back({{"n", n}, {"value", v}});
    j["mesh_refinement_history"] = hist;
    return j;
}

inline json to_json(const LocalHardyResult& h) {
    return {{"rho", h.rho},
            {"boundary_weighted", to_json(h.boundary_weighted)},
            {"intrinsic", to_json(h.intrinsic)},
            {"component_values", h.component_values},
            {"minimizing_component", h.minimizing_component}};
}

inline json to_json(const HarmonicProfile& p) {
    return {{"branch", p.branch == Branch::alpha_plus ? "alpha_plus" : "alpha_minus"},
            {"anchor_component", p.anchor_component},
            {"fitted_exponent", json_real(p.fitted_exponent)},
            {"fit_residual", json_real(p.fit_residual)},
            {"ok", p.ok},
            {"message", p.message}};
}

inline json to_json(const GreenResult& g) {
    json fe = json::array();
    for (double v : g.fitted_exponents) fe.push_back(json_real(v));
    return {{"source_r", g.source_r}, {"fitted_exponents", fe}};
}

inline json to_json(const KernelLqResult& k) {
    return {{"q", k.q},
            {"q_c", k.q_c},
            {"verdict", to_string(k.verdict)},
            {"values", {json_real(k.values[0]), json_real(k.values[1]), json_real(k.values[2])}},
            {"increment_ratio", json_real(k.increment_ratio)},
            {"agrees_with_threshold", k.agrees_with_threshold}};
}

inline json to_json(const RieszVerdict& r) {
    return {{"gamma1_condition", to_string(r.gamma1_condition)},
            {"poisson_condition", to_string(r.poisson_condition)},
            {"sufficient_holds", r.sufficient_holds},
            {"necessary_holds", r.necessary_holds},
            {"consistent_with_kernel_test", r.consistent_with_kernel_test}};
}

inline json to_json(const SolveReport& r) {
    json hist = json::array();
    for (auto& [a, b] : r.exhaustion_history) hist.push_back({json_real(a), json_real(b)});
    return {{"iterations", r.iterations},
            {"final_residual", json_real(r.final_residual)},
            {"converged", r.converged},
            {"ordering_certificate", r.ordering_certificate},
            {"trace", to_json(r.trace)},
            {"trace_mass_estimate", json_real(r.trace_mass_estimate)},
            {"trace_loss", r.trace_loss},
            {"ko_constant", json_real(r.ko_constant)},
            {"layer_constant", json_real(r.layer_constant)},
            {"energy", json_real(r.energy)},
            {"lambda_shift", json_real(r.lambda_shift)},
            {"admissible", r.admissible},
            {"identity_deviation", json_real(r.identity_deviation)},
            {"exhaustion_history", hist},
            {"notes", r.notes}};
}

inline json to_json(const NonuniquenessReport& r) {
    const char* st = r.status == NonuniquenessReport::Status::refused
                         ? "refused"
                         : (r.status == NonuniquenessReport::Status::produced ? "produced"
                                                                              : "failed");
    json j{{"status", st},
           {"message", r.message},
           {"hardy_bound", json_real(r.hardy_bound)}};
    if (r.status == NonuniquenessReport::Status::produced) {
        j["mu_used"] = r.mu_used;
        j["tau"] = r.tau;
        j["min_ratio_to_ground_state"] = json_real(r.min_ratio_to_ground_state);
        j["trace_magnitude"] = json_real(r.trace_magnitude);
        j["fine_mesh_residual"] = json_real(r.fine_mesh_residual);
        j["certified"] = r.certified;
        j["solution"] = to_json(r.solution);
    }
    return j;
}

} // namespace hardylab
