// hardylab command-line front end.
//
// Subcommands: exponents, hardy, harmonic, green, trace, solve, maximal,
// kernel-lq, nonunique, verify-all. Every computation maps onto exactly one
// library operation; this layer only parses flags, dispatches, and writes
// artifacts.
//
// Exit codes: 0 success, 2 usage/precondition error, 3 solver failure,
// 4 claim violated (verify-all), 5 trace loss (solve), 6 refused (nonunique).
//
// Artifacts are deterministic for a fixed configuration and seed: the JSON
// files carry no timestamps (a .meta.json sidecar records the wall clock).

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hardylab/report.hpp"
#include "hardylab/verify.hpp"

using namespace hardylab;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string out_dir;
    int n = 2048;
    double gamma = 2.0;
    unsigned seed = 20240817u;
    double trace_tol = 0.02;
    double newton_tol = 1e-9;
    double fit_tol = 0.02;
};

struct DomainOpts {
    std::string kind = "ball";
    double radius = 1.0;
    double inner = 0.5, outer = 1.0;
    double height = 1.0;
    int dim = 3;

    RadialDomain build() const {
        if (kind == "ball") return RadialDomain::ball(radius, dim);
        if (kind == "annulus") return RadialDomain::annulus(inner, outer, dim);
        if (kind == "slab") return RadialDomain::slab(height, dim);
        throw DomainError("unknown domain kind '" + kind + "'");
    }
};

void add_domain_flags(CLI::App* cmd, DomainOpts& d) {
    cmd->add_option("--domain", d.kind, "ball | annulus | slab")
        ->check(CLI::IsMember({"ball", "annulus", "slab"}));
    cmd->add_option("--radius", d.radius, "ball radius");
    cmd->add_option("--inner", d.inner, "annulus inner radius");
    cmd->add_option("--outer", d.outer, "annulus outer radius");
    cmd->add_option("--height", d.height, "slab height");
    cmd->add_option("--dim", d.dim, "space dimension (>= 2)");
}

void add_common_flags(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--out", c.out_dir, "artifact directory (default $HARDYLAB_OUT or .)");
    cmd->add_option("--n", c.n, "grid size");
    cmd->add_option("--gamma", c.gamma, "grading power");
    cmd->add_option("--seed", c.seed, "seed for randomized sweeps");
    cmd->add_option("--trace-tol", c.trace_tol, "relative trace tolerance");
    cmd->add_option("--newton-tol", c.newton_tol, "nonlinear solve tolerance");
    cmd->add_option("--fit-tol", c.fit_tol, "exponent fit tolerance");
}

fs::path artifact_dir(const CommonOpts& c) {
    if (!c.out_dir.empty()) return c.out_dir;
    if (const char* env = std::getenv("HARDYLAB_OUT")) return env;
    return ".";
}

void write_artifact(const fs::path& dir, const std::string& name, const json& j) {
    fs::create_directories(dir);
    {
        std::ofstream f(dir / (name + ".json"), std::ios::binary);
        f << j.dump(2) << "\n";
    }
    {
        const auto now = std::chrono::system_clock::now();
        json meta{{"written_unix_ms",
                   std::chrono::duration_cast<std::chrono::milliseconds>(
                       now.time_since_epoch()).count()}};
        std::ofstream f(dir / (name + ".meta.json"), std::ios::binary);
        f << meta.dump(2) << "\n";
    }
}

void write_profile_csv(const fs::path& dir, const std::string& name, const GridFunction& u,
                       const ExponentFit* fit = nullptr) {
    fs::create_directories(dir);
    std::ofstream f(dir / (name + ".csv"), std::ios::binary);
    f << (fit ? "r,delta,value,fitted_model\n" : "r,delta,value\n");
    char buf[160];
    for (int i = 0; i < u.size(); ++i) {
        const double r = u.grid->node_r(i), d = u.grid->node_delta(i);
        if (fit) {
            const double model = fit->amplitude * std::pow(d, fit->exponent);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r, d, u.values[i], model);
        } else {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r, d, u.values[i]);
        }
        f << buf;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hardylab: a numerical laboratory for the Hardy-potential operator,\n"
                 "its boundary-trace theory, and the associated semilinear problems"};
    app.require_subcommand(1);

    CommonOpts common;
    DomainOpts dopt;

    double mu = 0.0, q = 2.0;
    int dim = 3;
    auto* c_exp = app.add_subcommand("exponents", "characteristic and critical exponents");
    c_exp->add_option("--mu", mu, "potential strength (< 1/4)")->required();
    c_exp->add_option("--dim", dim, "space dimension");
    double q_cls = 0.0;
    c_exp->add_option("--q", q_cls, "also classify this nonlinearity");
    add_common_flags(c_exp, common);

    auto* c_hardy = app.add_subcommand("hardy", "Hardy constants and ground states");
    add_domain_flags(c_hardy, dopt);
    double rho = 0.0;
    bool want_ground = false;
    c_hardy->add_option("--rho", rho, "strip width: compute the local constants");
    c_hardy->add_flag("--ground-state", want_ground, "also extract the ground state");
    add_common_flags(c_hardy, common);

    auto* c_harm = app.add_subcommand("harmonic", "radial harmonic profiles of the operator");
    add_domain_flags(c_harm, dopt);
    std::string branch = "minus";
    int anchor = 0;
    c_harm->add_option("--mu", mu)->required();
    c_harm->add_option("--branch", branch, "plus | minus")
        ->check(CLI::IsMember({"plus", "minus"}));
    c_harm->add_option("--component", anchor, "anchor boundary component");
    add_common_flags(c_harm, common);

    auto* c_green = app.add_subcommand("green", "radial Green function");
    add_domain_flags(c_green, dopt);
    double source_r = 0.0;
    c_green->add_option("--mu", mu)->required();
    c_green->add_option("--source-r", source_r, "source radius (0: ball center)");
    add_common_flags(c_green, common);

    auto* c_trace = app.add_subcommand("trace", "normalized boundary trace estimates");
    add_domain_flags(c_trace, dopt);
    std::string field = "kernel";
    double density_exp = 0.0, power_exp = 1.0;
    c_trace->add_option("--mu", mu)->required();
    c_trace->add_option("--field", field, "kernel | potential | power")
        ->check(CLI::IsMember({"kernel", "potential", "power"}));
    c_trace->add_option("--density-exponent", density_exp,
                        "potential field: density delta^p");
    c_trace->add_option("--power-exponent", power_exp, "power field: delta^s");
    add_common_flags(c_trace, common);

    auto* c_solve = app.add_subcommand("solve", "moderate solution with prescribed trace");
    add_domain_flags(c_solve, dopt);
    double cmass = 1.0;
    c_solve->add_option("--mu", mu)->required();
    c_solve->add_option("--q", q, "nonlinearity exponent (> 1)")->required();
    c_solve->add_option("--c", cmass, "boundary density per component");
    add_common_flags(c_solve, common);

    auto* c_max = app.add_subcommand("maximal", "maximal solution via data doubling");
    add_domain_flags(c_max, dopt);
    c_max->add_option("--mu", mu)->required();
    c_max->add_option("--q", q)->required();
    add_common_flags(c_max, common);

    auto* c_klq = app.add_subcommand("kernel-lq", "kernel integrability verdict");
    c_klq->add_option("--mu", mu)->required();
    c_klq->add_option("--dim", dim);
    c_klq->add_option("--q", q)->required();
    std::string riesz;
    c_klq->add_option("--riesz", riesz, "also run the flat-model criterion: constant | dirac")
        ->check(CLI::IsMember({"constant", "dirac"}));
    add_common_flags(c_klq, common);

    auto* c_nu = app.add_subcommand("nonunique", "zero-trace non-uniqueness construction");
    add_domain_flags(c_nu, dopt);
    c_nu->add_option("--q", q)->required();
    add_common_flags(c_nu, common);

    auto* c_ver = app.add_subcommand("verify-all", "run the builtin claim matrix");
    bool quick = false;
    int jobs = 4;
    c_ver->add_flag("--quick", quick, "reduced mesh sizes");
    c_ver->add_option("--jobs", jobs, "parallel claim workers");
    add_common_flags(c_ver, common);

    CLI11_PARSE(app, argc, argv);

    try {
        const fs::path out = artifact_dir(common);

        if (*c_exp) {
            const auto e = exponents(mu);
            const auto c = critical_q(mu, dim);
            json j = to_json(e);
            j["q_c"] = c.q_c;
            j["q_star"] = c.q_star.is_infinite ? json("infinity") : json(c.q_star.value);
            if (q_cls > 1.0) j["classification"] = to_json(classify(mu, dim, q_cls));
            write_artifact(out, "exponents", j);
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*c_hardy) {
            const auto dom = dopt.build();
            const double g = c_hardy->count("--gamma") ? common.gamma : hardy_grading(common.n);
            json j;
            j["domain"] = dom.describe();
            j["n"] = common.n;
            j["gamma"] = g;
            if (rho > 0.0) {
                const auto lh = local_hardy_constant(dom, rho, common.n, g);
                j["local"] = to_json(lh);
            } else if (want_ground) {
                const auto gs = ground_state(dom, make_grid(dom, common.n, g));
                j.update(to_json(gs));
                write_profile_csv(out, "ground_state", gs.eigenfunction);
            } else {
                const auto h = hardy_constant(dom, make_grid(dom, common.n, g));
                j.update(to_json(h));
            }
            write_artifact(out, "hardy", j);
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*c_harm) {
            const auto dom = dopt.build();
            auto grid = make_grid(dom, common.n, common.gamma);
            const auto br = branch == "plus" ? Branch::alpha_plus : Branch::alpha_minus;
            const auto prof = harmonic_profile(dom, mu, br, grid, anchor);
            if (!prof.ok) throw SolverFailure(prof.message);
            json j = to_json(prof);
            j["domain"] = dom.describe();
            const auto fit = fit_boundary_exponent(prof.values, prof.anchor_component, 7);
            write_profile_csv(out, "harmonic_profile", prof.values, &fit);
            write_artifact(out, "harmonic", j);
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*c_green) {
            const auto dom = dopt.build();
            auto grid = make_grid(dom, common.n, common.gamma);
            const auto G = radial_green(dom, mu, source_r, grid);
            json j = to_json(G);
            j["domain"] = dom.describe();
            const auto fit = fit_boundary_exponent(G.values, 0);
            write_profile_csv(out, "green", G.values, &fit);
            write_artifact(out, "green", j);
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*c_trace) {
            const auto dom = dopt.build();
            auto grid = make_grid(dom, common.n, common.gamma);
            const auto pair = exponents(mu);
            GridFunction u;
            if (field == "kernel") {
                u = calibrated_kernel(dom, mu, 1.0, grid).values;
            } else if (field == "potential") {
                auto tau = GridFunction::sample(grid, [&](double, double d) {
                    return std::pow(d, density_exp);
                });
                u = green_potential(mu, tau).values;
            } else {
                u = GridFunction::sample(grid, [&](double, double d) {
                    return std::pow(d, power_exp);
                });
            }
            TraceOptions topt;
            topt.fit_tol = common.fit_tol;
            const auto est = normalized_trace(u, pair, topt);
            const auto per = normalized_trace_per_component(u, pair, topt);
            json j{{"domain", dom.describe()}, {"field", field}, {"aggregate", to_json(est)}};
            j["per_component"] = json::array();
            for (const auto& p : per) j["per_component"].push_back(to_json(p));
            write_artifact(out, "trace", j);
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*c_solve) {
            const auto dom = dopt.build();
            NonlinearProblem prob(dom, mu, q, cmass);
            TraceSolveOptions topt;
            topt.n = common.n;
            topt.gamma = common.gamma;
            topt.newton.tol = common.newton_tol;
            topt.fit_tol = common.fit_tol;
            topt.level_tol = 0.25 * common.trace_tol;
            const auto rep = solve_with_trace(prob, topt);
            json j = to_json(rep);
            j["domain"] = dom.describe();
            j["mu"] = mu;
            j["q"] = q;
            j["c"] = cmass;
            write_artifact(out, "solve", j);
            write_profile_csv(out, "solution", rep.solution);
            std::cout << j.dump(2) << "\n";
            return rep.trace_loss ? 5 : 0;
        }

        if (*c_max) {
            const auto dom = dopt.build();
            MaximalOptions mopt;
            mopt.n = common.n;
            mopt.gamma = common.gamma;
            mopt.newton.tol = common.newton_tol;
            const auto rep = maximal_solution(dom, mu, q, mopt);
            json j = to_json(rep);
            j["domain"] = dom.describe();
            write_artifact(out, "maximal", j);
            write_profile_csv(out, "maximal_solution", rep.solution);
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*c_klq) {
            const auto v = kernel_lq_test(mu, dim, q, common.n);
            json j = to_json(v);
            if (!riesz.empty()) {
                const auto rp = riesz == "constant" ? RieszProfile::constant_density
                                                    : RieszProfile::dirac;
                j["riesz"] = to_json(riesz_criterion_check(mu, dim, q, rp));
            }
            write_artifact(out, "kernel_lq", j);
            std::cout << j.dump(2) << "\n";
            return v.verdict == IntegrabilityVerdict::inconclusive ? 3 : 0;
        }

        if (*c_nu) {
            const auto dom = dopt.build();
            NonuniquenessOptions nopt;
            nopt.n = common.n;
            nopt.gamma = common.gamma;
            const auto rep = nonuniqueness_demo(dom, q, nopt);
            json j = to_json(rep);
            j["domain"] = dom.describe();
            write_artifact(out, "nonunique", j);
            std::cout << j.dump(2) << "\n";
            if (rep.status == NonuniquenessReport::Status::refused) return 6;
            return rep.status == NonuniquenessReport::Status::produced ? 0 : 3;
        }

        if (*c_ver) {
            ClaimConfig cfg;
            cfg.quick = quick;
            cfg.seed = common.seed;
            const auto reports = run_all_claims(cfg, jobs);
            json summary = json::array();
            bool violated = false;
            for (const auto& r : reports) {
                write_artifact(out / "verify", "claim-" + r.id, to_json(r));
                summary.push_back(
                    {{"index", r.index}, {"id", r.id}, {"status", to_string(r.status)}});
                violated = violated || r.status == ClaimStatus::violated ||
                           r.status == ClaimStatus::inconclusive;
                std::cout << "claim " << r.index << " " << r.id << ": "
                          << to_string(r.status) << "\n";
            }
            write_artifact(out / "verify", "summary", summary);
            return violated ? 4 : 0;
        }
    } catch (const DomainError& e) {
        std::cerr << "precondition error: " << e.what() << "\n";
        return 2;
    } catch (const SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
