#include "dgb/drive.hpp"
#include "dgb/ode_blowup.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace dgb;
using nlohmann::json;

namespace {

constexpr int kExitBudget = 2;
constexpr int kExitBoundLost = 3;

struct CliRun {
    std::string problem = "linear1";
    double eps = 1.0;
    AdaptConfig cfg;
};

void apply_json(CliRun& r, const json& j) {
    if (j.contains("problem"))
        r.problem = j["problem"].get<std::string>();
    if (j.contains("eps"))
        r.eps = j["eps"].get<double>();
    auto& c = r.cfg;
    if (j.contains("ttol"))
        c.ttol = j["ttol"].get<double>();
    if (j.contains("ttol_minus"))
        c.ttol_minus = j["ttol_minus"].get<double>();
    if (j.contains("stol"))
        c.stol = j["stol"].get<double>();
    if (j.contains("stol_minus"))
        c.stol_minus = j["stol_minus"].get<double>();
    if (j.contains("n_steps"))
        c.n_steps = j["n_steps"].get<int>();
    if (j.contains("tau1"))
        c.tau1 = j["tau1"].get<double>();
    if (j.contains("degree"))
        c.degree = j["degree"].get<int>();
    if (j.contains("n0"))
        c.n0 = j["n0"].get<int>();
    if (j.contains("adapt_space"))
        c.adapt_space = j["adapt_space"].get<bool>();
    if (j.contains("adapt_time"))
        c.adapt_time = j["adapt_time"].get<bool>();
    if (j.contains("blowup_l2h1"))
        c.blowup_l2h1 = j["blowup_l2h1"].get<bool>();
    if (j.contains("max_dofs"))
        c.max_dofs = j["max_dofs"].get<int>();
    if (j.contains("max_slabs"))
        c.max_slabs = j["max_slabs"].get<int>();
    if (j.contains("out_dir"))
        c.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("vtk_stride"))
        c.vtk_stride = j["vtk_stride"].get<int>();
}

void load_config(CliRun& r, const std::string& path) {
    if (path.empty())
        return;
    std::ifstream in(path);
    if (!in)
        throw CLI::ValidationError("--config", "cannot open " + path);
    json j;
    in >> j;
    apply_json(r, j);
}

void write_outputs(const CliRun& r, const RunLog& log, const json& extra) {
    if (r.cfg.out_dir.empty())
        return;
    std::filesystem::create_directories(r.cfg.out_dir);
    {
        std::ofstream csv(r.cfg.out_dir + "/slabs.csv");
        csv << "k,t0,t1,tau,dofs,union_dofs,eta_S1_sq,max_cell_sq,hat_T_sq,extra,"
               "refined,coarsened,halved\n";
        char buf[256];
        for (const auto& s : log.rows) {
            std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%d,%d,%.17g,%.17g,%.17g,%.17g,%d,%d,%d\n",
                          s.k, s.t0, s.t1, s.tau, s.dofs, s.union_dofs, s.eta_S1_sq,
                          s.max_cell_sq, s.hat_T_sq, s.extra, s.refined, s.coarsened, s.halved);
            csv << buf;
        }
    }
    json j;
    j["problem"] = r.problem;
    j["eps"] = r.eps;
    j["reason"] = to_string(log.reason);
    j["final_time"] = log.final_time;
    j["n_slabs"] = log.n_slabs;
    j["weighted_dofs"] = log.weighted_dofs;
    j["max_dofs_seen"] = log.max_dofs_seen;
    j["eta_S"] = log.eta_S;
    j["eta_T"] = log.eta_T;
    j["eta_total"] = log.eta_total;
    j["error_star"] = log.error_star;
    j["error_linf_l2"] = log.error_linf_l2;
    j["error_l2_energy_sq"] = log.error_l2_energy_sq;
    j["effectivity"] = log.effectivity;
    j["error_below_floor"] = log.error_below_floor;
    j["final_linf"] = log.final_linf;
    j["final_psi"] = log.final_psi;
    for (auto& [k, v] : extra.items())
        j[k] = v;
    std::ofstream(r.cfg.out_dir + "/summary.json") << j.dump(2) << "\n";
}

void print_log(const RunLog& log) {
    std::printf("reason=%s slabs=%d final_time=%.8g weighted_dofs=%.1f max_dofs=%d\n",
                to_string(log.reason), log.n_slabs, log.final_time, log.weighted_dofs,
                log.max_dofs_seen);
    std::printf("eta_S=%.6g eta_T=%.6g eta_total=%.6g", log.eta_S, log.eta_T, log.eta_total);
    if (log.error_star > 0.0)
        std::printf(" error=%.6g effectivity=%.3f", log.error_star, log.effectivity);
    std::printf(" final_linf=%.6g\n", log.final_linf);
}

int exit_code(const RunLog& log, bool bound_loss_expected) {
    if (log.reason == StopReason::Budget)
        return kExitBudget;
    if (log.reason == StopReason::BoundLost && (!bound_loss_expected || log.n_slabs == 0))
        return kExitBoundLost;
    return 0;
}

OdeScheme parse_scheme(const std::string& s) {
    if (s == "implicit")
        return OdeScheme::ImplicitEuler;
    if (s == "explicit")
        return OdeScheme::ExplicitEuler;
    if (s == "improved")
        return OdeScheme::ImprovedEuler;
    throw CLI::ValidationError("--scheme", "expected implicit|explicit|improved");
}

int run_stationary(const CliRun& r) {
    Experiment e = make_experiment(r.problem, r.eps);
    auto mesh = std::make_shared<const Mesh>(e.pd.domain, r.cfg.n0, r.cfg.n0);
    auto space = std::make_shared<const DGSpace>(mesh, r.cfg.degree);
    DGFunction u;
    SpatialIndicator ind;
    bool budget = false;
    for (int it = 0; it < r.cfg.max_gate_iters; ++it) {
        u = solve_stationary(space, e.pd, 0.0);
        ind = elliptic_estimator(u, e.pd, 0.0);
        double mx = 0.0;
        std::vector<int> flags;
        for (int i = 0; i < (int)ind.cell_sq.size(); ++i) {
            mx = std::max(mx, ind.cell_sq[i]);
            if (ind.cell_sq[i] > r.cfg.stol)
                flags.push_back(i);
        }
        if (mx <= r.cfg.stol || flags.empty())
            break;
        auto m2 = std::make_shared<const Mesh>(space->mesh().refine(flags));
        auto sp2 = std::make_shared<const DGSpace>(m2, r.cfg.degree);
        if (sp2->n_dofs() > r.cfg.max_dofs) {
            budget = true;
            break;
        }
        space = sp2;
    }
    std::printf("reason=%s dofs=%d estimator=%.6g\n", budget ? "budget" : "reached-end",
                space->n_dofs(), ind.total());
    if (!r.cfg.out_dir.empty()) {
        std::filesystem::create_directories(r.cfg.out_dir);
        space->mesh().write_vtk(r.cfg.out_dir + "/mesh_0.vtk");
        write_vtk_function(u, r.cfg.out_dir + "/sol_0.vtk");
        json j;
        j["problem"] = r.problem;
        j["eps"] = r.eps;
        j["reason"] = budget ? "budget" : "reached-end";
        j["dofs"] = space->n_dofs();
        j["estimator"] = ind.total();
        std::ofstream(r.cfg.out_dir + "/summary.json") << j.dump(2) << "\n";
    }
    return budget ? kExitBudget : 0;
}

int run_ode(int algorithm, const std::string& scheme, int power, double u0, double tau0,
            double tol) {
    const PolynomialRHS f = PolynomialRHS::power(power);
    const OdeScheme sc = parse_scheme(scheme);
    const BlowupOdeRun run = (algorithm == 1) ? algorithm_4_1(f, sc, u0, tau0, tol)
                                              : algorithm_4_2(f, sc, u0, tau0, tol);
    std::printf("steps=%d final_time=%.12g final_u=%.6g psi=%.6g\n", run.n_steps, run.T,
                run.steps.empty() ? u0 : run.steps.back().u,
                run.steps.empty() ? 0.0 : run.steps.back().psi);
    return run.n_steps > 0 ? 0 : kExitBoundLost;
}

int run_rates() {
    const PolynomialRHS f2 = PolynomialRHS::power(2);
    const PolynomialRHS f3 = PolynomialRHS::power(3);
    const auto schemes = {std::pair{OdeScheme::ImplicitEuler, "implicit"},
                          std::pair{OdeScheme::ExplicitEuler, "explicit"},
                          std::pair{OdeScheme::ImprovedEuler, "improved"}};

    std::printf("residual-thresholded driver, f(u) = u^2, u0 = 1 (T* = 1):\n");
    for (auto [sc, name] : schemes) {
        std::vector<double> N, lam;
        for (int m = 2; m <= 7; ++m) {
            const BlowupOdeRun run = algorithm_4_1(f2, sc, 1.0, 0.1, std::pow(10.0, -m));
            N.push_back(run.n_steps);
            lam.push_back(std::abs(1.0 - run.T));
        }
        std::printf("  %-8s rate=%.3f\n", name, lambda_rate(N, lam));
    }
    for (int p : {2, 3}) {
        const PolynomialRHS& f = p == 2 ? f2 : f3;
        const double Tstar = p == 2 ? 1.0 : 0.5;
        std::printf("growth-rescaled driver, f(u) = u^%d, u0 = 1 (T* = %.1f):\n", p, Tstar);
        for (auto [sc, name] : schemes) {
            std::vector<double> N, lam;
            for (int m = 3; m <= 11; ++m) {
                const BlowupOdeRun run = algorithm_4_2(f, sc, 1.0, 0.1, std::pow(10.0, -m));
                N.push_back(run.n_steps);
                lam.push_back(std::abs(Tstar - run.T));
            }
            std::printf("  %-8s rate=%.3f\n", name, lambda_rate(N, lam));
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive dG solver for convection-diffusion, blow-up and interface problems"};
    app.require_subcommand(1);

    CliRun r;
    std::string config;
    // The config file is loaded before parsing so that command-line flags
    // take precedence over its values.
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config")
            config = argv[i + 1];
    try {
        load_config(r, config);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "JSON configuration file");
        sub->add_option("--problem", r.problem, "problem id (see `list`)");
        sub->add_option("--eps", r.eps, "diffusion parameter");
        sub->add_option("--degree", r.cfg.degree, "polynomial degree");
        sub->add_option("--n0", r.cfg.n0, "initial grid is n0 x n0");
        sub->add_option("--n-steps", r.cfg.n_steps, "initial number of time steps");
        sub->add_option("--tau1", r.cfg.tau1, "initial time step (blow-up driver)");
        sub->add_option("--ttol", r.cfg.ttol, "temporal threshold");
        sub->add_option("--stol", r.cfg.stol, "spatial refinement threshold");
        sub->add_option("--max-dofs", r.cfg.max_dofs, "dof budget");
        sub->add_option("--max-slabs", r.cfg.max_slabs, "slab budget");
        sub->add_option("--out", r.cfg.out_dir, "output directory");
        sub->add_option("--vtk-stride", r.cfg.vtk_stride, "VTK output stride (0 = never)");
    };

    auto* st = app.add_subcommand("stationary", "adaptive stationary solve");
    add_common(st);
    auto* li = app.add_subcommand("linear", "adaptive evolution of a linear problem");
    add_common(li);
    auto* bp = app.add_subcommand("blowup-pde", "adaptive blow-up evolution");
    add_common(bp);
    auto* ifc = app.add_subcommand("interface", "adaptive interface evolution");
    add_common(ifc);

    auto* bo = app.add_subcommand("blowup-ode", "adaptive blow-up ODE integration");
    int algorithm = 2, power = 2;
    double u0 = 1.0, tau0 = 0.1, tol = 1e-6;
    std::string scheme = "implicit";
    bo->add_option("--algorithm", algorithm, "1: fixed tolerance, 2: growth-rescaled")
        ->check(CLI::Range(1, 2));
    bo->add_option("--scheme", scheme, "implicit|explicit|improved");
    bo->add_option("--power", power, "right-hand side u^p");
    bo->add_option("--u0", u0, "initial value");
    bo->add_option("--tau0", tau0, "initial step");
    bo->add_option("--tol", tol, "residual tolerance");

    auto* ra = app.add_subcommand("rates", "fitted blow-up ODE convergence rates");
    auto* ls = app.add_subcommand("list", "list built-in problems");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ls->parsed()) {
            for (const auto& id : experiment_ids())
                std::printf("%s\n", id.c_str());
            return 0;
        }
        if (bo->parsed())
            return run_ode(algorithm, scheme, power, u0, tau0, tol);
        if (ra->parsed())
            return run_rates();
        if (st->parsed())
            return run_stationary(r);

        Experiment e = make_experiment(r.problem, r.eps);
        RunLog log;
        json extra;
        if (li->parsed()) {
            if (e.kind != Experiment::Kind::Linear)
                throw CLI::ValidationError("--problem", r.problem + " is not a linear problem");
            log = adapt_linear(e.pd, r.cfg);
            write_outputs(r, log, extra);
            print_log(log);
            return exit_code(log, false);
        }
        if (bp->parsed()) {
            if (e.kind != Experiment::Kind::Blowup)
                throw CLI::ValidationError("--problem", r.problem + " is not a blow-up problem");
            log = adapt_blowup(e.semi, r.cfg);
            write_outputs(r, log, extra);
            print_log(log);
            return exit_code(log, true);
        }
        // interface
        if (e.kind != Experiment::Kind::Interface)
            throw CLI::ValidationError("--problem", r.problem + " is not an interface problem");
        log = adapt_interface(e.pd, e.iface, r.cfg);
        extra["bound_G"] = log.interface_bound.G;
        extra["bound_phi"] = log.interface_bound.phi;
        extra["bound_delta"] = log.interface_bound.delta;
        extra["bound"] = log.interface_bound.bound;
        extra["bound_delta_exists"] = log.interface_bound.delta_exists;
        write_outputs(r, log, extra);
        print_log(log);
        std::printf("bound: G=%.6g phi=%.6g delta=%.6g bound=%.6g exists=%d\n",
                    log.interface_bound.G, log.interface_bound.phi, log.interface_bound.delta,
                    log.interface_bound.bound, log.interface_bound.delta_exists ? 1 : 0);
        if (!log.interface_bound.delta_exists)
            return kExitBoundLost;
        return exit_code(log, false);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
}
