#include "dgb/drive.hpp"

#include "dgb/quadrature.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <filesystem>
#include <stdexcept>

namespace dgb {

namespace {

double max_cell(const SpatialIndicator& s) {
    double m = 0.0;
    for (double v : s.cell_sq)
        m = std::max(m, v);
    return m;
}

struct Marks {
    int refined = 0, coarsened = 0;
};

/// Refine the cells above stol_p, then coarsen (on the refined mesh) the
/// surviving cells below stol_m.
std::shared_ptr<const Mesh> apply_marks(const Mesh& m, const std::vector<double>& cell_sq,
                                        double stol_p, double stol_m, Marks& mk) {
    std::vector<int> ref;
    for (int i = 0; i < m.n_cells(); ++i)
        if (cell_sq[i] > stol_p)
            ref.push_back(i);
    Mesh r = m.refine(ref);
    std::vector<int> co;
    for (int i = 0; i < m.n_cells(); ++i)
        if (cell_sq[i] < stol_m) {
            const int j = r.find(m.cell_key(i));
            if (j >= 0)
                co.push_back(j);
        }
    Mesh c = r.coarsen(co);
    mk.refined = r.n_cells() - m.n_cells();
    mk.coarsened = r.n_cells() - c.n_cells();
    return std::make_shared<const Mesh>(std::move(c));
}

void maybe_vtk(const AdaptConfig& cfg, int k, const DGFunction& u) {
    if (cfg.vtk_stride <= 0 || cfg.out_dir.empty() || k % cfg.vtk_stride != 0)
        return;
    std::filesystem::create_directories(cfg.out_dir);
    u.space->mesh().write_vtk(cfg.out_dir + "/mesh_" + std::to_string(k) + ".vtk");
    write_vtk_function(u, cfg.out_dir + "/sol_" + std::to_string(k) + ".vtk");
}

DGFunction project_initial(const std::shared_ptr<const Mesh>& mesh, const ProblemData& pd,
                           int degree) {
    auto sp = std::make_shared<const DGSpace>(mesh, degree);
    return l2_project(sp, [&](Pt x) { return pd.u0 ? pd.u0(x) : 0.0; }, degree + 3);
}

/// Accumulate the exact-error quantities of one accepted slab: the in-slab
/// sup of the L2 error (sampled at the endpoints and the 3 Gauss times) and
/// the time integral of the squared energy error of the piecewise-linear
/// interpolant on the union space.
void accumulate_error(RunLog& log, const DGFunction& u0, const DGFunction& u1,
                      const std::shared_ptr<const DGSpace>& usp, double t0, double t1,
                      const ProblemData& pd, int degree) {
    if (!pd.exact)
        return;
    const int nq = degree + 3;
    const DGFunction U0 = transfer(u0, usp);
    const DGFunction U1 = transfer(u1, usp);
    const double tau = t1 - t0;
    auto at = [&](double t) { return [&pd, t](Pt x) { return pd.exact(x, t); }; };
    log.error_linf_l2 = std::max(log.error_linf_l2, l2_error(U0, at(t0), nq));
    log.error_linf_l2 = std::max(log.error_linf_l2, l2_error(U1, at(t1), nq));
    const auto& qt = gauss_legendre(3);
    for (size_t k = 0; k < qt.points.size(); ++k) {
        const double t = t0 + 0.5 * tau * (qt.points[k] + 1.0);
        const double l0 = (t1 - t) / tau;
        const DGFunction Ut = l0 * U0 + (1.0 - l0) * U1;
        log.error_linf_l2 = std::max(log.error_linf_l2, l2_error(Ut, at(t), nq));
        if (pd.exact_grad) {
            auto exg = [&pd, t](Pt x) { return pd.exact_grad(x, t); };
            const double ee = energy_error(Ut, at(t), exg, pd.eps, pd.beta, nq);
            log.error_l2_energy_sq += 0.5 * tau * qt.weights[k] * ee * ee;
        }
    }
}

void finish_error(RunLog& log) {
    log.error_star = std::sqrt(log.error_linf_l2 * log.error_linf_l2 + log.error_l2_energy_sq);
    log.error_below_floor = log.error_star > 0.0 && log.error_star < 1e-10;
    if (log.error_star > 0.0)
        log.effectivity = log.eta_total / log.error_star;
}

} // namespace

const char* to_string(StopReason r) {
    switch (r) {
    case StopReason::ReachedEnd: return "reached-end";
    case StopReason::BoundLost: return "bound-lost";
    case StopReason::Budget: return "budget";
    }
    return "?";
}

RunLog adapt_linear(const ProblemData& pd, const AdaptConfig& cfg) {
    RunLog log;
    const double T = pd.T;
    const double stol_m = cfg.stol_minus >= 0.0 ? cfg.stol_minus : 1e-3 * cfg.stol;
    std::vector<double> taus(std::max(cfg.n_steps, 1), T / std::max(cfg.n_steps, 1));

    auto mesh = std::make_shared<const Mesh>(pd.domain, cfg.n0, cfg.n0);
    DGFunction u0 = project_initial(mesh, pd, cfg.degree);

    DGFunction u1;
    TimeSlab slab;
    SlabEstimates est;
    auto compute_first = [&]() {
        u1 = backward_euler_step(u0, u0.space, pd, taus[0], taus[0]);
        slab = make_slab(u0, u1, 0.0, taus[0], pd);
        est = slab_estimators(slab, pd);
    };
    compute_first();

    bool budget = false;
    for (int it = 0; it < cfg.max_gate_iters; ++it) {
        const bool tbad = cfg.adapt_time && est.hat_T_sq > cfg.ttol;
        const bool sbad = cfg.adapt_space && max_cell(est.S1_1) > cfg.stol;
        if (!tbad && !sbad)
            break;
        if (sbad) {
            Marks mk;
            auto m2 = apply_marks(u0.space->mesh(), est.S1_1.cell_sq, cfg.stol, stol_m, mk);
            auto sp2 = std::make_shared<const DGSpace>(m2, cfg.degree);
            if (sp2->n_dofs() > cfg.max_dofs) {
                budget = true;
                break;
            }
            u0 = project_initial(m2, pd, cfg.degree);
        }
        if (tbad) {
            taus[0] *= 0.5;
            taus.insert(taus.begin(), taus[0]);
        }
        compute_first();
    }

    RunTotals tot;
    if (pd.u0)
        tot.e0_sq = std::pow(l2_error(u0, pd.u0, cfg.degree + 3), 2);
    const double alpha = alpha_T(pd);

    DGFunction u = u0;
    DGFunction A_prev;
    bool have_A = false;
    double time = 0.0;
    int j = 0;
    SlabRow pending{};

    auto accept = [&](int halved) {
        pending = SlabRow{};
        pending.k = j + 1;
        pending.t0 = slab.t0;
        pending.t1 = slab.t1;
        pending.tau = slab.tau();
        pending.dofs = u1.space->n_dofs();
        pending.union_dofs = slab.union_space->n_dofs();
        pending.eta_S1_sq = est.S1_1.total_sq;
        pending.max_cell_sq = max_cell(est.S1_1);
        pending.hat_T_sq = est.hat_T_sq;
        pending.halved = halved;
        tot.add(est, slab.tau());
        log.weighted_dofs += slab.tau() * pending.union_dofs;
        log.max_dofs_seen = std::max(log.max_dofs_seen, pending.dofs);
        accumulate_error(log, slab.u0, slab.u1, slab.union_space, slab.t0, slab.t1, pd,
                         cfg.degree);
        log.rows.push_back(pending);
        maybe_vtk(cfg, pending.k, u1);
        time = slab.t1;
        u = u1;
        A_prev = slab.A1;
        have_A = true;
        ++j;
    };

    if (!budget)
        accept(0); // the first slab, set up by the initial loop

    while (!budget && j < static_cast<int>(taus.size())) {
        if (static_cast<int>(log.rows.size()) >= cfg.max_slabs) {
            budget = true;
            break;
        }
        double tau = taus[j];
        auto space = u.space;
        int refined = 0, coarsened = 0, halved = 0;
        for (int it = 0;; ++it) {
            u1 = backward_euler_step(u, space, pd, time + tau, tau);
            slab = make_slab(u, u1, time, time + tau, pd, have_A ? &A_prev : nullptr);
            est = slab_estimators(slab, pd);
            const bool tbad = cfg.adapt_time && est.hat_T_sq > cfg.ttol;
            const bool sbad = cfg.adapt_space && max_cell(est.S1_1) > cfg.stol;
            if ((!tbad && !sbad) || it >= cfg.max_gate_iters)
                break;
            if (tbad) {
                tau *= 0.5;
                taus[j] = tau;
                taus.insert(taus.begin() + j + 1, tau);
                ++halved;
            } else {
                Marks mk;
                auto m2 = apply_marks(space->mesh(), est.S1_1.cell_sq, cfg.stol, stol_m, mk);
                auto sp2 = std::make_shared<const DGSpace>(m2, cfg.degree);
                if (sp2->n_dofs() > cfg.max_dofs) {
                    budget = true;
                    break;
                }
                space = sp2;
                refined += mk.refined;
                coarsened += mk.coarsened;
            }
        }
        accept(halved);
        log.rows.back().refined = refined;
        log.rows.back().coarsened = coarsened;
    }

    log.reason = budget ? StopReason::Budget : StopReason::ReachedEnd;
    log.final_time = time;
    log.n_slabs = j;
    if (time > 0.0)
        log.weighted_dofs /= time;
    log.eta_S = std::sqrt(tot.eta_S_sq(alpha));
    log.eta_T = std::sqrt(tot.eta_T_sq(alpha));
    log.eta_total = tot.total(alpha);
    finish_error(log);
    log.final_linf = linf_sampled(u, cfg.degree + 2);
    log.final_u = u;
    return log;
}

RunLog adapt_interface(const ProblemData& pd, const InterfaceProblem& iface,
                       const AdaptConfig& cfg) {
    RunLog log;
    const double T = pd.T;
    const double stol_m = cfg.stol_minus >= 0.0 ? cfg.stol_minus : 1e-3 * cfg.stol;
    std::vector<double> taus(std::max(cfg.n_steps, 1), T / std::max(cfg.n_steps, 1));

    auto mesh = std::make_shared<const Mesh>(pd.domain, cfg.n0, cfg.n0);
    DGFunction u0 = project_initial(mesh, pd, cfg.degree);

    DGFunction u1;
    InterfaceSlab slab;
    InterfaceSlabEstimates est;
    auto compute_first = [&]() {
        u1 = interface_step(u0, u0.space, pd, iface, 0.0, taus[0], taus[0]);
        slab = make_interface_slab(u0, u1, 0.0, taus[0]);
        est = interface_slab_estimators(slab, pd, iface);
    };
    compute_first();

    bool budget = false;
    for (int it = 0; it < cfg.max_gate_iters; ++it) {
        const bool tbad = cfg.adapt_time && hat_eta_T_interface_sq(est, T) > cfg.ttol;
        const bool sbad = cfg.adapt_space && max_cell(est.S1) > cfg.stol;
        if (!tbad && !sbad)
            break;
        if (sbad) {
            Marks mk;
            auto m2 = apply_marks(u0.space->mesh(), est.S1.cell_sq, cfg.stol, stol_m, mk);
            auto sp2 = std::make_shared<const DGSpace>(m2, cfg.degree);
            if (sp2->n_dofs() > cfg.max_dofs) {
                budget = true;
                break;
            }
            u0 = project_initial(m2, pd, cfg.degree);
        }
        if (tbad) {
            taus[0] *= 0.5;
            taus.insert(taus.begin(), taus[0]);
        }
        compute_first();
    }

    double e0_sq = 0.0;
    if (pd.u0)
        e0_sq = std::pow(l2_error(u0, pd.u0, cfg.degree + 3), 2);
    InterfaceAccumulator acc(e0_sq);

    DGFunction u = u0;
    double time = 0.0;
    int j = 0;
    double sum_hat = 0.0;

    auto accept = [&](int halved) {
        SlabRow row{};
        row.k = j + 1;
        row.t0 = slab.t0;
        row.t1 = slab.t1;
        row.tau = slab.tau();
        row.dofs = u1.space->n_dofs();
        row.union_dofs = slab.union_space->n_dofs();
        row.eta_S1_sq = est.S1.total_sq;
        row.max_cell_sq = max_cell(est.S1);
        row.hat_T_sq = hat_eta_T_interface_sq(est, T);
        row.extra = est.int_sigma;
        row.halved = halved;
        acc.add(est);
        sum_hat += row.hat_T_sq;
        log.weighted_dofs += slab.tau() * row.union_dofs;
        log.max_dofs_seen = std::max(log.max_dofs_seen, row.dofs);
        accumulate_error(log, slab.u0, slab.u1, slab.union_space, slab.t0, slab.t1, pd,
                         cfg.degree);
        log.rows.push_back(row);
        maybe_vtk(cfg, row.k, u1);
        time = slab.t1;
        u = u1;
        ++j;
    };

    if (!budget)
        accept(0);

    while (!budget && j < static_cast<int>(taus.size())) {
        if (static_cast<int>(log.rows.size()) >= cfg.max_slabs) {
            budget = true;
            break;
        }
        double tau = taus[j];
        auto space = u.space;
        int refined = 0, coarsened = 0, halved = 0;
        for (int it = 0;; ++it) {
            u1 = interface_step(u, space, pd, iface, time, time + tau, tau);
            slab = make_interface_slab(u, u1, time, time + tau);
            est = interface_slab_estimators(slab, pd, iface);
            const bool tbad = cfg.adapt_time && hat_eta_T_interface_sq(est, T) > cfg.ttol;
            const bool sbad = cfg.adapt_space && max_cell(est.S1) > cfg.stol;
            if ((!tbad && !sbad) || it >= cfg.max_gate_iters)
                break;
            if (tbad) {
                tau *= 0.5;
                taus[j] = tau;
                taus.insert(taus.begin() + j + 1, tau);
                ++halved;
            } else {
                Marks mk;
                auto m2 = apply_marks(space->mesh(), est.S1.cell_sq, cfg.stol, stol_m, mk);
                auto sp2 = std::make_shared<const DGSpace>(m2, cfg.degree);
                if (sp2->n_dofs() > cfg.max_dofs) {
                    budget = true;
                    break;
                }
                space = sp2;
                refined += mk.refined;
                coarsened += mk.coarsened;
            }
        }
        accept(halved);
        log.rows.back().refined = refined;
        log.rows.back().coarsened = coarsened;
    }

    log.reason = budget ? StopReason::Budget : StopReason::ReachedEnd;
    log.final_time = time;
    log.n_slabs = j;
    if (time > 0.0)
        log.weighted_dofs /= time;
    log.interface_bound = acc.finish(T, iface);
    log.eta_S = std::sqrt(std::max(log.interface_bound.phi, 0.0));
    log.eta_T = std::sqrt(sum_hat);
    log.eta_total = log.eta_S;
    finish_error(log);
    log.final_linf = linf_sampled(u, cfg.degree + 2);
    log.final_u = u;
    return log;
}

RunLog adapt_blowup(const SemilinearProblem& prob, const AdaptConfig& cfg) {
    RunLog log;
    const ProblemData& pd = prob.pd;
    double ttol_p = cfg.ttol;
    double ttol_m = cfg.ttol_minus >= 0.0 ? cfg.ttol_minus : 0.01 * cfg.ttol;
    double stol_p = cfg.stol;
    double stol_m = cfg.stol_minus >= 0.0 ? cfg.stol_minus : 1e-6 * cfg.stol;
    double tau = cfg.tau1 > 0.0 ? cfg.tau1 : pd.T / std::max(cfg.n_steps, 1);

    auto reaction = [&prob](Pt x, double t, double u) { return prob.reaction(x, t, u); };
    auto mesh = std::make_shared<const Mesh>(pd.domain, cfg.n0, cfg.n0);
    DGFunction u0 = project_initial(mesh, pd, cfg.degree);

    DGFunction u1;
    BlowupSlab slab;
    BlowupSlabEstimates est;
    auto compute_first = [&]() {
        u1 = imex_step(u0, u0.space, pd, reaction, 0.0, tau);
        slab = make_blowup_slab(u0, u1, 0.0, tau, prob);
        est = blowup_slab_estimators(slab, prob);
    };
    compute_first();

    bool budget = false;
    for (int it = 0; it < cfg.max_gate_iters; ++it) {
        const bool tbad = cfg.adapt_time && est.int_T2_sq > ttol_p;
        const bool sbad = cfg.adapt_space && max_cell(est.S1_1) > stol_p;
        if (!tbad && !sbad)
            break;
        if (sbad) {
            Marks mk;
            auto m2 = apply_marks(u0.space->mesh(), est.S1_1.cell_sq, stol_p, stol_m, mk);
            auto sp2 = std::make_shared<const DGSpace>(m2, cfg.degree);
            if (sp2->n_dofs() > cfg.max_dofs) {
                budget = true;
                break;
            }
            u0 = project_initial(m2, pd, cfg.degree);
        }
        if (tbad)
            tau *= 0.5;
        compute_first();
    }

    const double eta_I =
        initial_indicator(u0, pd.u0 ? ScalarField(pd.u0) : ScalarField([](Pt) { return 0.0; }));
    BlowupAccumulator acc(pd.eps, eta_I, cfg.blowup_l2h1);

    DGFunction u = u0;
    DGFunction A_prev;
    bool have_A = false;
    double time = 0.0;
    int j = 0;
    bool bound_lost = false;

    auto accept = [&](const BlowupAccumulator::StepEval& ev, int refined, int coarsened,
                      int halved) {
        SlabRow row{};
        row.k = j + 1;
        row.t0 = slab.t0;
        row.t1 = slab.t1;
        row.tau = slab.tau();
        row.dofs = u1.space->n_dofs();
        row.union_dofs = slab.union_space->n_dofs();
        row.eta_S1_sq = est.S1_1.total_sq;
        row.max_cell_sq = max_cell(est.S1_1);
        row.hat_T_sq = est.int_T2_sq;
        row.extra = linf_sampled(u1, cfg.degree + 2);
        row.refined = refined;
        row.coarsened = coarsened;
        row.halved = halved;
        acc.observe_jump_sq(std::max(est.jump_sq_0, est.jump_sq_1));
        ttol_p *= ev.G;
        ttol_m *= ev.G;
        stol_p *= ev.G;
        stol_m *= ev.G;
        log.weighted_dofs += slab.tau() * row.union_dofs;
        log.max_dofs_seen = std::max(log.max_dofs_seen, row.dofs);
        log.rows.push_back(row);
        maybe_vtk(cfg, row.k, u1);
        time = slab.t1;
        u = u1;
        A_prev = slab.A1;
        have_A = true;
        ++j;
    };

    if (!budget) {
        const auto ev = acc.step(est, tau);
        if (ev.exists)
            accept(ev, 0, 0, 0);
        else
            bound_lost = true;
    }

    while (!budget && !bound_lost) {
        if (static_cast<int>(log.rows.size()) >= cfg.max_slabs) {
            budget = true;
            break;
        }
        auto space = u.space;
        int refined = 0, coarsened = 0, halved = 0;
        auto compute = [&]() {
            u1 = imex_step(u, space, pd, reaction, time, tau);
            slab = make_blowup_slab(u, u1, time, time + tau, prob, have_A ? &A_prev : nullptr);
            est = blowup_slab_estimators(slab, prob);
        };
        compute();
        if (cfg.adapt_time && est.int_T2_sq > ttol_p) {
            tau *= 0.5;
            ++halved;
            compute();
        }
        if (cfg.adapt_time && est.int_T2_sq < ttol_m) {
            tau *= 2.0;
            compute();
        }
        if (cfg.adapt_space) {
            Marks mk;
            auto m2 = apply_marks(space->mesh(), est.S1_1.cell_sq, stol_p, stol_m, mk);
            if (mk.refined > 0 || mk.coarsened > 0) {
                auto sp2 = std::make_shared<const DGSpace>(m2, cfg.degree);
                if (sp2->n_dofs() > cfg.max_dofs) {
                    budget = true;
                    break;
                }
                space = sp2;
                refined = mk.refined;
                coarsened = mk.coarsened;
                compute();
            }
        }
        const auto ev = acc.step(est, tau);
        if (!ev.exists) {
            bound_lost = true;
            break;
        }
        accept(ev, refined, coarsened, halved);
    }

    log.reason = budget ? StopReason::Budget
                        : (bound_lost ? StopReason::BoundLost : StopReason::ReachedEnd);
    log.final_time = time;
    log.n_slabs = j;
    if (time > 0.0)
        log.weighted_dofs /= time;
    log.final_psi = acc.psi();
    log.eta_total = acc.final_bound();
    log.final_linf = linf_sampled(u, cfg.degree + 2);
    log.final_u = u;
    return log;
}

namespace {

/// One-dimensional boundary-layer profile and its derivatives.
struct LayerProfile {
    double eps;
    double denom;
    explicit LayerProfile(double e) : eps(e), denom(std::exp(-1.0 / e) - 1.0) {}
    double v(double s) const { return (std::exp((s - 1.0) / eps) - 1.0) / denom + s - 1.0; }
    double d1(double s) const { return std::exp((s - 1.0) / eps) / (eps * denom) + 1.0; }
    double d2(double s) const { return std::exp((s - 1.0) / eps) / (eps * eps * denom); }
};

Experiment linear1(double eps) {
    Experiment e;
    e.id = "linear1";
    e.pd.domain = Rect{0.0, 0.0, 1.0, 1.0};
    e.pd.eps = eps;
    e.pd.a = [](Pt, double) { return Pt{1.0, 1.0}; };
    e.pd.u0 = [](Pt) { return 0.0; };
    e.pd.T = 10.0;
    const LayerProfile L(eps);
    e.pd.exact = [L](Pt x, double t) { return (1.0 - std::exp(-t)) * L.v(x.x) * L.v(x.y); };
    e.pd.exact_grad = [L](Pt x, double t) {
        const double m = 1.0 - std::exp(-t);
        return Pt{m * L.d1(x.x) * L.v(x.y), m * L.v(x.x) * L.d1(x.y)};
    };
    e.pd.f = [L, eps](Pt x, double t) {
        const double m = 1.0 - std::exp(-t);
        const double X = L.v(x.x), Y = L.v(x.y);
        return std::exp(-t) * X * Y - eps * m * (L.d2(x.x) * Y + X * L.d2(x.y)) +
               m * (L.d1(x.x) * Y + X * L.d1(x.y));
    };
    return e;
}

Experiment linear2(double eps) {
    Experiment e;
    e.id = "linear2";
    e.pd.domain = Rect{-1.0, -1.0, 1.0, 1.0};
    e.pd.eps = eps;
    e.pd.a = [](Pt, double) { return Pt{1.0, 1.0}; };
    e.pd.b = [](Pt, double) { return 1.0; };
    e.pd.beta = 1.0;
    e.pd.f = [](Pt x, double t) { return std::sin(5.0 * t) * x.x * x.y; };
    e.pd.u0 = [](Pt) { return 0.0; };
    e.pd.T = 2.0 * M_PI;
    return e;
}

Experiment linear3(double eps) {
    Experiment e;
    e.id = "linear3";
    e.pd.domain = Rect{-2.0, -2.0, 2.0, 2.0};
    e.pd.eps = eps;
    e.pd.a = [](Pt x, double) { return Pt{x.y, -x.x}; };
    e.pd.u0 = [](Pt x) {
        return std::exp(-64.0 * (x.x - 0.5) * (x.x - 0.5)) * std::exp(-64.0 * x.y * x.y);
    };
    e.pd.T = 2.0 * M_PI;
    // Quasi-exact rotating-and-diffusing pulse (boundary values negligible).
    e.pd.exact = [eps](Pt x, double t) {
        const double s = 1.0 + 256.0 * eps * t;
        const double xc = 0.5 * std::cos(t), yc = -0.5 * std::sin(t);
        return (1.0 / s) * std::exp(-64.0 * (x.x - xc) * (x.x - xc) / s) *
               std::exp(-64.0 * (x.y - yc) * (x.y - yc) / s);
    };
    e.pd.exact_grad = [eps](Pt x, double t) {
        const double s = 1.0 + 256.0 * eps * t;
        const double xc = 0.5 * std::cos(t), yc = -0.5 * std::sin(t);
        const double u = (1.0 / s) * std::exp(-64.0 * (x.x - xc) * (x.x - xc) / s) *
                         std::exp(-64.0 * (x.y - yc) * (x.y - yc) / s);
        return Pt{-128.0 * (x.x - xc) / s * u, -128.0 * (x.y - yc) / s * u};
    };
    return e;
}

Experiment linear4(double eps) {
    Experiment e;
    e.id = "linear4";
    e.pd.domain = Rect{0.0, 0.0, 1.0, 1.0};
    e.pd.eps = eps;
    e.pd.a = [](Pt, double t) { return Pt{std::sin(t), std::cos(t)}; };
    e.pd.f = [](Pt, double) { return 1.0; };
    e.pd.u0 = [](Pt) { return 0.0; };
    e.pd.T = 2.0 * M_PI;
    return e;
}

Experiment blowup_base(const std::string& id, Rect dom, ScalarField u0) {
    Experiment e;
    e.id = id;
    e.kind = Experiment::Kind::Blowup;
    e.pd.domain = dom;
    e.pd.eps = 1.0;
    e.pd.u0 = std::move(u0);
    e.pd.T = 1.0;
    e.semi.pd = e.pd;
    return e;
}

Experiment interface1(double eps) {
    Experiment e;
    e.id = "interface1";
    e.kind = Experiment::Kind::Interface;
    e.pd.domain = Rect{-1.0, -1.0, 1.0, 1.0};
    e.pd.eps = eps;
    e.pd.a = [](Pt, double) { return Pt{1.0, 1.0}; };
    e.pd.u0 = [](Pt) { return 0.0; };
    e.pd.T = 1.0;
    e.iface.x_interface = 0.0;
    e.iface.rho = 0.1;
    e.iface.r = 0.5;
    e.iface.w1 = 1.0;
    e.iface.w2 = 0.0;
    e.iface.reaction = [](Pt, double, double) { return -1.0; };
    e.iface.L = 0.0;
    e.iface.mu = 0;
    return e;
}

} // namespace

Experiment make_experiment(const std::string& id, double eps) {
    if (id == "linear1")
        return linear1(eps);
    if (id == "linear2")
        return linear2(eps);
    if (id == "linear3")
        return linear3(eps);
    if (id == "linear4")
        return linear4(eps);
    if (id == "blowup1")
        return blowup_base(id, Rect{-4.0, -4.0, 4.0, 4.0}, [](Pt x) {
            return 10.0 * std::exp(-2.0 * (x.x * x.x + x.y * x.y));
        });
    if (id == "blowup2") {
        Experiment e = blowup_base(id, Rect{-4.0, -4.0, 4.0, 4.0}, [](Pt) { return 0.0; });
        e.pd.a = [](Pt, double) { return Pt{1.0, 1.0}; };
        e.semi.pd = e.pd;
        e.semi.f0 = [](Pt, double) { return -1.0; };
        return e;
    }
    if (id == "blowup3")
        return blowup_base(id, Rect{-8.0, -8.0, 8.0, 8.0}, [](Pt x) {
            const double r2 = x.x * x.x + x.y * x.y;
            return 10.0 * r2 * std::exp(-0.5 * r2);
        });
    if (id == "interface1")
        return interface1(eps);
    throw std::invalid_argument("unknown experiment id: " + id);
}

std::vector<std::string> experiment_ids() {
    return {"linear1", "linear2", "linear3", "linear4",
            "blowup1", "blowup2", "blowup3", "interface1"};
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (x[i] <= 0.0 || y[i] <= 0.0)
            continue;
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2)
        return 0.0;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace dgb
