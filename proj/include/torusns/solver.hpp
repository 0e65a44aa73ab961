#ifndef TORUSNS_SOLVER_HPP
#define TORUSNS_SOLVER_HPP

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "torusns/nonlinearity.hpp"
#include "torusns/parabolic.hpp"

namespace torusns {

enum class SolveMethod { picard, newton };

struct SolverConfig {
    double mu = 1.0;
    double horizon = 1.0;
    int steps = 16;
    double tol_fixed_point = 1e-10;
    double tol_linear = 1e-11;
    int max_iter = 200;
    SolveMethod method = SolveMethod::picard;
    double relaxation = 1.0;
    bool auto_project = false; // project u0 onto co-closed fields instead of erroring
    BilinearSpec bilinear{};

    ParabolicConfig parabolic() const { return {mu, horizon, steps, DuhamelQuadrature::exact_mode}; }

    void validate() const {
        parabolic().validate();
        if (tol_fixed_point <= 0.0 || tol_linear <= 0.0)
            throw std::invalid_argument("SolverConfig: tolerances must be positive");
        if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
        if (relaxation <= 0.0 || relaxation > 1.0)
            throw std::invalid_argument("SolverConfig: relaxation must be in (0, 1]");
    }
};

struct EnergyLedgerRow {
    double time;
    double kinetic;      // ||v||^2 / 2
    double dissipation;  // mu ||A v||^2
    double transport;    // (M_1(Av, v), v)
    double work;         // (f, v)
    double imbalance;    // d/dt kinetic + dissipation + transport - work
};

struct SolveReport {
    bool converged = false;
    int iterations = 0;
    std::vector<double> residual_history;
    double final_residual = 0.0;
    std::string message;
    std::vector<EnergyLedgerRow> energy_ledger;
};

/// Datum F = Psi(pi f, u0) of the mild fixed-point equation. u0 must be
/// co-closed up to 1e-6 relative (or auto_project must be set); F is then
/// co-closed at every node.
inline SpaceTimeField assemble_rhs(const SpaceTimeField& f, const FormField& u0,
                                   const SolverConfig& cfg) {
    cfg.validate();
    FormField u0s = u0.to(Repr::spectral);
    if (u0.degree() > 0) {
        const double defect = codifferential(u0s).l2_norm();
        if (defect > 1e-6 * std::max(1.0, u0s.l2_norm())) {
            if (!cfg.auto_project)
                throw std::invalid_argument("assemble_rhs: u0 is not co-closed (set auto_project)");
            u0s = leray_projection(u0s);
        }
    }
    SpaceTimeField pf = f.map([](const FormField& w) { return leray_projection(w.to(Repr::spectral)); });
    return cauchy_solve(pf, u0s, cfg.parabolic());
}

/// One application of the mild operator v -> Psi^{(v)} pi N(v).
inline SpaceTimeField mild_nonlinear_term(const SpaceTimeField& v, const SolverConfig& cfg) {
    SpaceTimeField nv = v.map([&](const FormField& w) { return projected_advect(w, cfg.bilinear); });
    return duhamel(nv, cfg.parabolic());
}

/// Linearized mild operator v -> Psi^{(v)} pi N'|_{u0(t)} v.
inline SpaceTimeField mild_linearized_term(const SpaceTimeField& lin_point, const SpaceTimeField& v,
                                           const SolverConfig& cfg) {
    lin_point.check_compatible(v);
    SpaceTimeField out = v;
    for (int m = 0; m <= v.steps(); ++m)
        out.frame(m) = projected_advect_derivative(lin_point.frame(m), v.frame(m), cfg.bilinear);
    return duhamel(out, cfg.parabolic());
}

/// Solves the linearized equation v + Psi pi N'|_{u0} v = F by Picard/Neumann
/// iteration. The operator is a compact perturbation of the identity; for the
/// short horizons used here the series converges geometrically.
inline SpaceTimeField solve_linearized(const SpaceTimeField& lin_point, const SpaceTimeField& F,
                                       const SolverConfig& cfg, SolveReport* report = nullptr) {
    cfg.validate();
    SpaceTimeField v = F;
    double res = 0.0;
    for (int it = 0; it < cfg.max_iter; ++it) {
        SpaceTimeField kv = mild_linearized_term(lin_point, v, cfg);
        SpaceTimeField residual = v + kv - F;
        res = residual.sup_l2_norm();
        if (report) report->residual_history.push_back(res);
        if (res <= cfg.tol_linear * std::max(1.0, F.sup_l2_norm())) {
            if (report) {
                report->converged = true;
                report->iterations = it + 1;
                report->final_residual = res;
            }
            return v;
        }
        v -= residual;
    }
    if (report) {
        report->converged = false;
        report->iterations = cfg.max_iter;
        report->final_residual = res;
        report->message = "linear iteration stagnated";
    }
    return v;
}

namespace detail {

/// Closed-form fast path when f and u0 carry only harmonic (k = 0) content:
/// the solution is the linear drift v(t) = u0 + int_0^t f(s) ds of the
/// harmonic modes (N vanishes on constants).
inline bool harmonic_only(const FormField& u) {
    const FormField us = u.to(Repr::spectral);
    double tail = 0.0;
    for (int c = 0; c < us.ncomp(); ++c)
        for (size_t p = 1; p < us.grid().size(); ++p) tail += std::norm(us.comp(c)[p]);
    return std::sqrt(tail) <= 1e-14 * std::max(1.0, us.l2_norm());
}

inline SpaceTimeField harmonic_drift(const SpaceTimeField& f, const FormField& u0) {
    SpaceTimeField v(f.grid(), f.degree(), f.horizon(), f.steps(), Repr::spectral);
    const FormField u0s = u0.to(Repr::spectral);
    const double h = f.dt();
    for (int c = 0; c < v.frame(0).ncomp(); ++c) {
        std::complex<double> acc = u0s.comp(c)[0];
        v.frame(0).comp(c)[0] = acc;
        for (int m = 1; m <= f.steps(); ++m) {
            acc += 0.5 * h *
                   (f.frame(m - 1).to(Repr::spectral).comp(c)[0] +
                    f.frame(m).to(Repr::spectral).comp(c)[0]);
            v.frame(m).comp(c)[0] = acc;
        }
    }
    return v;
}

} // namespace detail

/// Solves the mild fixed-point equation v + Psi^{(v)} pi N(v) = F.
/// Picard: v <- F - Psi pi N(v) with relaxation (halved automatically when the
/// residual grows). Newton: outer Newton-Kantorovich steps with the inner
/// linear system (I + Psi pi N'|_v) delta = -residual solved by the
/// linearized routine.
inline SpaceTimeField solve_fixed_point(const SpaceTimeField& F, const SolverConfig& cfg,
                                        SolveReport& report,
                                        const SpaceTimeField* initial_guess = nullptr) {
    cfg.validate();
    report = SolveReport{};
    const double scale = std::max(1.0, F.sup_l2_norm());
    SpaceTimeField v = initial_guess ? *initial_guess : F;
    double relax = cfg.relaxation;
    double prev_res = -1.0;
    int grow_count = 0;
    for (int it = 0; it < cfg.max_iter; ++it) {
        SpaceTimeField kv = mild_nonlinear_term(v, cfg);
        SpaceTimeField residual = v + kv - F;
        const double res = residual.sup_l2_norm();
        report.residual_history.push_back(res);
        if (res <= cfg.tol_fixed_point * scale) {
            report.converged = true;
            report.iterations = it + 1;
            report.final_residual = res;
            return v;
        }
        if (prev_res > 0.0 && res > prev_res) {
            relax = std::max(0.0625, relax * 0.5);
            if (res > 10.0 * prev_res) ++grow_count;
            if (grow_count >= 5) {
                report.converged = false;
                report.iterations = it + 1;
                report.final_residual = res;
                report.message = "diverging Picard iteration";
                return v;
            }
        }
        prev_res = res;
        if (cfg.method == SolveMethod::picard) {
            v -= relax * residual;
        } else {
            SolverConfig inner = cfg;
            inner.max_iter = std::max(cfg.max_iter, 50);
            SpaceTimeField minus_delta = solve_linearized(v, residual, inner);
            v -= minus_delta;
        }
    }
    report.converged = false;
    report.iterations = cfg.max_iter;
    report.final_residual = report.residual_history.back();
    report.message = "max_iter exceeded";
    return v;
}

struct ProblemSolution {
    SpaceTimeField v;
    SpaceTimeField p;
    SolveReport report;
};

inline SpaceTimeField recover_pressure(const SpaceTimeField& v, const SpaceTimeField& f,
                                       const SolverConfig& cfg);

/// End-to-end solve of the datum (f, u0): velocity, pressure, report.
/// Purely harmonic data short-circuit to the closed-form linear drift of the
/// k = 0 modes (the nonlinearity vanishes on constants, pressure is zero).
inline ProblemSolution solve_problem(const SpaceTimeField& f, const FormField& u0,
                                     const SolverConfig& cfg) {
    cfg.validate();
    ProblemSolution sol;
    bool harmonic = detail::harmonic_only(u0);
    for (int m = 0; m <= f.steps() && harmonic; ++m)
        harmonic = detail::harmonic_only(f.frame(m));
    if (harmonic) {
        sol.v = detail::harmonic_drift(f, u0);
        sol.p = SpaceTimeField(f.grid(), f.degree() - 1, f.horizon(), f.steps(), Repr::spectral);
        sol.report.converged = true;
        sol.report.message = "harmonic datum: closed-form drift";
        return sol;
    }
    const SpaceTimeField F = assemble_rhs(f, u0, cfg);
    sol.v = solve_fixed_point(F, cfg, sol.report);
    sol.p = recover_pressure(sol.v, f.map([](const FormField& w) { return w.to(Repr::spectral); }),
                             cfg);
    return sol;
}

/// Pressure recovery p = Phi_{i-1} (I - pi)(f - N(v)), node by node. p is
/// harmonic-free and co-closed, and A^{i-1} p = (I - pi)(f - N(v)).
inline SpaceTimeField recover_pressure(const SpaceTimeField& v, const SpaceTimeField& f,
                                       const SolverConfig& cfg) {
    v.check_compatible(f);
    SpaceTimeField p(v.grid(), v.degree() - 1, v.horizon(), v.steps(), Repr::spectral);
    for (int m = 0; m <= v.steps(); ++m) {
        FormField rhs = f.frame(m).to(Repr::spectral) - advect(v.frame(m), cfg.bilinear).to(Repr::spectral);
        FormField grad_part = rhs - leray_projection(rhs);
        p.frame(m) = potential_phi(grad_part);
    }
    return p;
}

struct ResidualRow {
    double time;
    double momentum;   // || L_mu v + N(v) + A p - f ||
    double div_v;      // || d* v ||
    double div_p;      // || d* p || (zero by convention for 0-form pressure)
    double initial;    // || v(0) - u0 || (only at t = 0)
};

/// PDE residual of a candidate solution, per time node.
inline std::vector<ResidualRow> pde_residual(const SpaceTimeField& v, const SpaceTimeField& p,
                                             const SpaceTimeField& f, const FormField& u0,
                                             const SolverConfig& cfg) {
    SpaceTimeField lv = parabolic_operator(
        v.map([](const FormField& w) { return w.to(Repr::spectral); }), cfg.mu);
    std::vector<ResidualRow> rows;
    for (int m = 0; m <= v.steps(); ++m) {
        ResidualRow row{};
        row.time = v.time(m);
        FormField momentum = lv.frame(m) + advect(v.frame(m), cfg.bilinear).to(Repr::spectral) -
                             f.frame(m).to(Repr::spectral);
        momentum += differential(p.frame(m)).to(Repr::spectral);
        row.momentum = momentum.l2_norm();
        row.div_v = codifferential(v.frame(m)).l2_norm();
        row.div_p = p.frame(m).degree() > 0 ? codifferential(p.frame(m)).l2_norm() : 0.0;
        row.initial = m == 0 ? (v.frame(0) - u0.to(v.frame(0).repr())).l2_norm() : 0.0;
        rows.push_back(row);
    }
    return rows;
}

/// Discrete energy balance d/dt ||v||^2/2 + mu ||Av||^2 + (M_1(Av,v), v) - (f,v).
inline std::vector<EnergyLedgerRow> energy_balance(const SpaceTimeField& v, const SpaceTimeField& f,
                                                   const SolverConfig& cfg) {
    v.check_compatible(f);
    std::vector<EnergyLedgerRow> rows;
    std::vector<double> kinetic(static_cast<size_t>(v.steps()) + 1);
    for (int m = 0; m <= v.steps(); ++m) {
        const double nrm = v.frame(m).l2_norm();
        kinetic[static_cast<size_t>(m)] = 0.5 * nrm * nrm;
    }
    const double h = v.dt();
    for (int m = 0; m <= v.steps(); ++m) {
        EnergyLedgerRow row{};
        row.time = v.time(m);
        row.kinetic = kinetic[static_cast<size_t>(m)];
        const FormField av = differential(v.frame(m));
        row.dissipation = cfg.mu * std::pow(av.l2_norm(), 2);
        const FormField vd = dealias(v.frame(m)).to(Repr::physical);
        row.transport = inner_product(m1(dealias(av).to(Repr::physical), vd, cfg.bilinear),
                                      vd);
        row.work = inner_product(f.frame(m).to(Repr::physical), v.frame(m).to(Repr::physical));
        double dkin;
        if (m == 0)
            dkin = (kinetic[1] - kinetic[0]) / h;
        else if (m == v.steps())
            dkin = (kinetic.back() - kinetic[kinetic.size() - 2]) / h;
        else
            dkin = (kinetic[static_cast<size_t>(m) + 1] - kinetic[static_cast<size_t>(m) - 1]) / (2 * h);
        row.imbalance = dkin + row.dissipation + row.transport - row.work;
        rows.push_back(row);
    }
    return rows;
}

struct StabilityRow {
    double delta;
    bool converged;
    double datum_change;    // ||(delta f, delta u0)|| in the diagnostic norm
    double solution_change; // ||(delta v, delta p)||
    double ratio;
};

struct StabilityResult {
    std::vector<StabilityRow> rows;
    double linearized_ratio = 0.0; // prediction from the linearized solve
};

/// Measures the open-mapping (stability) phenomenon: perturbs the datum by a
/// fixed co-closed random direction scaled to each delta, re-solves, and
/// records the solution-change/datum-change ratios. The perturbation
/// direction is drawn once per experiment (seeded) and reused across deltas.
/// The norm functional is supplied by the caller (anisotropic Hoelder
/// diagnostics in the CLI; plain sup-L2 in quick tests).
inline StabilityResult stability_experiment(
    const SpaceTimeField& f, const FormField& u0, const std::vector<double>& deltas,
    const SolverConfig& cfg, uint64_t seed,
    const std::function<double(const SpaceTimeField&)>& st_norm,
    const std::function<double(const FormField&)>& sp_norm) {
    StabilityResult result;
    SolveReport base_report;
    const SpaceTimeField f_s = f.map([](const FormField& w) { return w.to(Repr::spectral); });
    const FormField u0_s = u0.to(Repr::spectral);
    const SpaceTimeField F = assemble_rhs(f_s, u0_s, cfg);
    const SpaceTimeField v = solve_fixed_point(F, cfg, base_report);
    if (!base_report.converged)
        throw std::runtime_error("stability_experiment: base problem did not converge");
    const SpaceTimeField p = recover_pressure(v, f_s, cfg);

    std::mt19937_64 rng(seed);
    const Grid& g = f.grid();
    const FormField du0_dir = leray_projection(random_band_limited(g, f.degree(), rng));
    SpaceTimeField df_dir = SpaceTimeField::sample(f.horizon(), f.steps(), [&](double) {
        return leray_projection(random_band_limited(g, f.degree(), rng));
    });

    for (double delta : deltas) {
        if (delta == 0.0) continue;
        StabilityRow row{};
        row.delta = delta;
        SpaceTimeField f2 = f_s + delta * df_dir;
        FormField u02 = u0_s + delta * du0_dir;
        SolveReport rep;
        const SpaceTimeField F2 = assemble_rhs(f2, u02, cfg);
        const SpaceTimeField v2 = solve_fixed_point(F2, cfg, rep);
        row.converged = rep.converged;
        if (rep.converged) {
            const SpaceTimeField p2 = recover_pressure(v2, f2, cfg);
            row.datum_change = delta * (st_norm(df_dir) + sp_norm(du0_dir));
            row.solution_change = st_norm(v2 - v) + st_norm(p2 - p);
            row.ratio = row.solution_change / row.datum_change;
        }
        result.rows.push_back(row);
    }

    // Linearized prediction: (I + Psi pi N'|_v) dv = Psi(pi df, du0), and the
    // first-order pressure change dp = Phi (I - pi)(df - N'|_v dv).
    const SpaceTimeField dF = assemble_rhs(df_dir, du0_dir, cfg);
    const SpaceTimeField dv = solve_linearized(v, dF, cfg);
    SpaceTimeField dp(g, f.degree() - 1, f.horizon(), f.steps(), Repr::spectral);
    for (int m = 0; m <= f.steps(); ++m) {
        FormField rhs = df_dir.frame(m).to(Repr::spectral) -
                        advect_derivative(v.frame(m), dv.frame(m), cfg.bilinear).to(Repr::spectral);
        dp.frame(m) = potential_phi(rhs - leray_projection(rhs));
    }
    result.linearized_ratio =
        (st_norm(dv) + st_norm(dp)) / (st_norm(df_dir) + sp_norm(du0_dir));
    return result;
}

} // namespace torusns

#endif
