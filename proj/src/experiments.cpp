#include <algorithm>
#include <cmath>

#include "dtnlab/commutator.hpp"
#include "dtnlab/geometry.hpp"
#include "dtnlab/identities.hpp"
#include "dtnlab/kernels.hpp"
#include "dtnlab/measures.hpp"
#include "dtnlab/reports.hpp"
#include "dtnlab/spectral.hpp"
#include "dtnlab/stokes.hpp"

namespace dtnlab {

namespace {

BoundaryField cos_mode_f(const BoundaryGrid& grid, int k = 1) {
    std::vector<cdouble> s1(grid.n, cdouble{0.0}), s2(grid.n, cdouble{0.0});
    s1[grid.slot_of_mode(k)] = 0.5;
    s1[grid.slot_of_mode(-k)] = 0.5;
    return BoundaryField::from_spectrum(grid, {std::move(s1), std::move(s2)});
}

BoundaryField cos_eta(const BoundaryGrid& grid) {
    std::vector<cdouble> sp(grid.n, cdouble{0.0});
    sp[grid.slot_of_mode(1)] = 0.5;
    sp[grid.slot_of_mode(-1)] = 0.5;
    return BoundaryField::from_spectrum(grid, {std::move(sp)});
}

double rel_diff(const BoundaryField& a, const BoundaryField& b) {
    double scale = std::max(l2_norm(a), l2_norm(b));
    return scale > 0.0 ? l2_norm(sub(a, b)) / scale : 0.0;
}

// eigenvalues of a Hermitian 2x2 matrix
std::pair<double, double> herm_eigs(const Mat2& m) {
    const double a = m.a11.real(), d = m.a22.real();
    const double off = std::abs(m.a12);
    const double mid = 0.5 * (a + d);
    const double rad = std::sqrt(0.25 * (a - d) * (a - d) + off * off);
    return {mid - rad, mid + rad};
}

double hermitian_defect(const Mat2& m) {
    return std::max({std::abs(m.a11 - std::conj(m.a11)), std::abs(m.a12 - std::conj(m.a21)),
                     std::abs(m.a22 - std::conj(m.a22))});
}

}  // namespace

RunReport run_dtn_verify(const ExperimentConfig& cfg) {
    RunReport rep;
    rep.config = cfg;
    BoundaryGrid grid(cfg.n, cfg.L);

    // solver exactness on seeded data
    double worst_mom = 0.0, worst_div = 0.0, worst_trace = 0.0;
    for (int t = 0; t < 5; ++t) {
        BoundaryField f = random_f2(grid, cfg.band_limit, cfg.seed, t);
        StreamSolution sol(f);
        StokesResidual r = residual_stokes(sol, {0.1, 0.5, 1.0, 2.0});
        const double scale = std::max(r.scale, 1e-300);
        worst_mom = std::max(worst_mom, r.momentum / scale);
        worst_div = std::max(worst_div, r.divergence / scale);
        worst_trace = std::max(worst_trace, rel_diff(eval_fields(sol, 0.0), f));
    }
    rep.records.push_back(check_le("stokes_residual_momentum_rel", worst_mom, 1e-10));
    rep.records.push_back(check_le("stokes_residual_divergence_rel", worst_div, 1e-10));
    rep.records.push_back(check_le("boundary_trace_error_rel", worst_trace, 1e-10));

    // symbol checks over |k| <= min(128, n/2), at L = config L
    CsvTable symtab{"dtn_symbol", {"k", "eig_lo", "eig_hi", "hermitian_defect"}, {}};
    const int kmax = std::min(128, cfg.n / 2);
    double worst_herm = 0.0, worst_eig = 0.0, m0_norm = 0.0;
    {
        Mat2 m0 = dtn_symbol(0.0);
        m0_norm = std::max({std::abs(m0.a11), std::abs(m0.a12), std::abs(m0.a21), std::abs(m0.a22)});
    }
    for (int k = 1; k <= kmax; ++k) {
        const double kappa = grid.kappa(k);
        Mat2 m = dtn_symbol(kappa);
        auto [lo, hi] = herm_eigs(m);
        const double herm = hermitian_defect(m);
        const double ak = std::abs(kappa);
        worst_herm = std::max(worst_herm, herm);
        worst_eig = std::max({worst_eig, std::abs(lo - ak) / ak, std::abs(hi - 3.0 * ak) / (3.0 * ak)});
        symtab.rows.push_back({csv_cell(k), csv_cell(lo), csv_cell(hi), csv_cell(herm)});
    }
    rep.records.push_back(check_le("dtn_symbol_zero_mode", m0_norm, 0.0));
    rep.records.push_back(check_le("dtn_symbol_hermitian_defect", worst_herm, 1e-12));
    rep.records.push_back(check_le("dtn_symbol_eigenvalue_rel_err", worst_eig, 1e-12));
    rep.tables.push_back(std::move(symtab));

    // energy identity: closed-form case and seeded ensemble
    CsvTable entab{"dtn_energy", {"trial", "boundary_pairing", "volume_energy", "rel_gap"}, {}};
    EnergyCheck closed = dtn_energy_check(cos_mode_f(grid));
    const double two_pi = 2.0 * kPi;
    rep.records.push_back(
        check_le("energy_cosx_boundary_vs_2pi", std::abs(closed.boundary_pairing - two_pi), 1e-10));
    rep.records.push_back(
        check_le("energy_cosx_volume_vs_2pi", std::abs(closed.volume_energy - two_pi), 1e-10));
    entab.rows.push_back({csv_cell(-1), csv_cell(closed.boundary_pairing),
                          csv_cell(closed.volume_energy), csv_cell(closed.rel_gap)});
    double worst_gap = 0.0;
    for (int t = 0; t < 20; ++t) {
        BoundaryField f = random_f2(grid, cfg.band_limit, cfg.seed, 100 + t);
        EnergyCheck e = dtn_energy_check(f);
        worst_gap = std::max(worst_gap, e.rel_gap);
        entab.rows.push_back({csv_cell(t), csv_cell(e.boundary_pairing), csv_cell(e.volume_energy),
                              csv_cell(e.rel_gap)});
    }
    rep.records.push_back(check_le("energy_identity_rel_gap", worst_gap, 1e-10));
    rep.tables.push_back(std::move(entab));

    // Hilbert-transform form of the symbol
    CsvTable hilb{"hilbert_form", {"trial", "rel_dev_corrected", "rel_dev_paper_literal"}, {}};
    double worst_dev = 0.0, min_literal_dev = 1e300;
    for (int t = 0; t < 10; ++t) {
        BoundaryField f = random_f2(grid, cfg.band_limit, cfg.seed, 200 + t);
        const double dev = rel_diff(dtn_hilbert_form(f), apply_dtn(f));
        const double lit = rel_diff(apply_dtn_paper_literal(f), apply_dtn(f));
        worst_dev = std::max(worst_dev, dev);
        min_literal_dev = std::min(min_literal_dev, lit);
        hilb.rows.push_back({csv_cell(t), csv_cell(dev), csv_cell(lit)});
    }
    rep.records.push_back(check_le("hilbert_form_equals_dtn", worst_dev, 1e-12));
    if (cfg.paper_literal)
        rep.records.push_back(
            check_ge("paper_literal_symbol_deviates", min_literal_dev, 1e-1));
    rep.tables.push_back(std::move(hilb));
    return rep;
}

RunReport run_commutator_sweep(const ExperimentConfig& cfg) {
    RunReport rep;
    rep.config = cfg;
    BoundaryGrid grid(cfg.n, cfg.L);

    SweepConfig sc{cfg.seed, cfg.trials, cfg.band_limit, cfg.n, cfg.L, cfg.p};
    SweepReport base = ensemble_sweep(sc);
    SweepConfig sc2 = sc;
    sc2.n = 2 * cfg.n;
    SweepReport fine = ensemble_sweep(sc2);

    CsvTable trials{"sweep_trials", {"trial", "ratio_n", "ratio_2n"}, {}};
    for (int t = 0; t < cfg.trials; ++t)
        trials.rows.push_back({csv_cell(t), csv_cell(base.ratios[t]), csv_cell(fine.ratios[t])});
    rep.tables.push_back(std::move(trials));

    const double drift = std::abs(fine.max_ratio - base.max_ratio) / base.max_ratio;
    rep.records.push_back(check_ge("sweep_max_ratio_finite",
                                   std::isfinite(base.max_ratio) ? 1.0 : 0.0, 1.0));
    rep.records.push_back(check_le("sweep_max_ratio_drift_n_doubling", drift, 0.10));

    // frequency scan for eta = cos x
    BoundaryField eta = cos_eta(grid);
    auto scan = frequency_scan(eta, cfg.n / 4);
    CsvTable scantab{"frequency_scan", {"k", "ratio"}, {}};
    for (size_t i = 0; i < scan.size(); ++i)
        scantab.rows.push_back({csv_cell(static_cast<double>(i + 1)), csv_cell(scan[i])});
    rep.tables.push_back(std::move(scantab));
    rep.records.push_back(check_le("frequency_scan_plateau", plateau_statistic(scan), 1.5));

    // Calderon commutator on pure modes
    CsvTable caltab{"calderon_scan", {"k", "ratio"}, {}};
    std::vector<double> cal(cfg.n / 4, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int k = 1; k <= cfg.n / 4; ++k) {
        std::vector<cdouble> sp(grid.n, cdouble{0.0});
        sp[grid.slot_of_mode(k)] = 0.5;
        sp[grid.slot_of_mode(-k)] = 0.5;
        auto gk = BoundaryField::from_spectrum(grid, {std::move(sp)});
        cal[k - 1] = calderon_commutator(eta, gk).ratio;
    }
    for (int k = 1; k <= cfg.n / 4; ++k)
        caltab.rows.push_back({csv_cell(k), csv_cell(cal[k - 1])});
    rep.tables.push_back(std::move(caltab));
    double cal_max = 0.0;
    for (double r : cal) cal_max = std::max(cal_max, r);
    rep.records.push_back(check_ge("calderon_ratio_finite", std::isfinite(cal_max) ? 1.0 : 0.0, 1.0));
    rep.records.push_back(check_le("calderon_plateau", plateau_statistic(cal), 1.5));
    const double const_ratio =
        calderon_commutator(add_constant(BoundaryField::zero(grid, 1), 1.0),
                            random_scalar(grid, cfg.band_limit, cfg.seed, 0))
            .ratio;
    rep.records.push_back(check_le("calderon_constant_eta_exact_zero", const_ratio, 0.0));

    // L^p variants across the exponent range
    CsvTable ptab{"lp_ratios", {"p", "max_ratio"}, {}};
    for (double pval : {1.5, 2.0, 3.0, 4.0}) {
        SweepConfig sp = sc;
        sp.p = pval;
        sp.trials = std::min(cfg.trials, 25);
        SweepReport r = ensemble_sweep(sp);
        ptab.rows.push_back({csv_cell(pval), csv_cell(r.max_ratio)});
        rep.records.push_back(check_ge("lp_ratio_finite_p" + csv_cell(pval),
                                       std::isfinite(r.max_ratio) ? 1.0 : 0.0, 1.0));
    }
    rep.tables.push_back(std::move(ptab));
    return rep;
}

RunReport run_identity_check(const ExperimentConfig& cfg) {
    RunReport rep;
    rep.config = cfg;
    BoundaryGrid grid(cfg.n, cfg.L);
    GradedGrid gg = make_graded_grid(grid, cfg.y_levels, cfg.resolved_Y(), -1.0, QuadRule::gauss);

    CsvTable tab{"identity_residuals",
                 {"case", "extension", "lhs", "rhs_total", "abs_residual", "rel_residual",
                  "tail_bound"},
                 {}};

    auto push = [&](const char* name, const char* ext, const IdentityReport& r) {
        tab.rows.push_back({name, ext, csv_cell(r.lhs), csv_cell(r.rhs_total),
                            csv_cell(r.abs_residual), csv_cell(r.rel_residual),
                            csv_cell(r.tail_bound)});
    };

    double worst_key = 0.0, worst_pressure = 0.0, worst_dahlberg = 0.0;
    const int cases = std::max(1, std::min(cfg.trials, 10));
    for (int t = 0; t < cases; ++t) {
        BoundaryField f = random_f2(grid, cfg.band_limit, cfg.seed, 300 + t);
        BoundaryField g = random_f2(grid, cfg.band_limit, cfg.seed, 400 + t);
        BoundaryField eta = random_eta(grid, cfg.band_limit, cfg.seed, 500 + t);
        for (auto kind : {ExtensionKind::mollifier, ExtensionKind::harmonic}) {
            EtaExtension ext(eta, kind);
            auto [key, pre] = identity_pair_check(f, g, ext, gg);
            const char* kname = kind == ExtensionKind::mollifier ? "mollifier" : "harmonic";
            push("key_identity", kname, key);
            push("pressure_identity", kname, pre);
            worst_key = std::max(worst_key, key.rel_residual);
            worst_pressure = std::max(worst_pressure, pre.rel_residual);
        }
        SmoothCutoff cutoff{0.25 * cfg.resolved_Y(), 0.8 * cfg.resolved_Y()};
        SeparableTestField v =
            SeparableTestField::random(grid, cfg.band_limit, cfg.seed, 600 + t, cutoff);
        IdentityReport dal = dahlberg_identity_check(g, v, gg);
        push("dahlberg_identity_separable", "-", dal);
        worst_dahlberg = std::max(worst_dahlberg, dal.rel_residual);

        GradEtaTimesSolution vsub(EtaExtension(eta, ExtensionKind::mollifier), StreamSolution(g));
        IdentityReport dal2 = dahlberg_identity_check(g, vsub, gg);
        push("dahlberg_identity_grad_eta_h", "mollifier", dal2);
        worst_dahlberg = std::max(worst_dahlberg, dal2.rel_residual);
    }
    rep.records.push_back(check_le("key_identity_rel_residual", worst_key, 1e-6));
    rep.records.push_back(check_le("pressure_identity_rel_residual", worst_pressure, 1e-6));
    rep.records.push_back(check_le("dahlberg_identity_rel_residual", worst_dahlberg, 1e-6));

    // trivial cases are exactly zero
    {
        BoundaryField f = random_f2(grid, cfg.band_limit, cfg.seed, 310);
        BoundaryField g = random_f2(grid, cfg.band_limit, cfg.seed, 410);
        BoundaryField one = add_constant(BoundaryField::zero(grid, 1), 1.0);
        EtaExtension ext(one, ExtensionKind::mollifier);
        IdentityReport key = key_identity_check(f, g, ext, gg);
        push("key_identity_eta_const", "mollifier", key);
        rep.records.push_back(check_le("key_identity_constant_eta_zero", key.abs_residual, 1e-11));
        IdentityReport pre = pressure_identity_check(f, g, ext, gg);
        rep.records.push_back(
            check_le("pressure_identity_constant_eta_zero", std::abs(pre.lhs), 1e-12));

        std::array<std::array<BoundaryField, 2>, 2> zeros{
            {{BoundaryField::zero(grid, 1), BoundaryField::zero(grid, 1)},
             {BoundaryField::zero(grid, 1), BoundaryField::zero(grid, 1)}}};
        SeparableTestField vzero(grid, std::move(zeros),
                                 SmoothCutoff{0.25 * cfg.resolved_Y(), 0.8 * cfg.resolved_Y()});
        IdentityReport dal0 = dahlberg_identity_check(g, vzero, gg);
        rep.records.push_back(check_le("dahlberg_identity_zero_field_zero",
                                       std::abs(dal0.lhs) + std::abs(dal0.rhs_total), 0.0));
    }

    // residual order under doubling of the t-quadrature (trapezoid shows clean order 2)
    CsvTable order{"identity_order", {"levels", "rel_residual"}, {}};
    {
        BoundaryField f = random_f2(grid, cfg.band_limit, cfg.seed, 320);
        BoundaryField g = random_f2(grid, cfg.band_limit, cfg.seed, 420);
        EtaExtension ext(random_eta(grid, cfg.band_limit, cfg.seed, 520),
                         ExtensionKind::mollifier);
        std::vector<double> residuals;
        std::vector<int> levels = {cfg.y_levels / 4, cfg.y_levels / 2, cfg.y_levels,
                                   2 * cfg.y_levels};
        for (int M : levels) {
            GradedGrid gt = make_graded_grid(grid, M, cfg.resolved_Y(), -1.0, QuadRule::trapezoid);
            IdentityReport r = key_identity_check(f, g, ext, gt);
            residuals.push_back(r.rel_residual);
            order.rows.push_back({csv_cell(M), csv_cell(r.rel_residual)});
        }
        double worst_order = 1e300;
        for (size_t i = 0; i + 1 < residuals.size(); ++i)
            worst_order = std::min(worst_order, std::log2(residuals[i] / residuals[i + 1]));
        rep.records.push_back(check_ge("identity_residual_order", worst_order, 2.0));
    }
    rep.tables.push_back(std::move(tab));
    rep.tables.push_back(std::move(order));

    // estimate-ratio ensembles, stability measured against a doubled t-quadrature
    {
        GradedGrid gg2 = refine(gg, 2);
        RatioEnsemble ba = bilinear_ratio_ensemble(grid, gg, cfg.band_limit, cfg.seed, 5, 10, cfg.N0);
        RatioEnsemble bb =
            bilinear_ratio_ensemble(grid, gg2, cfg.band_limit, cfg.seed, 5, 10, cfg.N0);
        CsvTable btab{"bilinear_ratios", {"trial", "ratio", "ratio_refined"}, {}};
        for (size_t i = 0; i < ba.ratios.size(); ++i)
            btab.rows.push_back({csv_cell(static_cast<double>(i)), csv_cell(ba.ratios[i]),
                                 csv_cell(bb.ratios[i])});
        rep.tables.push_back(std::move(btab));
        rep.records.push_back(check_ge("bilinear_ratio_max_finite",
                                       std::isfinite(ba.max_ratio) ? 1.0 : 0.0, 1.0));
        rep.records.push_back(check_le("bilinear_ratio_refinement_drift",
                                       std::abs(bb.max_ratio - ba.max_ratio) / ba.max_ratio, 0.10));

        RatioEnsemble qa = q_eta_h_ratio_ensemble(grid, gg, cfg.band_limit, cfg.seed, 12, cfg.N0);
        RatioEnsemble qb = q_eta_h_ratio_ensemble(grid, gg2, cfg.band_limit, cfg.seed, 12, cfg.N0);
        CsvTable qtab{"q_eta_h_ratios", {"trial", "ratio", "ratio_refined"}, {}};
        for (size_t i = 0; i < qa.ratios.size(); ++i)
            qtab.rows.push_back({csv_cell(static_cast<double>(i)), csv_cell(qa.ratios[i]),
                                 csv_cell(qb.ratios[i])});
        rep.tables.push_back(std::move(qtab));
        rep.records.push_back(check_ge("q_eta_h_ratio_max_finite",
                                       std::isfinite(qa.max_ratio) ? 1.0 : 0.0, 1.0));
        rep.records.push_back(check_le("q_eta_h_ratio_refinement_drift",
                                       std::abs(qb.max_ratio - qa.max_ratio) / qa.max_ratio, 0.10));
    }
    return rep;
}

RunReport run_square_report(const ExperimentConfig& cfg) {
    RunReport rep;
    rep.config = cfg;
    BoundaryGrid grid(cfg.n, cfg.L);
    GradedGrid gg = make_graded_grid(grid, cfg.y_levels, cfg.resolved_Y(), -1.0, QuadRule::gauss);

    CsvTable tab{"square_functions",
                 {"case", "grad_u_sq_t", "nt_max_u_sq", "grad_q_sq_t3", "q_sq_t", "boundary_u_sq",
                  "ratio_grad_u_vs_nt", "ratio_q_vs_boundary"},
                 {}};

    SquareFunctionReport closed = square_bound_report(cos_mode_f(grid), gg, cfg.N0);
    tab.rows.push_back({"cos_mode", csv_cell(closed.grad_u_sq_t), csv_cell(closed.nt_max_u_sq),
                        csv_cell(closed.grad_q_sq_t3), csv_cell(closed.q_sq_t),
                        csv_cell(closed.boundary_u_sq), csv_cell(closed.ratio_grad_u_vs_nt),
                        csv_cell(closed.ratio_q_vs_boundary)});
    rep.records.push_back(
        check_le("square_grad_u_t_vs_pi", std::abs(closed.grad_u_sq_t - kPi) / kPi, 5e-3));
    rep.records.push_back(check_le("square_q_t_vs_pi", std::abs(closed.q_sq_t - kPi) / kPi, 5e-3));

    bool chain_all = true;
    double chain_lo = 1e300, chain_hi = 0.0;
    for (int t = 0; t < 20; ++t) {
        BoundaryField f = random_f2(grid, cfg.band_limit, cfg.seed, 700 + t);
        SquareFunctionReport r = square_bound_report(f, gg, cfg.N0);
        chain_all = chain_all && r.chain_holds;
        if (r.q_sq_t > 0.0) {
            chain_lo = std::min(chain_lo, r.grad_q_sq_t3 / r.q_sq_t);
            chain_hi = std::max(chain_hi, r.grad_q_sq_t3 / r.q_sq_t);
        }
        tab.rows.push_back({"random_" + std::to_string(t), csv_cell(r.grad_u_sq_t),
                            csv_cell(r.nt_max_u_sq), csv_cell(r.grad_q_sq_t3), csv_cell(r.q_sq_t),
                            csv_cell(r.boundary_u_sq), csv_cell(r.ratio_grad_u_vs_nt),
                            csv_cell(r.ratio_q_vs_boundary)});
    }
    // strict form of the chain; the measured constant sits at exactly 3 for every
    // decaying harmonic pressure (2|grad q|^2 = Lap(q^2) integrated against t^3),
    // so this stays red and the constant records carry the actual content
    rep.records.push_back(check_ge("square_chain_gradq_t3_le_q_t", chain_all ? 1.0 : 0.0, 1.0));
    rep.records.push_back(check_le("square_chain_constant_max", chain_hi, 3.0 + 1e-7));
    rep.records.push_back(check_ge("square_chain_constant_min", chain_lo, 3.0 - 1e-7));
    rep.tables.push_back(std::move(tab));
    return rep;
}

RunReport run_carleson_report(const ExperimentConfig& cfg) {
    RunReport rep;
    rep.config = cfg;
    BoundaryGrid grid(cfg.n, cfg.L);
    GradedGrid gg = make_graded_grid(grid, cfg.y_levels, cfg.resolved_Y());
    TentFamily tents = make_tents(grid);

    BoundaryGrid grid2(2 * cfg.n, cfg.L);
    GradedGrid gg2 = make_graded_grid(grid2, 2 * cfg.y_levels, cfg.resolved_Y());

    CsvTable tab{"carleson_norms",
                 {"case", "density", "norm", "norm_refined", "drift"},
                 {}};
    double worst_drift = 0.0;
    bool all_finite = true;
    for (int t = 0; t < 3; ++t) {
        BoundaryField f = t == 0 ? cos_mode_f(grid)
                                 : random_f2(grid, cfg.band_limit, cfg.seed, 800 + t);
        BoundaryField f2 = t == 0 ? cos_mode_f(grid2)
                                  : BoundaryField::from_spectrum(
                                        grid2, {[&] {
                                                    std::vector<cdouble> s(grid2.n, cdouble{0.0});
                                                    for (int k = -cfg.n / 2 + 1; k < cfg.n / 2; ++k)
                                                        s[grid2.slot_of_mode(k)] =
                                                            f.spectrum(0)[grid.slot_of_mode(k)];
                                                    return s;
                                                }(),
                                                [&] {
                                                    std::vector<cdouble> s(grid2.n, cdouble{0.0});
                                                    for (int k = -cfg.n / 2 + 1; k < cfg.n / 2; ++k)
                                                        s[grid2.slot_of_mode(k)] =
                                                            f.spectrum(1)[grid.slot_of_mode(k)];
                                                    return s;
                                                }()});
        StreamSolution sol(f), sol2(f2);
        const std::string base = t == 0 ? "cos_mode" : "random_" + std::to_string(t);
        struct Density {
            const char* name;
            LevelSampler coarse, fine;
        };
        auto with_t = [](LevelSampler inner) {
            return [inner](double y) {
                std::vector<double> s = inner(y);
                for (double& v : s) v *= y;
                return s;
            };
        };
        std::vector<Density> densities;
        densities.push_back({"grad_u_sq_t", with_t(grad_u_sq_sampler(sol)),
                             with_t(grad_u_sq_sampler(sol2))});
        densities.push_back({"q_sq_t", with_t(q_sq_sampler(sol)), with_t(q_sq_sampler(sol2))});
        for (auto& d : densities) {
            const double norm = carleson_norm(gg, tents, d.coarse).norm;
            const double norm2 = carleson_norm(gg2, tents, d.fine).norm;
            const double drift = norm > 0.0 ? std::abs(norm2 - norm) / norm : 0.0;
            worst_drift = std::max(worst_drift, drift);
            all_finite = all_finite && std::isfinite(norm) && std::isfinite(norm2);
            tab.rows.push_back(
                {base, d.name, csv_cell(norm), csv_cell(norm2), csv_cell(drift)});
        }
    }
    rep.records.push_back(check_ge("carleson_norms_finite", all_finite ? 1.0 : 0.0, 1.0));
    rep.records.push_back(check_le("carleson_refinement_drift", worst_drift, 0.10));
    rep.tables.push_back(std::move(tab));

    // full per-tent table for the cosine-mode |grad u|^2 t density
    {
        StreamSolution sol(cos_mode_f(grid));
        auto inner = grad_u_sq_sampler(sol);
        LevelSampler density = [inner](double y) {
            std::vector<double> s = inner(y);
            for (double& v : s) v *= y;
            return s;
        };
        CarlesonResult cr = carleson_norm(gg, tents, density);
        CsvTable ttab{"carleson_tents", {"level", "index", "length", "measure", "ratio"}, {}};
        for (const auto& r : cr.table)
            ttab.rows.push_back({csv_cell(r.level), csv_cell(r.index), csv_cell(r.length),
                                 csv_cell(r.measure), csv_cell(r.ratio)});
        rep.tables.push_back(std::move(ttab));
    }

    // mollifier extension: homogeneity of the reported norms in ||eta||
    BoundaryField eta = random_eta(grid, cfg.band_limit, cfg.seed, 900);
    BumpSpec bump = BumpSpec::standard();
    ExtensionReport e1 = lipschitz_extension_report(eta, bump, gg, tents);
    const double lambda = 3.75;
    ExtensionReport e2 = lipschitz_extension_report(scale(eta, lambda), bump, gg, tents);
    const double hom1 = std::abs(e2.grad_sup - lambda * e1.grad_sup) /
                        std::max(1e-300, lambda * e1.grad_sup);
    const double hom2 = std::abs(e2.carleson_hess_t - lambda * e1.carleson_hess_t) /
                        std::max(1e-300, lambda * e1.carleson_hess_t);
    const double hom3 =
        std::abs(e2.carleson_hess_sq_t - lambda * lambda * e1.carleson_hess_sq_t) /
        std::max(1e-300, lambda * lambda * e1.carleson_hess_sq_t);
    rep.records.push_back(check_le("extension_grad_homogeneity", hom1, 1e-10));
    rep.records.push_back(check_le("extension_carleson_t_homogeneity", hom2, 1e-10));
    rep.records.push_back(check_le("extension_carleson_sq_t_homogeneity", hom3, 1e-10));
    CsvTable etab{"lipschitz_extension_report",
                  {"case", "lip_eta", "grad_sup", "grad_ratio", "carleson_hess_t",
                   "carleson_hess_sq_t", "trace_sup_err"},
                  {}};
    etab.rows.push_back({"eta", csv_cell(e1.lip_eta), csv_cell(e1.grad_sup),
                         csv_cell(e1.grad_ratio), csv_cell(e1.carleson_hess_t),
                         csv_cell(e1.carleson_hess_sq_t), csv_cell(e1.trace_sup_err)});
    etab.rows.push_back({"scaled_eta", csv_cell(e2.lip_eta), csv_cell(e2.grad_sup),
                         csv_cell(e2.grad_ratio), csv_cell(e2.carleson_hess_t),
                         csv_cell(e2.carleson_hess_sq_t), csv_cell(e2.trace_sup_err)});
    rep.tables.push_back(std::move(etab));
    return rep;
}

RunReport run_kenig_stein_check(const ExperimentConfig& cfg) {
    RunReport rep;
    rep.config = cfg;
    BoundaryGrid grid(cfg.n, cfg.L);
    GradedGrid gg = make_graded_grid(grid, cfg.y_levels, cfg.resolved_Y());
    TentFamily tents = make_tents(grid);
    BoundaryGrid grid2(2 * cfg.n, cfg.L);
    GradedGrid gg2 = make_graded_grid(grid2, 2 * cfg.y_levels, cfg.resolved_Y());
    BumpSpec bump = BumpSpec::standard();

    CsvTable tab{"kenig_stein",
                 {"graph", "c0", "min_phi_t", "bilip_lower", "bilip_upper", "carleson_hess_sq_t",
                  "carleson_refined", "drift"},
                 {}};

    struct Graph {
        std::string name;
        BoundaryField psi, psi2;
    };
    std::vector<Graph> graphs;
    graphs.push_back({"flat", BoundaryField::zero(grid, 1), BoundaryField::zero(grid2, 1)});
    graphs.push_back({"sawtooth_0.5", make_smooth_sawtooth(grid, 0.5, 9),
                      make_smooth_sawtooth(grid2, 0.5, 9)});
    graphs.push_back({"sawtooth_1.0", make_smooth_sawtooth(grid, 1.0, 9),
                      make_smooth_sawtooth(grid2, 1.0, 9)});

    double min_phi_t = 1e300, worst_drift = 0.0, flat_hess = -1.0;
    C0Policy policy = cfg.c0_auto ? C0Policy{} : C0Policy::fixed(cfg.c0_value);
    for (const auto& g : graphs) {
        KenigSteinMap map = build_map(g.psi, bump, gg, policy);
        MapVerification v = verify_map(map, gg, tents);
        KenigSteinMap map2(g.psi2, bump, map.c0());
        MapVerification v2 = verify_map(map2, gg2, tents);
        const double drift = v.carleson_hess_sq_t > 0.0
                                 ? std::abs(v2.carleson_hess_sq_t - v.carleson_hess_sq_t) /
                                       v.carleson_hess_sq_t
                                 : std::abs(v2.carleson_hess_sq_t);
        min_phi_t = std::min(min_phi_t, v.min_phi_t);
        worst_drift = std::max(worst_drift, drift);
        if (g.name == "flat") flat_hess = v.carleson_hess_sq_t;
        tab.rows.push_back({g.name, csv_cell(v.c0), csv_cell(v.min_phi_t),
                            csv_cell(v.bilip_lower), csv_cell(v.bilip_upper),
                            csv_cell(v.carleson_hess_sq_t), csv_cell(v2.carleson_hess_sq_t),
                            csv_cell(drift)});
    }
    rep.records.push_back(check_ge("kenig_stein_min_phi_t", min_phi_t, 0.125));
    rep.records.push_back(check_le("kenig_stein_carleson_drift", worst_drift, 0.10));
    rep.records.push_back(check_le("kenig_stein_flat_hessian_zero", flat_hess, 0.0));
    rep.tables.push_back(std::move(tab));

    // each derivative order validated by an O(h^2) central difference of the
    // next-lower analytic evaluator (second differences of phi itself sit on a
    // cancellation floor above the gate)
    KenigSteinMap map = build_map(make_smooth_sawtooth(grid, 0.5, 5), bump, gg, policy);
    const double h = 1e-4;
    double worst_fd = 0.0;
    for (double x : {0.3, 1.1, 2.9}) {
        for (double t : {0.2, 0.7, 1.9}) {
            auto c = map.at(x, t);
            auto xp = map.at(x + h, t), xm = map.at(x - h, t);
            auto tp = map.at(x, t + h), tm = map.at(x, t - h);
            const double fd_t = (tp.phi - tm.phi) / (2.0 * h);
            const double fd_x = (xp.phi - xm.phi) / (2.0 * h);
            const double fd_xx = (xp.phi_x - xm.phi_x) / (2.0 * h);
            const double fd_tt = (tp.phi_t - tm.phi_t) / (2.0 * h);
            const double fd_xt = (tp.phi_x - tm.phi_x) / (2.0 * h);
            const double fd_tx = (xp.phi_t - xm.phi_t) / (2.0 * h);
            worst_fd = std::max({worst_fd, std::abs(fd_t - c.phi_t), std::abs(fd_x - c.phi_x),
                                 std::abs(fd_xx - c.phi_xx), std::abs(fd_tt - c.phi_tt),
                                 std::abs(fd_xt - c.phi_xt), std::abs(fd_tx - c.phi_xt)});
        }
    }
    rep.records.push_back(check_le("map_derivatives_vs_central_differences", worst_fd, 1e-6));
    return rep;
}

RunReport run_kernel_check(const ExperimentConfig& cfg) {
    RunReport rep;
    rep.config = cfg;

    // Stokeslet value and the PDE residual convergence order
    FundamentalSolution fs = fundamental_solution({1.0, 0.0, 0.0});
    rep.records.push_back(check_le("stokeslet_gamma11_vs_quarter_inv_pi",
                                   std::abs(fs.gamma[0][0] - 1.0 / (4.0 * kPi)), 1e-12));

    CsvTable restab{"kernel_residuals", {"h", "momentum", "divergence"}, {}};
    std::vector<double> steps = {4e-3, 2e-3, 1e-3};
    std::vector<KernelResidual> residuals;
    for (double h : steps) {
        KernelResidual r = kernel_residual({1.0, 0.0, 0.0}, h);
        residuals.push_back(r);
        restab.rows.push_back({csv_cell(h), csv_cell(r.momentum), csv_cell(r.divergence)});
    }
    rep.tables.push_back(std::move(restab));
    double min_order = 1e300;
    for (size_t i = 0; i + 1 < residuals.size(); ++i) {
        min_order = std::min(min_order,
                             std::log2(residuals[i].momentum / residuals[i + 1].momentum));
        min_order = std::min(min_order,
                             std::log2(residuals[i].divergence / residuals[i + 1].divergence));
    }
    rep.records.push_back(check_ge("kernel_residual_order", min_order, 1.9));
    rep.records.push_back(check_le("kernel_residual_at_1e-3", residuals.back().momentum, 1e-4));

    // W field: harmonicity residual under mesh refinement
    auto density_for = [](const SurfaceMesh& mesh) {
        std::vector<std::array<double, 3>> d(mesh.size());
        for (size_t i = 0; i < mesh.size(); ++i) d[i] = mesh[i].normal;
        return d;
    };
    SurfaceMesh coarse = make_sphere_mesh(8), fine = make_sphere_mesh(16);
    // the magnitude gate sits at |x| = 2; the refinement gain is probed nearer the
    // surface where the panel quadrature error is still above the stencil floor
    const double res_mag =
        w_laplacian_residual(coarse, density_for(coarse), {2.0, 0.3, 0.1}, 2e-3);
    const std::array<double, 3> xnear{1.5, 0.2, 0.1};
    const double res_c = w_laplacian_residual(coarse, density_for(coarse), xnear, 3e-4);
    const double res_f = w_laplacian_residual(fine, density_for(fine), xnear, 3e-4);
    CsvTable wtab{"w_field", {"panels", "laplacian_residual"}, {}};
    wtab.rows.push_back({csv_cell(static_cast<double>(coarse.size())), csv_cell(res_c)});
    wtab.rows.push_back({csv_cell(static_cast<double>(fine.size())), csv_cell(res_f)});
    rep.tables.push_back(std::move(wtab));
    rep.records.push_back(check_le("w_laplacian_residual_at_2", res_mag, 1e-3));
    rep.records.push_back(check_ge("w_laplacian_refinement_gain", res_c / res_f, 3.0));
    return rep;
}

}  // namespace dtnlab
