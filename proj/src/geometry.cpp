#include "dtnlab/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace dtnlab {

GraphDomain make_graph_domain(BoundaryField psi) {
    double lip = lipschitz_seminorm(psi);
    return {std::move(psi), lip};
}

BoundaryField make_smooth_sawtooth(const BoundaryGrid& grid, double amplitude, int modes) {
    // truncated triangle-wave series sum_{odd k} cos(kappa_k x)/k^2; normalized so
    // the sampled slope equals the requested amplitude
    std::vector<cdouble> sp(grid.n, cdouble{0.0});
    for (int k = 1; k <= modes && k < grid.n / 2; k += 2) {
        sp[grid.slot_of_mode(k)] = 0.5 / (k * k);
        sp[grid.slot_of_mode(-k)] = 0.5 / (k * k);
    }
    auto raw = BoundaryField::from_spectrum(grid, {std::move(sp)});
    double slope = lipschitz_seminorm(raw);
    if (slope <= 0.0) throw std::invalid_argument("make_smooth_sawtooth: degenerate wave");
    return scale(raw, amplitude / slope);
}

KenigSteinMap::KenigSteinMap(BoundaryField psi, BumpSpec bump, double c0)
    : psi_(psi), bump_(bump), c0_(c0), mollified_(psi, ExtensionKind::mollifier, bump) {
    if (psi_.components() != 1) throw std::invalid_argument("KenigSteinMap: psi must be scalar");
    if (!(c0_ > 0.0)) throw std::invalid_argument("KenigSteinMap: c0 must be positive");
}

KenigSteinMap::MapSlices KenigSteinMap::slices(double t) const {
    if (t < 0.0) throw std::invalid_argument("KenigSteinMap: negative height");
    // t = 0 yields the limit values: phi = psi, phi_t = c0
    EtaSlices e = mollified_.slices(t);
    MapSlices out;
    out.phi = std::move(e.eta);
    for (double& v : out.phi) v += c0_ * t;
    out.phi_t = std::move(e.et);
    for (double& v : out.phi_t) v += c0_;
    out.phi_x = std::move(e.ex);
    out.phi_xx = std::move(e.exx);
    out.phi_xt = std::move(e.ext);
    out.phi_tt = std::move(e.ett);
    return out;
}

KenigSteinMap::PointDerivatives KenigSteinMap::at(double x, double t) const {
    if (!(t > 0.0)) throw std::invalid_argument("KenigSteinMap: t must be positive");
    const BoundaryGrid& grid = psi_.grid();
    PointDerivatives out;
    out.phi = c0_ * t;
    out.phi_t = c0_;
    const auto& sp = psi_.spectrum(0);
    for (int s = 0; s < grid.n; ++s) {
        int k = grid.mode_of_slot(s);
        if (k == -grid.n / 2) continue;
        const cdouble c = sp[s];
        if (std::abs(c) == 0.0) continue;
        const double kappa = grid.kappa(k);
        const cdouble ph = std::exp(cdouble{0.0, kappa * x});
        const std::array<double, 3> mom = bump_.moments(t * kappa);
        const double m0 = mom[0];
        const double mt = kappa * mom[1];
        const double mtt = kappa * kappa * mom[2];
        const cdouble base = c * ph;
        out.phi += (base * m0).real();
        out.phi_t += (base * mt).real();
        out.phi_x += (base * cdouble{0.0, kappa} * m0).real();
        out.phi_xx += (base * (-kappa * kappa) * m0).real();
        out.phi_xt += (base * cdouble{0.0, kappa} * mt).real();
        out.phi_tt += (base * mtt).real();
    }
    return out;
}

double KenigSteinMap::boundary_value(double x) const {
    const BoundaryGrid& grid = psi_.grid();
    const auto& sp = psi_.spectrum(0);
    double v = 0.0;
    for (int s = 0; s < grid.n; ++s) {
        int k = grid.mode_of_slot(s);
        if (k == -grid.n / 2) continue;
        v += (sp[s] * std::exp(cdouble{0.0, grid.kappa(k) * x})).real();
    }
    return v;
}

namespace {

double min_phi_t_on_grid(const KenigSteinMap& map, const GradedGrid& gg) {
    const int M = gg.levels();
    std::vector<double> mins(M, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int m = 0; m < M; ++m) {
        auto s = map.slices(gg.y[m]);
        double lo = s.phi_t[0];
        for (double v : s.phi_t) lo = std::min(lo, v);
        mins[m] = lo;
    }
    double lo = mins[0];
    for (double v : mins) lo = std::min(lo, v);
    return lo;
}

}  // namespace

KenigSteinMap build_map(const BoundaryField& psi, const BumpSpec& bump,
                        const GradedGrid& check_grid, C0Policy policy) {
    if (std::abs(bump.mass() - 1.0) > 1e-10)
        throw std::invalid_argument("build_map: bump mass differs from one");
    if (!policy.automatic) return KenigSteinMap(psi, bump, policy.fixed_value);

    const double m = lipschitz_seminorm(psi);
    double c0 = 8.0 * (1.0 + m * bump.t_derivative_moment());
    for (int attempt = 0; attempt < 10; ++attempt) {
        KenigSteinMap map(psi, bump, c0);
        if (min_phi_t_on_grid(map, check_grid) >= 0.125) return map;
        c0 *= 2.0;
    }
    throw std::runtime_error("build_map: c0 search failed to reach d(phi)/dt >= 1/8");
}

MapVerification verify_map(const KenigSteinMap& map, const GradedGrid& gg,
                           const TentFamily& tents) {
    MapVerification out;
    out.c0 = map.c0();

    const int M = gg.levels();
    std::vector<double> mins(M), lo_sv(M), hi_sv(M);
#pragma omp parallel for schedule(dynamic)
    for (int m = 0; m < M; ++m) {
        auto s = map.slices(gg.y[m]);
        double mn = s.phi_t[0], lo = 0.0, hi = 0.0;
        bool first = true;
        for (size_t j = 0; j < s.phi_t.size(); ++j) {
            mn = std::min(mn, s.phi_t[j]);
            // singular values of D rho = [[1, 0], [phi_x, phi_t]]
            const double tr = 1.0 + s.phi_x[j] * s.phi_x[j] + s.phi_t[j] * s.phi_t[j];
            const double det = s.phi_t[j];
            const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det * det));
            const double smax = std::sqrt(0.5 * (tr + disc));
            const double smin = std::sqrt(std::max(0.0, 0.5 * (tr - disc)));
            if (first) {
                lo = smin;
                hi = smax;
                first = false;
            } else {
                lo = std::min(lo, smin);
                hi = std::max(hi, smax);
            }
        }
        mins[m] = mn;
        lo_sv[m] = lo;
        hi_sv[m] = hi;
    }
    out.min_phi_t = mins[0];
    out.bilip_lower = lo_sv[0];
    out.bilip_upper = hi_sv[0];
    for (int m = 0; m < M; ++m) {
        out.min_phi_t = std::min(out.min_phi_t, mins[m]);
        out.bilip_lower = std::min(out.bilip_lower, lo_sv[m]);
        out.bilip_upper = std::max(out.bilip_upper, hi_sv[m]);
    }
    out.phi_t_ok = out.min_phi_t >= 0.125;

    LevelSampler hess_sq_t = [&map](double t) {
        auto s = map.slices(t);
        std::vector<double> out2(s.phi.size());
        for (size_t j = 0; j < out2.size(); ++j) {
            const double h2 = s.phi_xx[j] * s.phi_xx[j] + 2.0 * s.phi_xt[j] * s.phi_xt[j] +
                              s.phi_tt[j] * s.phi_tt[j];
            out2[j] = h2 * t;
        }
        return out2;
    };
    LevelSampler hess_t = [&map](double t) {
        auto s = map.slices(t);
        std::vector<double> out2(s.phi.size());
        for (size_t j = 0; j < out2.size(); ++j) {
            const double h2 = s.phi_xx[j] * s.phi_xx[j] + 2.0 * s.phi_xt[j] * s.phi_xt[j] +
                              s.phi_tt[j] * s.phi_tt[j];
            out2[j] = std::sqrt(h2) * t;
        }
        return out2;
    };
    out.carleson_hess_sq_t = carleson_norm(gg, tents, hess_sq_t).norm;
    out.carleson_hess_t = carleson_norm(gg, tents, hess_t).norm;
    return out;
}

double pullback_integral(const KenigSteinMap& map,
                         const std::function<double(double, double)>& integrand,
                         const GradedGrid& gg) {
    const int M = gg.levels();
    const double dx = gg.bgrid.dx();
    std::vector<double> per_level(M, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int m = 0; m < M; ++m) {
        auto s = map.slices(gg.y[m]);
        double acc = 0.0;
        for (int j = 0; j < gg.bgrid.n; ++j)
            acc += integrand(gg.bgrid.x(j), s.phi[j]) * s.phi_t[j];
        per_level[m] = acc * dx * gg.w[m];
    }
    double total = 0.0;
    for (double v : per_level) total += v;
    return total;
}

double pullback_integral_tent(const KenigSteinMap& map,
                              const std::function<double(double, double)>& integrand,
                              const GradedGrid& gg, double x0, double len_q, double height) {
    const int M = gg.levels();
    const double dx = gg.bgrid.dx();
    const double L = gg.bgrid.L;
    std::vector<double> per_level(M, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int m = 0; m < M; ++m) {
        if (gg.y[m] > height) continue;
        auto s = map.slices(gg.y[m]);
        double acc = 0.0;
        for (int j = 0; j < gg.bgrid.n; ++j) {
            double rel = std::fmod(gg.bgrid.x(j) - x0 + 2.0 * L, L);
            if (rel >= len_q) continue;
            acc += integrand(gg.bgrid.x(j), s.phi[j]) * s.phi_t[j];
        }
        per_level[m] = acc * dx * gg.w[m];
    }
    double total = 0.0;
    for (double v : per_level) total += v;
    return total;
}

ExtensionReport lipschitz_extension_report(const BoundaryField& eta, const BumpSpec& bump,
                                  const GradedGrid& gg, const TentFamily& tents) {
    EtaExtension ext(eta, ExtensionKind::mollifier, bump);
    ExtensionReport rep;
    rep.lip_eta = lipschitz_norm(eta);

    const int M = gg.levels();
    std::vector<double> sup(M, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int m = 0; m < M; ++m) {
        EtaSlices s = ext.slices(gg.y[m]);
        double g = 0.0;
        for (size_t j = 0; j < s.eta.size(); ++j)
            g = std::max(g, std::sqrt(s.ex[j] * s.ex[j] + s.et[j] * s.et[j]));
        sup[m] = g;
    }
    for (double v : sup) rep.grad_sup = std::max(rep.grad_sup, v);
    rep.grad_ratio = rep.lip_eta > 0.0 ? rep.grad_sup / rep.lip_eta : 0.0;

    LevelSampler hess_t = [&ext](double t) {
        EtaSlices s = ext.slices(t);
        std::vector<double> out(s.eta.size());
        for (size_t j = 0; j < out.size(); ++j) {
            const double h2 =
                s.exx[j] * s.exx[j] + 2.0 * s.ext[j] * s.ext[j] + s.ett[j] * s.ett[j];
            out[j] = std::sqrt(h2) * t;
        }
        return out;
    };
    LevelSampler hess_sq_t = [&ext](double t) {
        EtaSlices s = ext.slices(t);
        std::vector<double> out(s.eta.size());
        for (size_t j = 0; j < out.size(); ++j) {
            const double h2 =
                s.exx[j] * s.exx[j] + 2.0 * s.ext[j] * s.ext[j] + s.ett[j] * s.ett[j];
            out[j] = h2 * t;
        }
        return out;
    };
    rep.carleson_hess_t = carleson_norm(gg, tents, hess_t).norm;
    rep.carleson_hess_sq_t = carleson_norm(gg, tents, hess_sq_t).norm;

    EtaSlices near = ext.slices(gg.y_min);
    for (size_t j = 0; j < near.eta.size(); ++j)
        rep.trace_sup_err = std::max(rep.trace_sup_err, std::abs(near.eta[j] - eta.samples(0)[j]));
    return rep;
}

}  // namespace dtnlab
