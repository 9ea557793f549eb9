#include "dtnlab/identities.hpp"

#include <cmath>
#include <stdexcept>

#include "dtnlab/commutator.hpp"
#include "dtnlab/fft.hpp"

namespace dtnlab {

namespace {

std::vector<double> synth(const std::vector<cdouble>& sp) { return fft::inverse_real(sp); }

}  // namespace

int band_limit_of(const BoundaryField& f) {
    const BoundaryGrid& grid = f.grid();
    double top = 0.0;
    for (int c = 0; c < f.components(); ++c)
        for (const auto& z : f.spectrum(c)) top = std::max(top, std::abs(z));
    int band = 0;
    for (int c = 0; c < f.components(); ++c)
        for (int s = 0; s < grid.n; ++s)
            if (std::abs(f.spectrum(c)[s]) > 1e-13 * top)
                band = std::max(band, std::abs(grid.mode_of_slot(s)));
    return band;
}

EtaExtension::EtaExtension(BoundaryField eta, ExtensionKind kind, BumpSpec bump)
    : eta_(std::move(eta)), kind_(kind), bump_(std::move(bump)) {
    if (eta_.components() != 1) throw std::invalid_argument("EtaExtension: eta must be scalar");
    if (kind_ == ExtensionKind::mollifier && std::abs(bump_.mass() - 1.0) > 1e-10)
        throw std::invalid_argument("EtaExtension: bump mass differs from one");
}

EtaSlices EtaExtension::slices(double t) const {
    const BoundaryGrid& grid = eta_.grid();
    const int n = grid.n;
    std::vector<cdouble> se(n), sx(n), st(n), sxx(n), sxt(n), stt(n);
    const auto& sp = eta_.spectrum(0);
    for (int s = 0; s < n; ++s) {
        int k = grid.mode_of_slot(s);
        if (k == -n / 2) continue;
        const cdouble c = sp[s];
        if (std::abs(c) == 0.0) continue;
        const double kappa = grid.kappa(k);
        const cdouble ik{0.0, kappa};
        double m0 = 1.0, mt = 0.0, mtt = 0.0;
        switch (kind_) {
            case ExtensionKind::mollifier: {
                const std::array<double, 3> mom = bump_.moments(t * kappa);
                m0 = mom[0];
                mt = kappa * mom[1];
                mtt = kappa * kappa * mom[2];
                break;
            }
            case ExtensionKind::harmonic: {
                const double e = std::exp(-std::abs(kappa) * t);
                m0 = e;
                mt = -std::abs(kappa) * e;
                mtt = kappa * kappa * e;
                break;
            }
            case ExtensionKind::constant_in_t:
                break;
        }
        se[s] = c * m0;
        sx[s] = ik * c * m0;
        st[s] = c * mt;
        sxx[s] = ik * ik * c * m0;
        sxt[s] = ik * c * mt;
        stt[s] = c * mtt;
    }
    EtaSlices out;
    out.eta = synth(se);
    out.ex = synth(sx);
    out.et = synth(st);
    out.exx = synth(sxx);
    out.ext = synth(sxt);
    out.ett = synth(stt);
    return out;
}

namespace {

struct KeyLevel {
    StokesSlices f, g;
    EtaSlices e;
};

std::vector<KeyLevel> materialize_levels(const StreamSolution& sf, const StreamSolution& sg,
                                         const EtaExtension& ext, const GradedGrid& gg) {
    const int M = gg.levels();
    std::vector<KeyLevel> levels(M);
#pragma omp parallel for schedule(dynamic)
    for (int m = 0; m < M; ++m) {
        levels[m].f = eval_slices(sf, gg.y[m]);
        levels[m].g = eval_slices(sg, gg.y[m]);
        levels[m].e = ext.slices(gg.y[m]);
    }
    return levels;
}

void require_dealiasable(const BoundaryField& f, const BoundaryField& g,
                         const BoundaryField& eta) {
    const int n = f.grid().n;
    if (band_limit_of(f) > n / 4 || band_limit_of(g) > n / 4 || band_limit_of(eta) > n / 4)
        throw std::invalid_argument("identity check: band limit exceeds n/4, products would alias");
}

IdentityReport finalize(double lhs, std::vector<std::pair<std::string, double>> terms,
                        double tail, int levels) {
    IdentityReport rep;
    rep.lhs = lhs;
    rep.terms = std::move(terms);
    double total = 0.0, mag = 0.0;
    for (const auto& [name, v] : rep.terms) {
        total += v;
        mag += std::abs(v);
    }
    rep.rhs_total = total;
    rep.abs_residual = std::abs(lhs - total);
    const double ref = std::max({std::abs(lhs), mag, 1e-300});
    rep.rel_residual = rep.abs_residual / ref;
    rep.tail_bound = tail;
    rep.levels = levels;
    return rep;
}

}  // namespace

namespace {

IdentityReport key_identity_from_levels(double lhs, const std::vector<KeyLevel>& levels,
                                        const GradedGrid& gg) {
    const int M = gg.levels();
    const double dx = gg.bgrid.dx();
    const int n = gg.bgrid.n;

    double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0;
    for (int m = 0; m < M; ++m) {
        const auto& lv = levels[m];
        double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double ex = lv.e.ex[j], et = lv.e.et[j];
            // u^alpha grad(eta) . grad(h^alpha)
            a1 += lv.f.u1[j] * (ex * lv.g.du1dx[j] + et * lv.g.du1dy[j]) +
                  lv.f.u2[j] * (ex * lv.g.du2dx[j] + et * lv.g.du2dy[j]);
            // grad(u^alpha) . grad(eta) h^alpha
            a2 += (lv.f.du1dx[j] * ex + lv.f.du1dy[j] * et) * lv.g.u1[j] +
                  (lv.f.du2dx[j] * ex + lv.f.du2dy[j] * et) * lv.g.u2[j];
            // q grad_alpha(eta) h^alpha
            a3 += lv.f.q[j] * (ex * lv.g.u1[j] + et * lv.g.u2[j]);
            // pi grad_alpha(eta) u^alpha
            a4 += lv.g.q[j] * (ex * lv.f.u1[j] + et * lv.f.u2[j]);
        }
        const double w = gg.w[m] * dx;
        t1 += w * a1;
        t2 += w * a2;
        t3 += w * a3;
        t4 += w * a4;
    }

    // decay bound e^{-2 kappa_min (t-Y)} for the truncated remainder
    double top = 0.0;
    {
        const auto& lv = levels[M - 1];
        for (int j = 0; j < n; ++j) {
            const double ex = lv.e.ex[j], et = lv.e.et[j];
            top += std::abs(lv.f.u1[j] * (ex * lv.g.du1dx[j] + et * lv.g.du1dy[j])) +
                   std::abs(lv.f.u2[j] * (ex * lv.g.du2dx[j] + et * lv.g.du2dy[j])) +
                   std::abs((lv.f.du1dx[j] * ex + lv.f.du1dy[j] * et) * lv.g.u1[j]) +
                   std::abs((lv.f.du2dx[j] * ex + lv.f.du2dy[j] * et) * lv.g.u2[j]) +
                   std::abs(lv.f.q[j] * (ex * lv.g.u1[j] + et * lv.g.u2[j])) +
                   std::abs(lv.g.q[j] * (ex * lv.f.u1[j] + et * lv.f.u2[j]));
        }
    }
    const double kmin = 2.0 * kPi / gg.bgrid.L;
    const double tail = top * dx / (2.0 * kmin);

    return finalize(lhs,
                    {{"u.grad_eta.grad_h", t1},
                     {"-grad_u.grad_eta.h", -t2},
                     {"q.grad_eta.h", t3},
                     {"-pi.grad_eta.u", -t4}},
                    tail, M);
}

IdentityReport pressure_identity_from_levels(const std::vector<KeyLevel>& levels,
                                             const GradedGrid& gg) {
    const int M = gg.levels();
    const double dx = gg.bgrid.dx();
    const int n = gg.bgrid.n;

    double lhs = 0.0;
    double r1 = 0.0, r2 = 0.0, r3 = 0.0, r4 = 0.0, r5 = 0.0, r6 = 0.0;
    for (int m = 0; m < M; ++m) {
        const auto& lv = levels[m];
        const double t = gg.y[m];
        double l = 0.0, b1 = 0.0, b2 = 0.0, b3 = 0.0, b4 = 0.0, b5 = 0.0, b6 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double q = lv.f.q[j], qt = lv.f.dqdy[j], qx = lv.f.dqdx[j];
            const double h1 = lv.g.u1[j], h2 = lv.g.u2[j];
            const double h1t = lv.g.du1dy[j], h2t = lv.g.du2dy[j];
            const double h1x = lv.g.du1dx[j], h2x = lv.g.du2dx[j];
            const double ex = lv.e.ex[j], et = lv.e.et[j];
            const double ext_ = lv.e.ext[j], ett = lv.e.ett[j], exx = lv.e.exx[j];
            l += q * (ex * h1 + et * h2);
            b1 += (ext_ * h1 + ett * h2) * q;
            b2 += (ex * h1t + et * h2t) * q;
            b3 += qt * (ext_ * h1 + ett * h2);
            b4 += qt * (ex * h1t + et * h2t);
            b5 += qx * (exx * h1 + ext_ * h2);
            b6 += qx * (ex * h1x + et * h2x);
        }
        const double w = gg.w[m] * dx;
        lhs += w * l;
        r1 += w * t * b1;
        r2 += w * t * b2;
        r3 += w * t * t * b3;
        r4 += w * t * t * b4;
        r5 += w * t * t * b5;
        r6 += w * t * t * b6;
    }

    double top = 0.0;
    {
        const auto& lv = levels[M - 1];
        for (int j = 0; j < n; ++j)
            top += std::abs(lv.f.q[j] * (lv.e.ex[j] * lv.g.u1[j] + lv.e.et[j] * lv.g.u2[j]));
    }
    const double kmin = 2.0 * kPi / gg.bgrid.L;
    const double tail = top * dx / (2.0 * kmin);

    // All four t^2 terms carry +1/2: the identity follows from two integrations
    // by parts in t plus the substitution d2q/dt2 = -d2q/dx2 (harmonic pressure)
    // and one integration by parts in x.
    return finalize(lhs,
                    {{"-t.d2eta_dxa_dt.h.q", -r1},
                     {"-t.deta_dxa.dh_dt.q", -r2},
                     {"+0.5.t2.d2eta_dxa_dt.dq_dt.h", 0.5 * r3},
                     {"+0.5.t2.deta_dxa.dq_dt.dh_dt", 0.5 * r4},
                     {"+0.5.t2.d2eta_dxa_dx.dq_dx.h", 0.5 * r5},
                     {"+0.5.t2.deta_dxa.dq_dx.dh_dx", 0.5 * r6}},
                    tail, M);
}

}  // namespace

IdentityReport key_identity_check(const BoundaryField& f, const BoundaryField& g,
                                  const EtaExtension& ext, const GradedGrid& gg) {
    if (f.components() != 2 || g.components() != 2)
        throw std::invalid_argument("key_identity_check: two-component fields required");
    require_dealiasable(f, g, ext.boundary());
    const double lhs = pairing(commutator_apply(ext.boundary(), f), g);
    StreamSolution sf(f), sg(g);
    auto levels = materialize_levels(sf, sg, ext, gg);
    return key_identity_from_levels(lhs, levels, gg);
}

IdentityReport pressure_identity_check(const BoundaryField& f, const BoundaryField& g,
                                       const EtaExtension& ext, const GradedGrid& gg) {
    if (f.components() != 2 || g.components() != 2)
        throw std::invalid_argument("pressure_identity_check: two-component fields required");
    require_dealiasable(f, g, ext.boundary());
    StreamSolution sf(f), sg(g);
    auto levels = materialize_levels(sf, sg, ext, gg);
    return pressure_identity_from_levels(levels, gg);
}

std::pair<IdentityReport, IdentityReport> identity_pair_check(const BoundaryField& f,
                                                              const BoundaryField& g,
                                                              const EtaExtension& ext,
                                                              const GradedGrid& gg) {
    if (f.components() != 2 || g.components() != 2)
        throw std::invalid_argument("identity_pair_check: two-component fields required");
    require_dealiasable(f, g, ext.boundary());
    const double lhs = pairing(commutator_apply(ext.boundary(), f), g);
    StreamSolution sf(f), sg(g);
    auto levels = materialize_levels(sf, sg, ext, gg);
    return {key_identity_from_levels(lhs, levels, gg), pressure_identity_from_levels(levels, gg)};
}

// --- test fields ---

double SmoothCutoff::value(double t) const {
    if (t <= flat_until) return 1.0;
    if (t >= support_end) return 0.0;
    const double tau = (t - flat_until) / (support_end - flat_until);
    auto bump = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
    const double num = bump(1.0 - tau);
    return num / (num + bump(tau));
}

double SmoothCutoff::deriv(double t) const {
    if (t <= flat_until || t >= support_end) return 0.0;
    const double w = support_end - flat_until;
    const double tau = (t - flat_until) / w;
    auto bump = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
    auto dbump = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) / (s * s) : 0.0; };
    const double bn = bump(1.0 - tau), bd = bump(tau);
    const double dn = -dbump(1.0 - tau), dd = dbump(tau);
    const double denom = bn + bd;
    return ((dn * denom - bn * (dn + dd)) / (denom * denom)) / w;
}

SeparableTestField::SeparableTestField(BoundaryGrid grid,
                                       std::array<std::array<BoundaryField, 2>, 2> profiles,
                                       SmoothCutoff cutoff)
    : grid_(grid),
      profiles_(std::move(profiles)),
      profiles_dx_{{{tangential_derivative(profiles_[0][0]), tangential_derivative(profiles_[0][1])},
                    {tangential_derivative(profiles_[1][0]), tangential_derivative(profiles_[1][1])}}},
      cutoff_(cutoff) {}

SeparableTestField SeparableTestField::random(const BoundaryGrid& grid, int band_limit,
                                              std::uint64_t seed, int trial, SmoothCutoff cutoff) {
    auto make = [&](int which) {
        return random_scalar(grid, band_limit, seed, trial * 4 + which, false);
    };
    std::array<std::array<BoundaryField, 2>, 2> p{{{make(0), make(1)}, {make(2), make(3)}}};
    return SeparableTestField(grid, std::move(p), cutoff);
}

TestFieldSlices SeparableTestField::slices(double t) const {
    TestFieldSlices out;
    const double c = cutoff_.value(t);
    const double dc = cutoff_.deriv(t);
    for (int j = 0; j < 2; ++j)
        for (int a = 0; a < 2; ++a) {
            const auto& prof = profiles_[j][a].samples(0);
            const auto& dprof = profiles_dx_[j][a].samples(0);
            std::vector<double> v(prof.size()), vx(prof.size()), vt(prof.size());
            for (size_t i = 0; i < prof.size(); ++i) {
                v[i] = prof[i] * c;
                vx[i] = dprof[i] * c;
                vt[i] = prof[i] * dc;
            }
            out.v[j][a] = std::move(v);
            out.dvdx[j][a] = std::move(vx);
            out.dvdt[j][a] = std::move(vt);
        }
    return out;
}

GradEtaTimesSolution::GradEtaTimesSolution(EtaExtension ext, StreamSolution sol)
    : ext_(std::move(ext)), sol_(std::move(sol)) {}

TestFieldSlices GradEtaTimesSolution::slices(double t) const {
    EtaSlices e = ext_.slices(t);
    StokesSlices s = eval_slices(sol_, t);
    const size_t n = e.eta.size();
    TestFieldSlices out;
    // v_j^alpha = (grad_j eta) h^alpha; product rule for derivatives
    const std::array<const std::vector<double>*, 2> ge{&e.ex, &e.et};
    const std::array<const std::vector<double>*, 2> gex{&e.exx, &e.ext};
    const std::array<const std::vector<double>*, 2> get{&e.ext, &e.ett};
    const std::array<const std::vector<double>*, 2> h{&s.u1, &s.u2};
    const std::array<const std::vector<double>*, 2> hx{&s.du1dx, &s.du2dx};
    const std::array<const std::vector<double>*, 2> ht{&s.du1dy, &s.du2dy};
    for (int j = 0; j < 2; ++j)
        for (int a = 0; a < 2; ++a) {
            std::vector<double> v(n), vx(n), vt(n);
            for (size_t i = 0; i < n; ++i) {
                v[i] = (*ge[j])[i] * (*h[a])[i];
                vx[i] = (*gex[j])[i] * (*h[a])[i] + (*ge[j])[i] * (*hx[a])[i];
                vt[i] = (*get[j])[i] * (*h[a])[i] + (*ge[j])[i] * (*ht[a])[i];
            }
            out.v[j][a] = std::move(v);
            out.dvdx[j][a] = std::move(vx);
            out.dvdt[j][a] = std::move(vt);
        }
    return out;
}

TestFieldSlices NonDecayingTestField::slices(double) const {
    TestFieldSlices out;
    for (int j = 0; j < 2; ++j)
        for (int a = 0; a < 2; ++a) {
            out.v[j][a].assign(grid_.n, 1.0);
            out.dvdx[j][a].assign(grid_.n, 0.0);
            out.dvdt[j][a].assign(grid_.n, 0.0);
        }
    return out;
}

namespace {

struct DahlbergLevel {
    StokesSlices h;
    TestFieldSlices v;
};

std::vector<DahlbergLevel> materialize_dahlberg(const StreamSolution& sg, const TestField& v,
                                                const GradedGrid& gg) {
    const int M = gg.levels();
    std::vector<DahlbergLevel> levels(M);
#pragma omp parallel for schedule(dynamic)
    for (int m = 0; m < M; ++m) {
        levels[m].h = eval_slices(sg, gg.y[m]);
        levels[m].v = v.slices(gg.y[m]);
    }
    return levels;
}

}  // namespace

IdentityReport dahlberg_identity_check(const BoundaryField& g, const TestField& v,
                                       const GradedGrid& gg) {
    if (g.components() != 2)
        throw std::invalid_argument("dahlberg_identity_check: two-component field required");
    if (!v.decays())
        throw std::invalid_argument(
            "dahlberg_identity_check: test field must decay in t (boundary terms at infinity)");

    StreamSolution sg(g);
    auto levels = materialize_dahlberg(sg, v, gg);
    const int M = gg.levels();
    const double dx = gg.bgrid.dx();
    const int n = gg.bgrid.n;

    double lhs = 0.0;
    double a1 = 0.0, a2 = 0.0, a3 = 0.0, b1 = 0.0, b2 = 0.0, b3 = 0.0;
    for (int m = 0; m < M; ++m) {
        const auto& lv = levels[m];
        const double t = gg.y[m];
        double l = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0, s5 = 0.0, s6 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double h1x = lv.h.du1dx[j], h1t = lv.h.du1dy[j];
            const double h2x = lv.h.du2dx[j], h2t = lv.h.du2dy[j];
            const double pi = lv.h.q[j];
            l += h1x * lv.v.v[0][0][j] + h1t * lv.v.v[1][0][j] + h2x * lv.v.v[0][1][j] +
                 h2t * lv.v.v[1][1][j];
            // sum over alpha of dh^alpha/dt dv_x^alpha/dx - dh^alpha/dx dv_x^alpha/dt
            s1 += h1t * lv.v.dvdx[0][0][j] + h2t * lv.v.dvdx[0][1][j];
            s2 += h1x * lv.v.dvdt[0][0][j] + h2x * lv.v.dvdt[0][1][j];
            // sum over alpha of dh^alpha/dt dv_t^alpha/dt
            s3 += h1t * lv.v.dvdt[1][0][j] + h2t * lv.v.dvdt[1][1][j];
            // tangential block, beta = 1 only in d = 2
            s4 += h1x * lv.v.dvdx[1][0][j];
            s5 += h1t * lv.v.dvdx[1][1][j];
            s6 += pi * lv.v.dvdx[1][0][j];
        }
        const double w = gg.w[m] * dx;
        lhs += w * l;
        a1 += w * t * s1;
        a2 += w * t * s2;
        a3 += w * t * s3;
        b1 += w * t * s4;
        b2 += w * t * s5;
        b3 += w * t * s6;
    }

    double top = 0.0;
    {
        const auto& lv = levels[M - 1];
        for (int j = 0; j < n; ++j)
            top += std::abs(lv.h.du1dx[j] * lv.v.v[0][0][j]) +
                   std::abs(lv.h.du1dy[j] * lv.v.v[1][0][j]) +
                   std::abs(lv.h.du2dx[j] * lv.v.v[0][1][j]) +
                   std::abs(lv.h.du2dy[j] * lv.v.v[1][1][j]);
    }
    const double kmin = 2.0 * kPi / gg.bgrid.L;

    return finalize(lhs,
                    {{"+t.dh_dt.dvx_dx", a1},
                     {"-t.dh_dx.dvx_dt", -a2},
                     {"-t.dh_dt.dvt_dt", -a3},
                     {"-t.dh1_dx.dvt1_dx", -b1},
                     {"-t.dh1_dt.dvt2_dx", -b2},
                     {"+t.pi.dvt1_dx", b3}},
                    top * dx / (2.0 * kmin), M);
}

double bilinear_ratio(const BoundaryField& g, const TestField& v, const GradedGrid& gg,
                      double N0) {
    if (!v.decays()) throw std::invalid_argument("bilinear_ratio: test field must decay in t");
    StreamSolution sg(g);
    IdentityReport rep = dahlberg_identity_check(g, v, gg);

    LevelSampler grad_v_sq = [&v](double t) {
        TestFieldSlices s = v.slices(t);
        std::vector<double> out(s.v[0][0].size(), 0.0);
        for (int j = 0; j < 2; ++j)
            for (int a = 0; a < 2; ++a)
                for (size_t i = 0; i < out.size(); ++i)
                    out[i] += s.dvdx[j][a][i] * s.dvdx[j][a][i] + s.dvdt[j][a][i] * s.dvdt[j][a][i];
        return out;
    };
    LevelSampler abs_v = [&v](double t) {
        TestFieldSlices s = v.slices(t);
        std::vector<double> out(s.v[0][0].size(), 0.0);
        for (int j = 0; j < 2; ++j)
            for (int a = 0; a < 2; ++a)
                for (size_t i = 0; i < out.size(); ++i) out[i] += s.v[j][a][i] * s.v[j][a][i];
        for (double& x : out) x = std::sqrt(x);
        return out;
    };

    const double sq_h = std::sqrt(weighted_volume_norm(gg, grad_u_sq_sampler(sg), 1));
    const double sq_pi = std::sqrt(weighted_volume_norm(gg, q_sq_sampler(sg), 1));
    const double sq_v = std::sqrt(weighted_volume_norm(gg, grad_v_sq, 1));
    const double nt_v = nt_max_l2(gg, abs_v, N0);

    const double denom = (sq_h + sq_pi) * (sq_v + nt_v);
    if (!(denom > 0.0))
        throw std::invalid_argument("bilinear_ratio: degenerate input, zero denominator");
    return std::abs(rep.lhs) / denom;
}

double q_eta_h_ratio(const BoundaryField& f, const BoundaryField& g, const EtaExtension& ext,
                     const GradedGrid& gg, double N0) {
    IdentityReport rep = pressure_identity_check(f, g, ext, gg);
    StreamSolution sg(g);
    const double denom =
        lipschitz_norm(ext.boundary()) * l2_norm(f) * nt_max_l2(gg, u_abs_sampler(sg), N0);
    if (!(denom > 0.0)) throw std::invalid_argument("q_eta_h_ratio: zero denominator");
    return std::abs(rep.lhs) / denom;
}

RatioEnsemble bilinear_ratio_ensemble(const BoundaryGrid& grid, const GradedGrid& gg,
                                      int band_limit, std::uint64_t seed, int groups,
                                      int per_group, double N0) {
    RatioEnsemble out;
    const int M = gg.levels();
    const int n = grid.n;
    const double dx = grid.dx();
    for (int gi = 0; gi < groups; ++gi) {
        BoundaryField g = random_f2(grid, band_limit, seed, 1000 + gi);
        StreamSolution sg(g);
        std::vector<StokesSlices> h(M);
#pragma omp parallel for schedule(dynamic)
        for (int m = 0; m < M; ++m) h[m] = eval_slices(sg, gg.y[m]);

        double grad_h_t = 0.0, pi_t = 0.0;
        for (int m = 0; m < M; ++m) {
            double gh = 0.0, pq = 0.0;
            for (int j = 0; j < n; ++j) {
                gh += h[m].du1dx[j] * h[m].du1dx[j] + h[m].du1dy[j] * h[m].du1dy[j] +
                      h[m].du2dx[j] * h[m].du2dx[j] + h[m].du2dy[j] * h[m].du2dy[j];
                pq += h[m].q[j] * h[m].q[j];
            }
            grad_h_t += gh * gg.w[m] * gg.y[m] * dx;
            pi_t += pq * gg.w[m] * gg.y[m] * dx;
        }
        const double h_factor = std::sqrt(grad_h_t) + std::sqrt(pi_t);

        for (int vi = 0; vi < per_group; ++vi) {
            SmoothCutoff cutoff{0.25 * gg.Y, 0.8 * gg.Y};
            SeparableTestField v =
                SeparableTestField::random(grid, band_limit, seed, 2000 + gi * 97 + vi, cutoff);
            std::vector<TestFieldSlices> vs(M);
#pragma omp parallel for schedule(dynamic)
            for (int m = 0; m < M; ++m) vs[m] = v.slices(gg.y[m]);

            double lhs = 0.0, grad_v_t = 0.0;
            std::vector<std::vector<double>> vabs(M);
            for (int m = 0; m < M; ++m) {
                double l = 0.0, gv = 0.0;
                vabs[m].assign(n, 0.0);
                for (int j = 0; j < n; ++j) {
                    l += h[m].du1dx[j] * vs[m].v[0][0][j] + h[m].du1dy[j] * vs[m].v[1][0][j] +
                         h[m].du2dx[j] * vs[m].v[0][1][j] + h[m].du2dy[j] * vs[m].v[1][1][j];
                    double a2 = 0.0;
                    for (int d = 0; d < 2; ++d)
                        for (int c = 0; c < 2; ++c) {
                            gv += vs[m].dvdx[d][c][j] * vs[m].dvdx[d][c][j] +
                                  vs[m].dvdt[d][c][j] * vs[m].dvdt[d][c][j];
                            a2 += vs[m].v[d][c][j] * vs[m].v[d][c][j];
                        }
                    vabs[m][j] = std::sqrt(a2);
                }
                lhs += l * gg.w[m] * dx;
                grad_v_t += gv * gg.w[m] * gg.y[m] * dx;
            }
            LevelSampler vabs_sampler = [&gg, &vabs](double y) {
                for (int m = 0; m < gg.levels(); ++m)
                    if (gg.y[m] == y) return vabs[m];
                throw std::logic_error("bilinear_ratio_ensemble: sampler off the grid");
            };
            const double nt_v = nt_max_l2(gg, vabs_sampler, N0);
            const double denom = h_factor * (std::sqrt(grad_v_t) + nt_v);
            if (!(denom > 0.0))
                throw std::invalid_argument("bilinear_ratio_ensemble: degenerate trial");
            out.ratios.push_back(std::abs(lhs) / denom);
        }
    }
    for (double r : out.ratios) out.max_ratio = std::max(out.max_ratio, r);
    return out;
}

RatioEnsemble q_eta_h_ratio_ensemble(const BoundaryGrid& grid, const GradedGrid& gg,
                                     int band_limit, std::uint64_t seed, int trials, double N0) {
    RatioEnsemble out;
    const int M = gg.levels();
    const int n = grid.n;
    const double dx = grid.dx();
    for (int t = 0; t < trials; ++t) {
        BoundaryField f = random_f2(grid, band_limit, seed, 3000 + t);
        BoundaryField g = random_f2(grid, band_limit, seed, 4000 + t);
        BoundaryField eta = random_eta(grid, band_limit, seed, 5000 + t);
        EtaExtension ext(eta, ExtensionKind::mollifier);
        StreamSolution sf(f), sg(g);
        auto levels = materialize_levels(sf, sg, ext, gg);

        double lhs = 0.0;
        std::vector<std::vector<double>> habs(M);
        for (int m = 0; m < M; ++m) {
            double l = 0.0;
            habs[m].assign(n, 0.0);
            const auto& lv = levels[m];
            for (int j = 0; j < n; ++j) {
                l += lv.f.q[j] * (lv.e.ex[j] * lv.g.u1[j] + lv.e.et[j] * lv.g.u2[j]);
                habs[m][j] = std::sqrt(lv.g.u1[j] * lv.g.u1[j] + lv.g.u2[j] * lv.g.u2[j]);
            }
            lhs += l * gg.w[m] * dx;
        }
        LevelSampler habs_sampler = [&gg, &habs](double y) {
            for (int m = 0; m < gg.levels(); ++m)
                if (gg.y[m] == y) return habs[m];
            throw std::logic_error("q_eta_h_ratio_ensemble: sampler off the grid");
        };
        const double denom =
            lipschitz_norm(eta) * l2_norm(f) * nt_max_l2(gg, habs_sampler, N0);
        if (!(denom > 0.0)) throw std::invalid_argument("q_eta_h_ratio_ensemble: degenerate trial");
        out.ratios.push_back(std::abs(lhs) / denom);
    }
    for (double r : out.ratios) out.max_ratio = std::max(out.max_ratio, r);
    return out;
}

}  // namespace dtnlab
