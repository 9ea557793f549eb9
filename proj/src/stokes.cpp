#include "dtnlab/stokes.hpp"

#include <cmath>
#include <stdexcept>

#include "dtnlab/fft.hpp"

namespace dtnlab {

double PolyExpMode::weighted_l2_integral(int tpow) const {
    // |c0 + c1 y|^2 = p0 + p1 y + p2 y^2; int y^m e^{-2 rate y} dy = m! / (2 rate)^{m+1}
    if (!(rate > 0.0)) throw std::invalid_argument("weighted_l2_integral: decaying mode required");
    const double p0 = std::norm(c0);
    const double p1 = 2.0 * (c0 * std::conj(c1)).real();
    const double p2 = std::norm(c1);
    const double r = 2.0 * rate;
    auto fact_over = [r](int m) {
        double f = 1.0;
        for (int i = 2; i <= m; ++i) f *= i;
        return f / std::pow(r, m + 1);
    };
    return p0 * fact_over(tpow) + p1 * fact_over(tpow + 1) + p2 * fact_over(tpow + 2);
}

StreamSolution::StreamSolution(const BoundaryField& f) : grid_(f.grid()) {
    if (f.components() != 2)
        throw std::invalid_argument("solve_stream: two-component boundary data required");
    const int n = grid_.n;
    a_.assign(n, cdouble{0.0});
    b_.assign(n, cdouble{0.0});
    q0_.assign(n, cdouble{0.0});
    abs_kappa_.assign(n, 0.0);
    const_u1_ = f.spectrum(0)[0].real();
    const_u2_ = f.spectrum(1)[0].real();
    for (int s = 0; s < n; ++s) {
        int k = grid_.mode_of_slot(s);
        if (k == 0 || k == -n / 2) continue;
        const double kappa = grid_.kappa(k);
        const cdouble ik{0.0, kappa};
        const cdouble f1 = f.spectrum(0)[s];
        const cdouble f2 = f.spectrum(1)[s];
        a_[s] = f2 / ik;
        b_[s] = std::abs(kappa) * a_[s] - f1;
        q0_[s] = cdouble{0.0, 2.0 * kappa} * b_[s];
        abs_kappa_[s] = std::abs(kappa);
    }
}

StreamSolution solve_stream(const BoundaryField& f) { return StreamSolution(f); }

PolyExpMode StreamSolution::psi(int slot) const { return {a_[slot], b_[slot], abs_kappa_[slot]}; }

PolyExpMode StreamSolution::u1(int slot) const {
    // u1 = -d psi/dy
    PolyExpMode d = psi(slot).ddy();
    return {-d.c0, -d.c1, d.rate};
}

PolyExpMode StreamSolution::u2(int slot) const {
    // u2 = d psi/dx = i kappa psi
    int k = grid_.mode_of_slot(slot);
    return psi(slot).times(cdouble{0.0, grid_.kappa(k)});
}

PolyExpMode StreamSolution::q(int slot) const {
    // (d_y^2 - kappa^2) u1 = i kappa q gives the trace 2 i kappa B; the interior
    // profile is its decaying harmonic extension e^{-|kappa| y}
    return {q0_[slot], cdouble{0.0}, abs_kappa_[slot]};
}

void StreamSolution::corrupt_b(double factor) {
    for (auto& b : b_) b *= factor;
}

namespace {

std::vector<double> synth(const std::vector<cdouble>& spectrum) {
    return fft::inverse_real(spectrum);
}

}  // namespace

BoundaryField eval_fields(const StreamSolution& sol, double y, BoundaryField* q_out,
                          BoundaryField* psi_out) {
    if (y < 0.0) throw std::invalid_argument("eval_fields: negative height");
    const BoundaryGrid& grid = sol.grid();
    const int n = grid.n;
    std::vector<cdouble> su1(n, cdouble{0.0}), su2(n, cdouble{0.0}), sq(n, cdouble{0.0}),
        spsi(n, cdouble{0.0});
    su1[0] = sol.const_u1();
    su2[0] = sol.const_u2();
    for (int s = 0; s < n; ++s) {
        int k = grid.mode_of_slot(s);
        if (k == 0 || k == -n / 2) continue;
        su1[s] = sol.u1(s).at(y);
        su2[s] = sol.u2(s).at(y);
        sq[s] = sol.q(s).at(y);
        spsi[s] = sol.psi(s).at(y);
    }
    if (q_out) *q_out = BoundaryField::from_spectrum(grid, {sq});
    if (psi_out) *psi_out = BoundaryField::from_spectrum(grid, {spsi});
    return BoundaryField::from_spectrum(grid, {su1, su2});
}

StokesSlices eval_slices(const StreamSolution& sol, double y) {
    if (y < 0.0) throw std::invalid_argument("eval_slices: negative height");
    const BoundaryGrid& grid = sol.grid();
    const int n = grid.n;
    std::vector<cdouble> su1(n), su2(n), sq(n), spsi(n), d1x(n), d1y(n), d2x(n), d2y(n), qx(n),
        qy(n);
    su1[0] = sol.const_u1();
    su2[0] = sol.const_u2();
    for (int s = 0; s < n; ++s) {
        int k = grid.mode_of_slot(s);
        if (k == 0 || k == -n / 2) continue;
        const cdouble ik{0.0, grid.kappa(k)};
        PolyExpMode u1 = sol.u1(s), u2 = sol.u2(s), q = sol.q(s);
        su1[s] = u1.at(y);
        su2[s] = u2.at(y);
        sq[s] = q.at(y);
        spsi[s] = sol.psi(s).at(y);
        d1x[s] = ik * su1[s];
        d1y[s] = u1.ddy().at(y);
        d2x[s] = ik * su2[s];
        d2y[s] = u2.ddy().at(y);
        qx[s] = ik * sq[s];
        qy[s] = q.ddy().at(y);
    }
    StokesSlices out;
    out.u1 = synth(su1);
    out.u2 = synth(su2);
    out.q = synth(sq);
    out.psi = synth(spsi);
    out.du1dx = synth(d1x);
    out.du1dy = synth(d1y);
    out.du2dx = synth(d2x);
    out.du2dy = synth(d2y);
    out.dqdx = synth(qx);
    out.dqdy = synth(qy);
    return out;
}

InteriorField sample_interior(const StreamSolution& sol, const std::vector<double>& heights) {
    InteriorField out;
    out.heights = heights;
    out.slices.reserve(heights.size());
    for (double y : heights) out.slices.push_back(eval_slices(sol, y));
    return out;
}

Mat2 dtn_symbol(double kappa) {
    Mat2 m;
    const double ak = std::abs(kappa);
    m.a11 = 2.0 * ak;
    m.a12 = cdouble{0.0, kappa};
    m.a21 = cdouble{0.0, -kappa};
    m.a22 = 2.0 * ak;
    return m;
}

Mat2 dtn_symbol_paper_literal(double kappa) {
    // component 1: -2|k| f1 - ik f2 + 2|k| f2 - 2ik f1; component 2: -ik f1
    Mat2 m;
    const double ak = std::abs(kappa);
    m.a11 = cdouble{-2.0 * ak, -2.0 * kappa};
    m.a12 = cdouble{2.0 * ak, -kappa};
    m.a21 = cdouble{0.0, -kappa};
    m.a22 = cdouble{0.0, 0.0};
    return m;
}

FourierMultiplier dtn_multiplier() { return {2, [](double kappa) { return dtn_symbol(kappa); }}; }

FourierMultiplier dtn_multiplier_paper_literal() {
    return {2, [](double kappa) { return dtn_symbol_paper_literal(kappa); }};
}

BoundaryField apply_dtn(const BoundaryField& f) { return apply_multiplier(dtn_multiplier(), f); }

BoundaryField apply_dtn_paper_literal(const BoundaryField& f) {
    return apply_multiplier(dtn_multiplier_paper_literal(), f);
}

EnergyCheck dtn_energy_check(const BoundaryField& f) {
    EnergyCheck out;
    out.boundary_pairing = pairing(apply_dtn(f), f);
    StreamSolution sol(f);
    const BoundaryGrid& grid = f.grid();
    double vol = 0.0;
    for (int s = 0; s < grid.n; ++s) {
        int k = grid.mode_of_slot(s);
        if (k == 0 || k == -grid.n / 2) continue;
        const cdouble ik{0.0, grid.kappa(k)};
        PolyExpMode u1 = sol.u1(s), u2 = sol.u2(s);
        vol += u1.ddy().weighted_l2_integral(0) + u1.times(ik).weighted_l2_integral(0) +
               u2.ddy().weighted_l2_integral(0) + u2.times(ik).weighted_l2_integral(0);
    }
    out.volume_energy = grid.L * vol;
    double ref = std::max(std::abs(out.boundary_pairing), std::abs(out.volume_energy));
    out.rel_gap = ref > 0.0 ? std::abs(out.boundary_pairing - out.volume_energy) / ref : 0.0;
    return out;
}

StokesResidual residual_stokes(const StreamSolution& sol, const std::vector<double>& heights) {
    for (double y : heights)
        if (!(y > 0.0)) throw std::invalid_argument("residual_stokes: samples must satisfy y > 0");
    const BoundaryGrid& grid = sol.grid();
    StokesResidual out;
    for (int s = 0; s < grid.n; ++s) {
        int k = grid.mode_of_slot(s);
        if (k == 0 || k == -grid.n / 2) continue;
        const double kappa = grid.kappa(k);
        const cdouble ik{0.0, kappa};
        PolyExpMode u1 = sol.u1(s), u2 = sol.u2(s), q = sol.q(s);
        PolyExpMode lap1 = u1.ddy().ddy(), lap2 = u2.ddy().ddy();
        PolyExpMode qy = q.ddy();
        for (double y : heights) {
            // momentum: (d_yy - kappa^2) u - (grad q) per component
            cdouble m1 = lap1.at(y) - kappa * kappa * u1.at(y) - ik * q.at(y);
            cdouble m2 = lap2.at(y) - kappa * kappa * u2.at(y) - qy.at(y);
            cdouble dv = ik * u1.at(y) + u2.ddy().at(y);
            out.momentum = std::max(out.momentum, std::max(std::abs(m1), std::abs(m2)));
            out.divergence = std::max(out.divergence, std::abs(dv));
            out.scale = std::max({out.scale, std::abs(u1.at(y)) * std::abs(kappa),
                                  std::abs(u2.at(y)) * std::abs(kappa), std::abs(q.at(y))});
        }
    }
    return out;
}

}  // namespace dtnlab
