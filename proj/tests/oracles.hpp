// Test-side oracles. Everything here recomputes expected values through routes
// independent of the library paths they are used to check.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "dtnlab/kernels.hpp"
#include "dtnlab/spectral.hpp"

namespace oracles {

using dtnlab::BoundaryField;
using dtnlab::BoundaryGrid;
using dtnlab::cdouble;

// spectral convolution: (eta * g)^(k) = sum_m etahat(k - m) ghat(m), truncated to
// the grid band with the Nyquist slot dropped; the independent counterpart of the
// FFT-padded dealiased product
inline std::vector<cdouble> convolve_spectra(const BoundaryGrid& grid,
                                             const std::vector<cdouble>& eta,
                                             const std::vector<cdouble>& g) {
    const int n = grid.n;
    std::vector<cdouble> out(n, cdouble{0.0});
    for (int k = -n / 2 + 1; k < n / 2; ++k) {
        cdouble acc{0.0};
        for (int m = -n / 2 + 1; m < n / 2; ++m) {
            int d = k - m;
            if (d <= -n / 2 || d >= n / 2) continue;  // outside the band: see padded grid
            acc += eta[grid.slot_of_mode(d)] * g[grid.slot_of_mode(m)];
        }
        out[grid.slot_of_mode(k)] = acc;
    }
    return out;
}

// full (un-truncated) product spectrum of two band-limited factors, needed when the
// true product still fits the 2x padded band
inline std::vector<cdouble> convolve_spectra_wide(const BoundaryGrid& grid,
                                                  const std::vector<cdouble>& eta,
                                                  const std::vector<cdouble>& g, int wide_n) {
    std::vector<cdouble> out(wide_n, cdouble{0.0});
    for (int k = -wide_n / 2 + 1; k < wide_n / 2; ++k) {
        cdouble acc{0.0};
        for (int m = -grid.n / 2 + 1; m < grid.n / 2; ++m) {
            int d = k - m;
            if (d <= -grid.n / 2 || d >= grid.n / 2) continue;
            acc += eta[grid.slot_of_mode(d)] * g[grid.slot_of_mode(m)];
        }
        out[k >= 0 ? k : k + wide_n] = acc;
    }
    return out;
}

// DtN symbol recomputed from scratch (conormal data of the stream solution)
inline std::array<cdouble, 4> dtn_symbol_reference(double kappa) {
    if (kappa == 0.0) return {cdouble{0.0}, cdouble{0.0}, cdouble{0.0}, cdouble{0.0}};
    const double ak = std::abs(kappa);
    const cdouble ik{0.0, kappa};
    // columns from unit data (f1, f2) = e_1, e_2: A = f2/(ik), B = |k|A - f1,
    // Lambda = (-du1/dy, -du2/dy + q) at y = 0 with outward normal (0, -1)
    std::array<cdouble, 4> m;
    for (int col = 0; col < 2; ++col) {
        cdouble f1 = col == 0 ? 1.0 : 0.0;
        cdouble f2 = col == 1 ? 1.0 : 0.0;
        cdouble a = f2 / ik;
        cdouble b = ak * a - f1;
        // u1 = (f1 + |k| B y) e^{-|k|y}: du1/dy|0 = |k|B - |k| f1
        cdouble du1 = ak * b - ak * f1;
        // u2 = (f2 + ik B y) e^{-|k|y}: du2/dy|0 = ik B - |k| f2
        cdouble du2 = ik * b - ak * f2;
        cdouble q0 = 2.0 * ik * b;
        m[0 * 2 + col] = -du1;
        m[1 * 2 + col] = -du2 + q0;
    }
    return m;
}

// commutator [Lambda, eta] f via spectral convolution matrices and the reference
// symbol; independent of the FFT-dealiased operator path
inline BoundaryField dense_commutator(const BoundaryField& eta, const BoundaryField& f) {
    const BoundaryGrid& grid = f.grid();
    const int n = grid.n;
    auto apply_sym = [&](const std::vector<cdouble>& s1, const std::vector<cdouble>& s2) {
        std::pair<std::vector<cdouble>, std::vector<cdouble>> out{
            std::vector<cdouble>(n, cdouble{0.0}), std::vector<cdouble>(n, cdouble{0.0})};
        for (int s = 0; s < n; ++s) {
            int k = grid.mode_of_slot(s);
            if (k == -n / 2) continue;
            auto m = dtn_symbol_reference(grid.kappa(k));
            out.first[s] = m[0] * s1[s] + m[1] * s2[s];
            out.second[s] = m[2] * s1[s] + m[3] * s2[s];
        }
        return out;
    };
    auto ef1 = convolve_spectra(grid, eta.spectrum(0), f.spectrum(0));
    auto ef2 = convolve_spectra(grid, eta.spectrum(0), f.spectrum(1));
    auto lam_ef = apply_sym(ef1, ef2);
    auto lam_f = apply_sym(f.spectrum(0), f.spectrum(1));
    auto e_lam1 = convolve_spectra(grid, eta.spectrum(0), lam_f.first);
    auto e_lam2 = convolve_spectra(grid, eta.spectrum(0), lam_f.second);
    std::vector<cdouble> c1(n), c2(n);
    for (int s = 0; s < n; ++s) {
        c1[s] = lam_ef.first[s] - e_lam1[s];
        c2[s] = lam_ef.second[s] - e_lam2[s];
    }
    return BoundaryField::from_spectrum(grid, {std::move(c1), std::move(c2)});
}

// band-limited interpolant evaluated off the grid
inline double eval_field(const BoundaryField& g, double x, int comp = 0) {
    const BoundaryGrid& grid = g.grid();
    double v = 0.0;
    for (int s = 0; s < grid.n; ++s) {
        int k = grid.mode_of_slot(s);
        if (k == -grid.n / 2) continue;
        v += (g.spectrum(comp)[s] * std::exp(cdouble{0.0, grid.kappa(k) * x})).real();
    }
    return v;
}

// direct Simpson quadrature of the mollification (zeta_t * g)(x)
inline double direct_convolution(const dtnlab::BumpSpec& bump, double t, const BoundaryField& g,
                                 double x, int panels = 4000) {
    const double a = bump.half_width() * t;
    const double h = 2.0 * a / panels;
    double acc = 0.0;
    for (int i = 0; i <= panels; ++i) {
        const double s = -a + i * h;
        double w = (i == 0 || i == panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * bump.value(s / t) / t * eval_field(g, x - s);
    }
    return acc * h / 3.0;
}

// int_0^inf |(c0 + c1 y) e^{-r y}|^2 y^p dy, recomputed from the factorial formula
inline double mode_sq_integral(cdouble c0, cdouble c1, double r, int p) {
    auto fac = [](int m) {
        double f = 1.0;
        for (int i = 2; i <= m; ++i) f *= i;
        return f;
    };
    const double q0 = std::norm(c0), q1 = 2.0 * (c0 * std::conj(c1)).real(), q2 = std::norm(c1);
    const double rr = 2.0 * r;
    return q0 * fac(p) / std::pow(rr, p + 1) + q1 * fac(p + 1) / std::pow(rr, p + 2) +
           q2 * fac(p + 2) / std::pow(rr, p + 3);
}

// closed-form weighted square functions for solved data, recomputed from the raw
// boundary spectra (stream coefficients re-derived here, not taken from the lib)
struct ClosedFormSquares {
    double grad_u_sq_t = 0.0;
    double q_sq_t = 0.0;
    double grad_q_sq_t3 = 0.0;
    double volume_energy = 0.0;  // int |grad u|^2 (no weight)
};
inline ClosedFormSquares closed_form_squares(const BoundaryField& f) {
    const BoundaryGrid& grid = f.grid();
    ClosedFormSquares out;
    for (int s = 0; s < grid.n; ++s) {
        int k = grid.mode_of_slot(s);
        if (k == 0 || k == -grid.n / 2) continue;
        const double kappa = grid.kappa(k);
        const double ak = std::abs(kappa);
        const cdouble ik{0.0, kappa};
        const cdouble f1 = f.spectrum(0)[s], f2 = f.spectrum(1)[s];
        const cdouble a = f2 / ik;
        const cdouble b = ak * a - f1;
        // u1 = (f1 + |k|B y)e, u2 = (f2 + ikB y)e, q = 2ikB e
        const cdouble u10 = f1, u11 = ak * b;
        const cdouble u20 = f2, u21 = ik * b;
        const cdouble du10 = u11 - ak * u10, du11 = -ak * u11;  // d/dy coefficients
        const cdouble du20 = u21 - ak * u20, du21 = -ak * u21;
        const cdouble q0 = 2.0 * ik * b;
        auto grad_sq = [&](int p) {
            return mode_sq_integral(du10, du11, ak, p) + mode_sq_integral(ik * u10, ik * u11, ak, p) +
                   mode_sq_integral(du20, du21, ak, p) + mode_sq_integral(ik * u20, ik * u21, ak, p);
        };
        out.grad_u_sq_t += grid.L * grad_sq(1);
        out.volume_energy += grid.L * grad_sq(0);
        out.q_sq_t += grid.L * mode_sq_integral(q0, cdouble{0.0}, ak, 1);
        out.grad_q_sq_t3 += grid.L * (mode_sq_integral(ik * q0, cdouble{0.0}, ak, 3) +
                                      mode_sq_integral(-ak * q0, cdouble{0.0}, ak, 3));
    }
    return out;
}

// polygon area by the shoelace formula
inline double shoelace_area(const std::vector<std::array<double, 2>>& pts) {
    double acc = 0.0;
    const size_t n = pts.size();
    for (size_t i = 0; i < n; ++i) {
        const auto& p = pts[i];
        const auto& q = pts[(i + 1) % n];
        acc += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * std::abs(acc);
}

// far-field moment expansion of the W field: monopole + dipole of the surface density
struct WFarField {
    std::array<double, 3> w{};
    int predicted_exponent = 0;  // d-1 if the monopole survives, else d
};
inline WFarField w_farfield(const dtnlab::SurfaceMesh& mesh,
                            const std::vector<std::array<double, 3>>& density,
                            const std::array<double, 3>& x) {
    const double wd = dtnlab::unit_sphere_area(3);
    double m0[3][3] = {};    // int n_k phi_j dS
    double m1[3][3][3] = {};  // int y_m n_k phi_j dS
    double scale = 0.0;
    for (size_t p = 0; p < mesh.size(); ++p)
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < 3; ++j) {
                m0[k][j] += mesh[p].area * mesh[p].normal[k] * density[p][j];
                scale += std::abs(mesh[p].area * mesh[p].normal[k] * density[p][j]);
                for (int m = 0; m < 3; ++m)
                    m1[m][k][j] +=
                        mesh[p].area * mesh[p].centroid[m] * mesh[p].normal[k] * density[p][j];
            }
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    const double r3 = r * r * r, r5 = r3 * r * r;
    WFarField out;
    double m0_norm = 0.0;
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) {
            // Pi_j(x) = x_j/(wd r^3); d_m Pi_j = (delta_mj r^-3 - 3 x_j x_m r^-5)/wd
            out.w[k] += x[j] / (wd * r3) * m0[k][j];
            for (int m = 0; m < 3; ++m)
                out.w[k] -= ((m == j ? 1.0 / r3 : 0.0) - 3.0 * x[j] * x[m] / r5) / wd * m1[m][k][j];
            m0_norm += std::abs(m0[k][j]);
        }
    out.predicted_exponent = m0_norm > 1e-10 * std::max(scale, 1.0) ? 2 : 3;
    return out;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max({std::abs(want), std::abs(got), 1e-300});
}

}  // namespace oracles
