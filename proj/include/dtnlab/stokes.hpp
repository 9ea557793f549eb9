#pragma once

#include <cmath>
#include <vector>

#include "dtnlab/spectral.hpp"

namespace dtnlab {

// One Fourier mode of a field of the form (c0 + c1*y) e^{-rate*y}. Closed under
// d/dy, which is all the calculus the stream-function solution needs.
struct PolyExpMode {
    cdouble c0{0.0};
    cdouble c1{0.0};
    double rate = 0.0;

    cdouble at(double y) const { return (c0 + c1 * y) * std::exp(-rate * y); }
    PolyExpMode ddy() const { return {c1 - rate * c0, -rate * c1, rate}; }
    PolyExpMode times(cdouble z) const { return {c0 * z, c1 * z, rate}; }
    // int_0^inf |(c0 + c1 y) e^{-rate y}|^2 y^m dy, rate > 0
    double weighted_l2_integral(int tpow) const;
};

// Closed-form solution of the Stokes Dirichlet problem on the periodized
// half-plane: per mode k != 0, psi_hat(k,y) = (A + B y) e^{-|kappa| y} with
// A = fhat2/(i kappa), B = |kappa| A - fhat1; the k = 0 mode is the constant
// velocity (fhat1(0), fhat2(0)) with zero pressure.
class StreamSolution {
  public:
    explicit StreamSolution(const BoundaryField& f);  // two-component boundary data

    const BoundaryGrid& grid() const { return grid_; }
    double const_u1() const { return const_u1_; }
    double const_u2() const { return const_u2_; }

    // per-mode evaluators; slot indexing, zero at k = 0 and the Nyquist slot
    PolyExpMode psi(int slot) const;
    PolyExpMode u1(int slot) const;
    PolyExpMode u2(int slot) const;
    PolyExpMode q(int slot) const;

    cdouble coeff_a(int slot) const { return a_[slot]; }
    cdouble coeff_b(int slot) const { return b_[slot]; }
    // Scales the stream-side B_k only; the stored pressure trace goes stale, which
    // residual_stokes must detect.
    void corrupt_b(double factor);

  private:
    BoundaryGrid grid_;
    std::vector<cdouble> a_, b_;
    std::vector<cdouble> q0_;  // pressure trace 2 i kappa B, fixed at solve time
    std::vector<double> abs_kappa_;
    double const_u1_ = 0.0, const_u2_ = 0.0;
};

StreamSolution solve_stream(const BoundaryField& f);

// All interior slices that the quadrature layers consume, at one height.
struct StokesSlices {
    std::vector<double> u1, u2, q, psi;
    std::vector<double> du1dx, du1dy, du2dx, du2dy;
    std::vector<double> dqdx, dqdy;
};

// velocity/pressure/stream slices only (the y = 0 trace contract)
BoundaryField eval_fields(const StreamSolution& sol, double y, BoundaryField* q_out = nullptr,
                          BoundaryField* psi_out = nullptr);
StokesSlices eval_slices(const StreamSolution& sol, double y);

struct InteriorField {
    std::vector<double> heights;
    std::vector<StokesSlices> slices;
};
InteriorField sample_interior(const StreamSolution& sol, const std::vector<double>& heights);

// DtN symbol forced by the energy identity: [[2|kappa|, i kappa], [-i kappa, 2|kappa|]].
Mat2 dtn_symbol(double kappa);
// A sign variant of the symbol kept for side-by-side discrepancy reports;
// not Hermitian and fails the energy identity.
Mat2 dtn_symbol_paper_literal(double kappa);

FourierMultiplier dtn_multiplier();
FourierMultiplier dtn_multiplier_paper_literal();

BoundaryField apply_dtn(const BoundaryField& f);
BoundaryField apply_dtn_paper_literal(const BoundaryField& f);

struct EnergyCheck {
    double boundary_pairing = 0.0;  // int Lambda(f) . f on the boundary
    double volume_energy = 0.0;     // int |grad u|^2 over the half-plane, closed form
    double rel_gap = 0.0;
};
EnergyCheck dtn_energy_check(const BoundaryField& f);

struct StokesResidual {
    double momentum = 0.0;  // max |Delta u - grad q| over samples, per-mode closed form
    double divergence = 0.0;
    double scale = 0.0;  // field magnitude the residuals are relative to
};
StokesResidual residual_stokes(const StreamSolution& sol, const std::vector<double>& heights);

}  // namespace dtnlab
