#pragma once

#include <functional>
#include <vector>

#include "dtnlab/spectral.hpp"
#include "dtnlab/stokes.hpp"

namespace dtnlab {

// integrand values (one per boundary grid point) on the horizontal slice at height y
using LevelSampler = std::function<std::vector<double>(double y)>;

enum class QuadRule { trapezoid, gauss };

// Quadrature grid for the strip (0, Y] x torus. Levels are geometrically graded;
// `trapezoid` uses the levels directly with trapezoidal weights (the [0, y_1]
// segment assumes a vanishing integrand, which t-weighted densities satisfy),
// `gauss` places composite 4-point Gauss-Legendre nodes on geometric panels.
struct GradedGrid {
    BoundaryGrid bgrid;
    double y_min = 0.0;
    double Y = 0.0;
    QuadRule rule = QuadRule::trapezoid;
    std::vector<double> y;
    std::vector<double> w;

    int levels() const { return static_cast<int>(y.size()); }
};

GradedGrid make_graded_grid(const BoundaryGrid& bgrid, int levels, double Y = -1.0,
                            double y_min = -1.0, QuadRule rule = QuadRule::trapezoid);
GradedGrid refine(const GradedGrid& gg, int factor);

// sum_m w_m y_m^tpow (L/n) sum_j sampler(y_m)[j]
double graded_integral(const GradedGrid& gg, const LevelSampler& sampler, int tpow = 0);

// int int |sampler|^2 t^a dx dt with a in {1, 3}; sampler returns squared magnitudes
double weighted_volume_norm(const GradedGrid& gg, const LevelSampler& sq_sampler, int a);

struct RefinedNorm {
    double value = 0.0;       // at the given grid
    double refined = 0.0;     // at doubled levels
    double rel_change = 0.0;  // |refined - value| / |refined|
    double richardson = 0.0;  // extrapolated limit estimate
};
RefinedNorm weighted_volume_norm_refined(const GradedGrid& gg, const LevelSampler& sq_sampler,
                                         int a);

// (v)*(x_j) = max of |v| over graded-grid points in the cone |x' - x_j| <= sqrt(N0^2-1) y
std::vector<double> nontangential_max(const GradedGrid& gg, const LevelSampler& abs_sampler,
                                      double N0);
double nt_max_l2(const GradedGrid& gg, const LevelSampler& abs_sampler, double N0);

// Dyadic intervals of the torus at levels j = 0..levels-1; tent T(Q) = Q x (0, l(Q)].
struct TentFamily {
    double L = 0.0;
    int levels = 0;
};
TentFamily make_tents(const BoundaryGrid& bgrid, int levels = -1);

struct TentRecord {
    int level = 0;
    int index = 0;
    double length = 0.0;
    double measure = 0.0;  // nu(T(Q))
    double ratio = 0.0;    // nu(T(Q)) / |Q|
};

struct CarlesonResult {
    double norm = 0.0;
    std::vector<TentRecord> table;
};

// density must be nonnegative on the grid; the caller includes any t-power
CarlesonResult carleson_norm(const GradedGrid& gg, const TentFamily& tents,
                             const LevelSampler& density);

// --- slice samplers for solved Stokes fields ---
LevelSampler grad_u_sq_sampler(StreamSolution sol);
LevelSampler q_sq_sampler(StreamSolution sol);
LevelSampler grad_q_sq_sampler(StreamSolution sol);
LevelSampler u_abs_sampler(StreamSolution sol);
LevelSampler u_sq_sampler(StreamSolution sol);

struct SquareFunctionReport {
    double grad_u_sq_t = 0.0;    // ∬ |grad u|^2 t dx dt
    double nt_max_u_sq = 0.0;    // ||(u)*||_2^2
    double grad_q_sq_t3 = 0.0;   // ∬ |grad q|^2 t^3 dx dt
    double q_sq_t = 0.0;         // ∬ |q|^2 t dx dt
    double boundary_u_sq = 0.0;  // ||f||_2^2 on the boundary
    double ratio_grad_u_vs_nt = 0.0;
    double ratio_q_vs_boundary = 0.0;
    bool chain_holds = false;  // ∬|grad q|^2 t^3 <= ∬|q|^2 t
};

SquareFunctionReport square_bound_report(const BoundaryField& f, const GradedGrid& gg, double N0);

namespace reference {
// Serial counterparts of the OpenMP kernels, kept as the comparison baseline.
double graded_integral(const GradedGrid& gg, const LevelSampler& sampler, int tpow = 0);
std::vector<double> nontangential_max(const GradedGrid& gg, const LevelSampler& abs_sampler,
                                      double N0);
CarlesonResult carleson_norm(const GradedGrid& gg, const TentFamily& tents,
                             const LevelSampler& density);
}  // namespace reference

}  // namespace dtnlab
