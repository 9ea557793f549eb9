#pragma once

#include <array>
#include <string>
#include <vector>

namespace dtnlab {

// surface area of the unit sphere in R^d
double unit_sphere_area(int d);

struct FundamentalSolution {
    std::vector<std::vector<double>> gamma;  // d x d
    std::vector<double> pi;                  // d
};

// Stokeslet: Gamma_ij = (1/(2 w_d)) [ delta_ij / ((d-2) |x|^{d-2}) + x_i x_j / |x|^d ],
// Pi_i = x_i / (w_d |x|^d); d >= 3
FundamentalSolution fundamental_solution(const std::vector<double>& x, int d = 3);

// analytic gradient d/dz_k Gamma_ij(z)
double stokeslet_gamma_gradient(const std::vector<double>& z, int i, int j, int k, int d = 3);

struct KernelResidual {
    double momentum = 0.0;    // max_ij |Delta Gamma_ij - d_i Pi_j| by central differences
    double divergence = 0.0;  // max_j |sum_i d_i Gamma_ij|
};
KernelResidual kernel_residual(const std::vector<double>& x, double h, int d = 3);

// d/dy_k {Gamma_ij(x - y)} n_k - Pi_i(x - y) n_j
std::vector<std::vector<double>> double_layer_kernel(const std::vector<double>& x,
                                                     const std::vector<double>& y_src,
                                                     const std::vector<double>& n_src, int d = 3);

struct SurfacePanel {
    std::array<double, 3> centroid{};
    double area = 0.0;
    std::array<double, 3> normal{};
};
using SurfaceMesh = std::vector<SurfacePanel>;

// latitude/longitude panels on the unit sphere with exact cell areas
SurfaceMesh make_sphere_mesh(int n_theta);

// text format, one panel per line: cx cy cz area nx ny nz
void write_mesh(const std::string& path, const SurfaceMesh& mesh);
SurfaceMesh read_mesh(const std::string& path);

struct WFieldResult {
    std::array<double, 3> w{};   // W_k(x)
    double q_tilde = 0.0;        // -sum_k dW_k/dx_k, analytic panel derivative
};

// W_k(x) = int (x_j - y_j) / (w_d |x-y|^d) n_k(y) phi_j(y) dS(y), d = 3
WFieldResult w_field(const SurfaceMesh& mesh, const std::vector<std::array<double, 3>>& density,
                     const std::array<double, 3>& x);

// max over k of the central-difference Laplacian of W_k at x
double w_laplacian_residual(const SurfaceMesh& mesh,
                            const std::vector<std::array<double, 3>>& density,
                            const std::array<double, 3>& x, double h);

}  // namespace dtnlab
