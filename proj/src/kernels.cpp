#include "dtnlab/kernels.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dtnlab {

namespace {

constexpr double kPi3 = 3.14159265358979323846;

double norm_of(const std::vector<double>& x) {
    double a = 0.0;
    for (double v : x) a += v * v;
    return std::sqrt(a);
}

void check_dim(const std::vector<double>& x, int d, const char* who) {
    if (d < 3) throw std::invalid_argument(std::string(who) + ": only d >= 3 is supported");
    if (static_cast<int>(x.size()) != d)
        throw std::invalid_argument(std::string(who) + ": point dimension mismatch");
}

}  // namespace

double unit_sphere_area(int d) {
    if (d < 1) throw std::invalid_argument("unit_sphere_area: d must be positive");
    return 2.0 * std::pow(kPi3, 0.5 * d) / std::tgamma(0.5 * d);
}

FundamentalSolution fundamental_solution(const std::vector<double>& x, int d) {
    check_dim(x, d, "fundamental_solution");
    const double r = norm_of(x);
    if (!(r > 0.0)) throw std::invalid_argument("fundamental_solution: singular at x = 0");
    const double wd = unit_sphere_area(d);
    const double rd = std::pow(r, d);
    const double r2d = std::pow(r, d - 2);
    FundamentalSolution out;
    out.gamma.assign(d, std::vector<double>(d, 0.0));
    out.pi.assign(d, 0.0);
    for (int i = 0; i < d; ++i) {
        out.pi[i] = x[i] / (wd * rd);
        for (int j = 0; j < d; ++j) {
            double v = x[i] * x[j] / rd;
            if (i == j) v += 1.0 / ((d - 2) * r2d);
            out.gamma[i][j] = v / (2.0 * wd);
        }
    }
    return out;
}

double stokeslet_gamma_gradient(const std::vector<double>& z, int i, int j, int k, int d) {
    check_dim(z, d, "stokeslet_gamma_gradient");
    const double r = norm_of(z);
    if (!(r > 0.0)) throw std::invalid_argument("stokeslet_gamma_gradient: singular point");
    const double wd = unit_sphere_area(d);
    const double rd = std::pow(r, d);
    double v = -((i == j) ? z[k] : 0.0) / rd;
    v += (((k == i) ? z[j] : 0.0) + ((k == j) ? z[i] : 0.0)) / rd;
    v -= d * z[i] * z[j] * z[k] / (rd * r * r);
    return v / (2.0 * wd);
}

KernelResidual kernel_residual(const std::vector<double>& x, double h, int d) {
    check_dim(x, d, "kernel_residual");
    if (!(h > 0.0)) throw std::invalid_argument("kernel_residual: step must be positive");
    if (norm_of(x) < 10.0 * h)
        throw std::invalid_argument("kernel_residual: stencil too close to the origin");

    auto shift = [&](int k, double s) {
        std::vector<double> y = x;
        y[k] += s;
        return y;
    };

    KernelResidual out;
    FundamentalSolution c = fundamental_solution(x, d);
    for (int j = 0; j < d; ++j) {
        double div = 0.0;
        for (int i = 0; i < d; ++i) {
            // Laplacian of Gamma_ij and d_i Pi_j via central differences
            double lap = 0.0;
            for (int k = 0; k < d; ++k) {
                FundamentalSolution p = fundamental_solution(shift(k, h), d);
                FundamentalSolution m = fundamental_solution(shift(k, -h), d);
                lap += (p.gamma[i][j] + m.gamma[i][j] - 2.0 * c.gamma[i][j]) / (h * h);
            }
            FundamentalSolution pi_p = fundamental_solution(shift(i, h), d);
            FundamentalSolution pi_m = fundamental_solution(shift(i, -h), d);
            const double dpi = (pi_p.pi[j] - pi_m.pi[j]) / (2.0 * h);
            out.momentum = std::max(out.momentum, std::abs(lap - dpi));
            div += (pi_p.gamma[i][j] - pi_m.gamma[i][j]) / (2.0 * h);
        }
        out.divergence = std::max(out.divergence, std::abs(div));
    }
    return out;
}

std::vector<std::vector<double>> double_layer_kernel(const std::vector<double>& x,
                                                     const std::vector<double>& y_src,
                                                     const std::vector<double>& n_src, int d) {
    check_dim(x, d, "double_layer_kernel");
    check_dim(y_src, d, "double_layer_kernel");
    check_dim(n_src, d, "double_layer_kernel");
    std::vector<double> z(d);
    double r2 = 0.0;
    for (int i = 0; i < d; ++i) {
        z[i] = x[i] - y_src[i];
        r2 += z[i] * z[i];
    }
    if (!(r2 > 0.0)) throw std::invalid_argument("double_layer_kernel: coincident points");
    FundamentalSolution fs = fundamental_solution(z, d);
    std::vector<std::vector<double>> out(d, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double v = 0.0;
            // d/dy_k Gamma_ij(x - y) = -(d_k Gamma_ij)(x - y)
            for (int k = 0; k < d; ++k) v -= stokeslet_gamma_gradient(z, i, j, k, d) * n_src[k];
            v -= fs.pi[i] * n_src[j];
            out[i][j] = v;
        }
    return out;
}

SurfaceMesh make_sphere_mesh(int n_theta) {
    if (n_theta < 2) throw std::invalid_argument("make_sphere_mesh: need at least 2 bands");
    SurfaceMesh mesh;
    const int n_phi = 2 * n_theta;
    for (int it = 0; it < n_theta; ++it) {
        const double t0 = kPi3 * it / n_theta;
        const double t1 = kPi3 * (it + 1) / n_theta;
        const double tc = 0.5 * (t0 + t1);
        const double band_area = (std::cos(t0) - std::cos(t1)) * 2.0 * kPi3 / n_phi;
        for (int ip = 0; ip < n_phi; ++ip) {
            const double pc = 2.0 * kPi3 * (ip + 0.5) / n_phi;
            SurfacePanel p;
            p.centroid = {std::sin(tc) * std::cos(pc), std::sin(tc) * std::sin(pc), std::cos(tc)};
            p.normal = p.centroid;
            p.area = band_area;
            mesh.push_back(p);
        }
    }
    return mesh;
}

void write_mesh(const std::string& path, const SurfaceMesh& mesh) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_mesh: cannot open " + path);
    out.precision(17);
    for (const auto& p : mesh)
        out << p.centroid[0] << ' ' << p.centroid[1] << ' ' << p.centroid[2] << ' ' << p.area
            << ' ' << p.normal[0] << ' ' << p.normal[1] << ' ' << p.normal[2] << '\n';
}

SurfaceMesh read_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_mesh: cannot open " + path);
    SurfaceMesh mesh;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        SurfacePanel p;
        if (!(ls >> p.centroid[0] >> p.centroid[1] >> p.centroid[2] >> p.area >> p.normal[0] >>
              p.normal[1] >> p.normal[2]))
            throw std::runtime_error("read_mesh: malformed panel line: " + line);
        mesh.push_back(p);
    }
    return mesh;
}

WFieldResult w_field(const SurfaceMesh& mesh, const std::vector<std::array<double, 3>>& density,
                     const std::array<double, 3>& x) {
    if (mesh.size() != density.size())
        throw std::invalid_argument("w_field: density size does not match mesh");
    const int d = 3;
    const double wd = unit_sphere_area(d);

    double min_r2 = 1e300, max_area = 0.0;
    for (const auto& p : mesh) {
        double r2 = 0.0;
        for (int i = 0; i < 3; ++i) {
            double z = x[i] - p.centroid[i];
            r2 += z * z;
        }
        min_r2 = std::min(min_r2, r2);
        max_area = std::max(max_area, p.area);
    }
    if (min_r2 < max_area)
        throw std::invalid_argument("w_field: evaluation point too close to the surface");

    WFieldResult out;
    for (size_t pidx = 0; pidx < mesh.size(); ++pidx) {
        const auto& p = mesh[pidx];
        std::array<double, 3> z{};
        double r2 = 0.0;
        for (int i = 0; i < 3; ++i) {
            z[i] = x[i] - p.centroid[i];
            r2 += z[i] * z[i];
        }
        const double r = std::sqrt(r2);
        const double r3 = r2 * r;
        const double r5 = r3 * r2;
        double zdotphi = 0.0;
        for (int j = 0; j < 3; ++j) zdotphi += z[j] * density[pidx][j];
        for (int k = 0; k < 3; ++k)
            out.w[k] += p.area * p.normal[k] * zdotphi / (wd * r3);
        // -sum_k d/dx_k of the integrand: d_k Pi_j(z) = (delta_kj r^-3 - 3 z_j z_k r^-5)/wd
        double div = 0.0;
        for (int k = 0; k < 3; ++k) {
            double t = density[pidx][k] / r3 - 3.0 * zdotphi * z[k] / r5;
            div += p.area * p.normal[k] * t / wd;
        }
        out.q_tilde -= div;
    }
    return out;
}

double w_laplacian_residual(const SurfaceMesh& mesh,
                            const std::vector<std::array<double, 3>>& density,
                            const std::array<double, 3>& x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("w_laplacian_residual: step must be positive");
    auto shift = [&](int k, double s) {
        std::array<double, 3> y = x;
        y[k] += s;
        return y;
    };
    WFieldResult c = w_field(mesh, density, x);
    std::array<double, 3> lap{};
    for (int k = 0; k < 3; ++k) {
        WFieldResult p = w_field(mesh, density, shift(k, h));
        WFieldResult m = w_field(mesh, density, shift(k, -h));
        for (int i = 0; i < 3; ++i) lap[i] += (p.w[i] + m.w[i] - 2.0 * c.w[i]) / (h * h);
    }
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(lap[i]));
    return worst;
}

}  // namespace dtnlab
