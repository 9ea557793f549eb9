#include "dtnlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dtnlab {

namespace {

const double kGL4Nodes[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                             0.8611363115940526};
const double kGL4Weights[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                               0.3478548451374538};

std::vector<std::vector<double>> materialize(const GradedGrid& gg, const LevelSampler& sampler) {
    const int M = gg.levels();
    std::vector<std::vector<double>> slices(M);
#pragma omp parallel for schedule(dynamic)
    for (int m = 0; m < M; ++m) slices[m] = sampler(gg.y[m]);
    for (int m = 0; m < M; ++m)
        if (static_cast<int>(slices[m].size()) != gg.bgrid.n)
            throw std::invalid_argument("sampler slice length does not match boundary grid");
    return slices;
}

}  // namespace

GradedGrid make_graded_grid(const BoundaryGrid& bgrid, int levels, double Y, double y_min,
                            QuadRule rule) {
    if (levels < 8) throw std::invalid_argument("make_graded_grid: need at least 8 levels");
    GradedGrid gg;
    gg.bgrid = bgrid;
    gg.Y = Y > 0.0 ? Y : 2.0 * bgrid.L;
    gg.y_min = y_min > 0.0 ? y_min : bgrid.L / (4.0 * bgrid.n);
    gg.rule = rule;
    if (!(gg.y_min > 0.0) || !(gg.Y > gg.y_min))
        throw std::invalid_argument("make_graded_grid: need 0 < y_min < Y");
    if (gg.Y > 4.0 * bgrid.L) throw std::invalid_argument("make_graded_grid: Y exceeds 4L");

    if (rule == QuadRule::trapezoid) {
        // uniform band on [0, y_min] (so M-doubling refines the bottom too), then
        // geometric levels up to Y; plain trapezoid weights over all nodes
        const int M = levels;
        const int sub = std::max(2, M / 8);
        gg.y.resize(M);
        for (int m = 0; m <= sub; ++m) gg.y[m] = gg.y_min * m / sub;
        const double r = std::pow(gg.Y / gg.y_min, 1.0 / (M - sub - 1));
        for (int m = sub + 1; m < M; ++m) gg.y[m] = gg.y_min * std::pow(r, m - sub);
        gg.y[M - 1] = gg.Y;
        gg.w.resize(M);
        for (int m = 0; m < M; ++m) {
            double lo = m == 0 ? gg.y[0] : gg.y[m - 1];
            double hi = m == M - 1 ? gg.y[M - 1] : gg.y[m + 1];
            gg.w[m] = 0.5 * (hi - lo);
        }
    } else {
        const int panels = std::max(2, levels / 4);
        const double rho = std::pow(gg.Y / gg.y_min, 1.0 / (panels - 1));
        std::vector<double> bp(panels + 1);
        bp[0] = 0.0;
        for (int i = 1; i <= panels; ++i) bp[i] = gg.y_min * std::pow(rho, i - 1);
        bp[panels] = gg.Y;
        for (int i = 1; i <= panels; ++i) {
            const double mid = 0.5 * (bp[i] + bp[i - 1]);
            const double half = 0.5 * (bp[i] - bp[i - 1]);
            for (int g = 0; g < 4; ++g) {
                gg.y.push_back(mid + half * kGL4Nodes[g]);
                gg.w.push_back(half * kGL4Weights[g]);
            }
        }
    }
    return gg;
}

GradedGrid refine(const GradedGrid& gg, int factor) {
    return make_graded_grid(gg.bgrid, gg.levels() * factor, gg.Y, gg.y_min, gg.rule);
}

double graded_integral(const GradedGrid& gg, const LevelSampler& sampler, int tpow) {
    const int M = gg.levels();
    const double dx = gg.bgrid.dx();
    std::vector<double> level_sum(M, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int m = 0; m < M; ++m) {
        std::vector<double> s = sampler(gg.y[m]);
        double acc = 0.0;
        for (double v : s) acc += v;
        level_sum[m] = acc * dx * gg.w[m] * std::pow(gg.y[m], tpow);
    }
    double total = 0.0;
    for (int m = 0; m < M; ++m) total += level_sum[m];
    return total;
}

double weighted_volume_norm(const GradedGrid& gg, const LevelSampler& sq_sampler, int a) {
    if (a != 1 && a != 3) throw std::invalid_argument("weighted_volume_norm: weight power must be 1 or 3");
    return graded_integral(gg, sq_sampler, a);
}

RefinedNorm weighted_volume_norm_refined(const GradedGrid& gg, const LevelSampler& sq_sampler,
                                         int a) {
    RefinedNorm out;
    out.value = weighted_volume_norm(gg, sq_sampler, a);
    out.refined = weighted_volume_norm(refine(gg, 2), sq_sampler, a);
    out.rel_change = std::abs(out.refined - out.value) / std::max(std::abs(out.refined), 1e-300);
    const int order = gg.rule == QuadRule::trapezoid ? 2 : 6;
    const double gain = std::pow(2.0, order);
    out.richardson = (gain * out.refined - out.value) / (gain - 1.0);
    return out;
}

std::vector<double> nontangential_max(const GradedGrid& gg, const LevelSampler& abs_sampler,
                                      double N0) {
    if (N0 < 1.0) throw std::invalid_argument("nontangential_max: aperture must be >= 1");
    const int n = gg.bgrid.n;
    const int M = gg.levels();
    const double dx = gg.bgrid.dx();
    const double slope = std::sqrt(N0 * N0 - 1.0);
    auto slices = materialize(gg, abs_sampler);

    std::vector<double> out(n, 0.0);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) {
        double best = 0.0;
        for (int m = 0; m < M; ++m) {
            int reach = static_cast<int>(std::floor(slope * gg.y[m] / dx));
            const auto& s = slices[m];
            if (2 * reach + 1 >= n) {
                for (double v : s) best = std::max(best, v);
            } else {
                for (int d = -reach; d <= reach; ++d) {
                    int i = j + d;
                    i = (i % n + n) % n;
                    best = std::max(best, s[i]);
                }
            }
        }
        out[j] = best;
    }
    return out;
}

double nt_max_l2(const GradedGrid& gg, const LevelSampler& abs_sampler, double N0) {
    auto star = nontangential_max(gg, abs_sampler, N0);
    double acc = 0.0;
    for (double v : star) acc += v * v;
    return std::sqrt(acc * gg.bgrid.dx());
}

TentFamily make_tents(const BoundaryGrid& bgrid, int levels) {
    TentFamily t;
    t.L = bgrid.L;
    if (levels > 0) {
        t.levels = levels;
    } else {
        // smallest tent keeps 8 grid cells in x
        int J = 0;
        while ((bgrid.n >> (J + 1)) >= 8) ++J;
        t.levels = J + 1;
    }
    if ((1 << (t.levels - 1)) > bgrid.n)
        throw std::invalid_argument("make_tents: more tent levels than grid cells");
    return t;
}

CarlesonResult carleson_norm(const GradedGrid& gg, const TentFamily& tents,
                             const LevelSampler& density) {
    const int n = gg.bgrid.n;
    const int M = gg.levels();
    const double dx = gg.bgrid.dx();
    auto slices = materialize(gg, density);
    for (const auto& s : slices)
        for (double v : s)
            if (v < 0.0) throw std::invalid_argument("carleson_norm: density must be nonnegative");

    CarlesonResult out;
    for (int j = 0; j < tents.levels; ++j) {
        const int ntents = 1 << j;
        const double len = tents.L / ntents;
        const int cells = n / ntents;
        // column sums restricted to y <= l(Q), identical for all tents at level j
        std::vector<double> col(n, 0.0);
        for (int m = 0; m < M; ++m) {
            if (gg.y[m] > len) continue;
            for (int i = 0; i < n; ++i) col[i] += gg.w[m] * slices[m][i];
        }
        for (int t = 0; t < ntents; ++t) {
            double nu = 0.0;
            for (int c = 0; c < cells; ++c) nu += col[t * cells + c];
            nu *= dx;
            TentRecord rec{j, t, len, nu, nu / len};
            out.table.push_back(rec);
            out.norm = std::max(out.norm, rec.ratio);
        }
    }
    return out;
}

LevelSampler grad_u_sq_sampler(StreamSolution sol) {
    return [sol = std::move(sol)](double y) {
        StokesSlices s = eval_slices(sol, y);
        std::vector<double> out(s.u1.size());
        for (size_t j = 0; j < out.size(); ++j)
            out[j] = s.du1dx[j] * s.du1dx[j] + s.du1dy[j] * s.du1dy[j] +
                     s.du2dx[j] * s.du2dx[j] + s.du2dy[j] * s.du2dy[j];
        return out;
    };
}

LevelSampler q_sq_sampler(StreamSolution sol) {
    return [sol = std::move(sol)](double y) {
        StokesSlices s = eval_slices(sol, y);
        std::vector<double> out(s.q.size());
        for (size_t j = 0; j < out.size(); ++j) out[j] = s.q[j] * s.q[j];
        return out;
    };
}

LevelSampler grad_q_sq_sampler(StreamSolution sol) {
    return [sol = std::move(sol)](double y) {
        StokesSlices s = eval_slices(sol, y);
        std::vector<double> out(s.q.size());
        for (size_t j = 0; j < out.size(); ++j)
            out[j] = s.dqdx[j] * s.dqdx[j] + s.dqdy[j] * s.dqdy[j];
        return out;
    };
}

LevelSampler u_abs_sampler(StreamSolution sol) {
    return [sol = std::move(sol)](double y) {
        StokesSlices s = eval_slices(sol, y);
        std::vector<double> out(s.u1.size());
        for (size_t j = 0; j < out.size(); ++j)
            out[j] = std::sqrt(s.u1[j] * s.u1[j] + s.u2[j] * s.u2[j]);
        return out;
    };
}

LevelSampler u_sq_sampler(StreamSolution sol) {
    return [sol = std::move(sol)](double y) {
        StokesSlices s = eval_slices(sol, y);
        std::vector<double> out(s.u1.size());
        for (size_t j = 0; j < out.size(); ++j) out[j] = s.u1[j] * s.u1[j] + s.u2[j] * s.u2[j];
        return out;
    };
}

SquareFunctionReport square_bound_report(const BoundaryField& f, const GradedGrid& gg, double N0) {
    if (f.components() != 2)
        throw std::invalid_argument("square_bound_report: two-component data required");
    StreamSolution sol(f);
    SquareFunctionReport rep;
    rep.grad_u_sq_t = weighted_volume_norm(gg, grad_u_sq_sampler(sol), 1);
    rep.q_sq_t = weighted_volume_norm(gg, q_sq_sampler(sol), 1);
    rep.grad_q_sq_t3 = weighted_volume_norm(gg, grad_q_sq_sampler(sol), 3);
    double nt = nt_max_l2(gg, u_abs_sampler(sol), N0);
    rep.nt_max_u_sq = nt * nt;
    double b = l2_norm(f);
    rep.boundary_u_sq = b * b;
    rep.ratio_grad_u_vs_nt = rep.nt_max_u_sq > 0.0 ? rep.grad_u_sq_t / rep.nt_max_u_sq : 0.0;
    rep.ratio_q_vs_boundary = rep.boundary_u_sq > 0.0 ? rep.q_sq_t / rep.boundary_u_sq : 0.0;
    rep.chain_holds = rep.grad_q_sq_t3 <= rep.q_sq_t * (1.0 + 1e-12);
    return rep;
}

namespace reference {

double graded_integral(const GradedGrid& gg, const LevelSampler& sampler, int tpow) {
    const double dx = gg.bgrid.dx();
    double total = 0.0;
    for (int m = 0; m < gg.levels(); ++m) {
        std::vector<double> s = sampler(gg.y[m]);
        double acc = 0.0;
        for (double v : s) acc += v;
        total += acc * dx * gg.w[m] * std::pow(gg.y[m], tpow);
    }
    return total;
}

std::vector<double> nontangential_max(const GradedGrid& gg, const LevelSampler& abs_sampler,
                                      double N0) {
    if (N0 < 1.0) throw std::invalid_argument("nontangential_max: aperture must be >= 1");
    const int n = gg.bgrid.n;
    const double dx = gg.bgrid.dx();
    const double slope = std::sqrt(N0 * N0 - 1.0);
    std::vector<double> out(n, 0.0);
    for (int m = 0; m < gg.levels(); ++m) {
        std::vector<double> s = abs_sampler(gg.y[m]);
        int reach = static_cast<int>(std::floor(slope * gg.y[m] / dx));
        for (int j = 0; j < n; ++j) {
            if (2 * reach + 1 >= n) {
                for (double v : s) out[j] = std::max(out[j], v);
            } else {
                for (int d = -reach; d <= reach; ++d) {
                    int i = ((j + d) % n + n) % n;
                    out[j] = std::max(out[j], s[i]);
                }
            }
        }
    }
    return out;
}

CarlesonResult carleson_norm(const GradedGrid& gg, const TentFamily& tents,
                             const LevelSampler& density) {
    const int n = gg.bgrid.n;
    const double dx = gg.bgrid.dx();
    std::vector<std::vector<double>> slices;
    for (int m = 0; m < gg.levels(); ++m) {
        slices.push_back(density(gg.y[m]));
        for (double v : slices.back())
            if (v < 0.0) throw std::invalid_argument("carleson_norm: density must be nonnegative");
    }
    CarlesonResult out;
    for (int j = 0; j < tents.levels; ++j) {
        const int ntents = 1 << j;
        const double len = tents.L / ntents;
        const int cells = n / ntents;
        for (int t = 0; t < ntents; ++t) {
            double nu = 0.0;
            for (int m = 0; m < gg.levels(); ++m) {
                if (gg.y[m] > len) continue;
                for (int c = 0; c < cells; ++c) nu += gg.w[m] * slices[m][t * cells + c];
            }
            nu *= dx;
            TentRecord rec{j, t, len, nu, nu / len};
            out.table.push_back(rec);
            out.norm = std::max(out.norm, rec.ratio);
        }
    }
    return out;
}

}  // namespace reference

}  // namespace dtnlab
