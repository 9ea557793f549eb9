#include "dtnlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dtnlab/fft.hpp"

namespace dtnlab {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

cdouble mul2(const Mat2& m, cdouble g1, cdouble g2, int row) {
    return row == 0 ? m.a11 * g1 + m.a12 * g2 : m.a21 * g1 + m.a22 * g2;
}

}  // namespace

BoundaryGrid::BoundaryGrid(int n_, double L_) : n(n_), L(L_) {
    if (n < 8 || !is_pow2(n)) throw std::invalid_argument("BoundaryGrid: n must be a power of two >= 8");
    if (!(L > 0.0)) throw std::invalid_argument("BoundaryGrid: L must be positive");
}

BoundaryField::BoundaryField(BoundaryGrid grid, std::vector<std::vector<double>> comps)
    : grid_(grid), samples_(std::move(comps)) {
    if (samples_.empty() || samples_.size() > 2)
        throw std::invalid_argument("BoundaryField: 1 or 2 components required");
    spectrum_.reserve(samples_.size());
    for (const auto& s : samples_) {
        if (static_cast<int>(s.size()) != grid_.n)
            throw std::invalid_argument("BoundaryField: sample count does not match grid");
        spectrum_.push_back(fft::forward_real(s));
    }
}

BoundaryField BoundaryField::scalar(BoundaryGrid grid, std::vector<double> samples) {
    return BoundaryField(grid, {std::move(samples)});
}

BoundaryField BoundaryField::vec2(BoundaryGrid grid, std::vector<double> c1, std::vector<double> c2) {
    return BoundaryField(grid, {std::move(c1), std::move(c2)});
}

BoundaryField BoundaryField::zero(BoundaryGrid grid, int ncomp) {
    std::vector<std::vector<double>> comps(ncomp, std::vector<double>(grid.n, 0.0));
    return BoundaryField(grid, std::move(comps));
}

BoundaryField BoundaryField::from_spectrum(BoundaryGrid grid,
                                           std::vector<std::vector<cdouble>> spectra) {
    if (spectra.empty() || spectra.size() > 2)
        throw std::invalid_argument("BoundaryField: 1 or 2 components required");
    BoundaryField f;
    f.grid_ = grid;
    for (auto& sp : spectra) {
        if (static_cast<int>(sp.size()) != grid.n)
            throw std::invalid_argument("BoundaryField: spectrum length does not match grid");
        f.samples_.push_back(fft::inverse_real(sp));
        f.spectrum_.push_back(std::move(sp));
    }
    return f;
}

BoundaryField BoundaryField::component(int c) const {
    BoundaryField f;
    f.grid_ = grid_;
    f.samples_ = {samples_.at(c)};
    f.spectrum_ = {spectrum_.at(c)};
    return f;
}

double lp_norm(const BoundaryField& f, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    const int n = f.grid().n;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        double m2 = 0.0;
        for (int c = 0; c < f.components(); ++c) m2 += f.samples(c)[j] * f.samples(c)[j];
        acc += std::pow(m2, 0.5 * p);
    }
    return std::pow(acc * f.grid().dx(), 1.0 / p);
}

double l2_norm(const BoundaryField& f) { return lp_norm(f, 2.0); }

double sup_norm(const BoundaryField& f) {
    double m = 0.0;
    for (int j = 0; j < f.grid().n; ++j) {
        double m2 = 0.0;
        for (int c = 0; c < f.components(); ++c) m2 += f.samples(c)[j] * f.samples(c)[j];
        m = std::max(m, m2);
    }
    return std::sqrt(m);
}

double lipschitz_norm(const BoundaryField& g) {
    if (g.components() != 1) throw std::invalid_argument("lipschitz_norm: scalar field required");
    const auto& s = g.samples(0);
    const int n = g.grid().n;
    const double inv_dx = 1.0 / g.grid().dx();
    double sup = 0.0, slope = 0.0;
    for (int j = 0; j < n; ++j) {
        sup = std::max(sup, std::abs(s[j]));
        slope = std::max(slope, std::abs(s[(j + 1) % n] - s[j]) * inv_dx);
    }
    return sup + slope;
}

double lipschitz_seminorm(const BoundaryField& g) {
    if (g.components() != 1)
        throw std::invalid_argument("lipschitz_seminorm: scalar field required");
    const auto& s = g.samples(0);
    const int n = g.grid().n;
    const double inv_dx = 1.0 / g.grid().dx();
    double slope = 0.0;
    for (int j = 0; j < n; ++j)
        slope = std::max(slope, std::abs(s[(j + 1) % n] - s[j]) * inv_dx);
    return slope;
}

double pairing(const BoundaryField& f, const BoundaryField& g) {
    if (!(f.grid() == g.grid()) || f.components() != g.components())
        throw std::invalid_argument("pairing: mismatched fields");
    double acc = 0.0;
    for (int c = 0; c < f.components(); ++c)
        for (int j = 0; j < f.grid().n; ++j) acc += f.samples(c)[j] * g.samples(c)[j];
    return acc * f.grid().dx();
}

namespace {

BoundaryField zip(const BoundaryField& a, const BoundaryField& b,
                  const std::function<double(double, double)>& op) {
    if (!(a.grid() == b.grid()) || a.components() != b.components())
        throw std::invalid_argument("field arithmetic: mismatched fields");
    std::vector<std::vector<double>> comps;
    for (int c = 0; c < a.components(); ++c) {
        std::vector<double> s(a.grid().n);
        for (int j = 0; j < a.grid().n; ++j) s[j] = op(a.samples(c)[j], b.samples(c)[j]);
        comps.push_back(std::move(s));
    }
    return BoundaryField(a.grid(), std::move(comps));
}

}  // namespace

BoundaryField add(const BoundaryField& a, const BoundaryField& b) {
    return zip(a, b, [](double x, double y) { return x + y; });
}
BoundaryField sub(const BoundaryField& a, const BoundaryField& b) {
    return zip(a, b, [](double x, double y) { return x - y; });
}
BoundaryField scale(const BoundaryField& a, double s) {
    std::vector<std::vector<double>> comps;
    for (int c = 0; c < a.components(); ++c) {
        std::vector<double> v = a.samples(c);
        for (double& x : v) x *= s;
        comps.push_back(std::move(v));
    }
    return BoundaryField(a.grid(), std::move(comps));
}
BoundaryField add_constant(const BoundaryField& a, double c) {
    std::vector<std::vector<double>> comps;
    for (int cc = 0; cc < a.components(); ++cc) {
        std::vector<double> v = a.samples(cc);
        for (double& x : v) x += c;
        comps.push_back(std::move(v));
    }
    return BoundaryField(a.grid(), std::move(comps));
}

BoundaryField dealiased_product(const BoundaryField& eta, const BoundaryField& f) {
    if (eta.components() != 1) throw std::invalid_argument("dealiased_product: eta must be scalar");
    if (!(eta.grid() == f.grid())) throw std::invalid_argument("dealiased_product: grid mismatch");
    const int n = eta.grid().n;
    const int n2 = 2 * n;

    auto pad = [&](const std::vector<cdouble>& sp) {
        std::vector<cdouble> out(n2, cdouble{0.0});
        for (int s = 0; s < n; ++s) {
            int k = s < n / 2 ? s : s - n;
            out[k >= 0 ? k : k + n2] = sp[s];
        }
        return fft::inverse_real(out);
    };

    std::vector<double> eta2 = pad(eta.spectrum(0));
    std::vector<std::vector<cdouble>> spectra;
    for (int c = 0; c < f.components(); ++c) {
        std::vector<double> fc2 = pad(f.spectrum(c));
        for (int j = 0; j < n2; ++j) fc2[j] *= eta2[j];
        std::vector<cdouble> sp2 = fft::forward_real(fc2);
        std::vector<cdouble> sp(n, cdouble{0.0});
        for (int s = 0; s < n; ++s) {
            int k = s < n / 2 ? s : s - n;
            if (k == -n / 2) continue;  // Nyquist dropped
            sp[s] = sp2[k >= 0 ? k : k + n2];
        }
        spectra.push_back(std::move(sp));
    }
    return BoundaryField::from_spectrum(f.grid(), std::move(spectra));
}

BoundaryField apply_multiplier(const FourierMultiplier& M, const BoundaryField& g) {
    if (M.dim != g.components())
        throw std::invalid_argument("apply_multiplier: component count of M and g disagree");
    const BoundaryGrid& grid = g.grid();
    const int n = grid.n;
    std::vector<std::vector<cdouble>> out(M.dim, std::vector<cdouble>(n, cdouble{0.0}));
    for (int s = 0; s < n; ++s) {
        int k = grid.mode_of_slot(s);
        if (k == -n / 2) continue;  // Nyquist zeroed to preserve reality
        Mat2 m = M.entries(grid.kappa(k));
        if (M.dim == 1) {
            out[0][s] = m.a11 * g.spectrum(0)[s];
        } else {
            cdouble g1 = g.spectrum(0)[s], g2 = g.spectrum(1)[s];
            out[0][s] = mul2(m, g1, g2, 0);
            out[1][s] = mul2(m, g1, g2, 1);
        }
    }
    return BoundaryField::from_spectrum(grid, std::move(out));
}

double reality_defect(const FourierMultiplier& M, const BoundaryGrid& grid) {
    double worst = 0.0;
    for (int k = 0; k < grid.n / 2; ++k) {
        Mat2 p = M.entries(grid.kappa(k));
        Mat2 q = M.entries(grid.kappa(-k));
        worst = std::max({worst, std::abs(q.a11 - std::conj(p.a11)),
                          std::abs(q.a12 - std::conj(p.a12)), std::abs(q.a21 - std::conj(p.a21)),
                          std::abs(q.a22 - std::conj(p.a22))});
    }
    return worst;
}

FourierMultiplier multiplier_identity(int dim) {
    return {dim, [](double) {
                Mat2 m;
                m.a11 = m.a22 = 1.0;
                return m;
            }};
}

FourierMultiplier multiplier_derivative() {
    return {1, [](double kappa) {
                Mat2 m;
                m.a11 = cdouble{0.0, kappa};
                return m;
            }};
}

FourierMultiplier multiplier_hilbert() {
    return {1, [](double kappa) {
                Mat2 m;
                m.a11 = kappa > 0 ? cdouble{0.0, -1.0} : (kappa < 0 ? cdouble{0.0, 1.0} : cdouble{0.0});
                return m;
            }};
}

FourierMultiplier multiplier_abs_derivative() {
    return {1, [](double kappa) {
                Mat2 m;
                m.a11 = std::abs(kappa);
                return m;
            }};
}

FourierMultiplier multiplier_poisson(double y) {
    if (y < 0.0) throw std::invalid_argument("multiplier_poisson: negative height");
    return {1, [y](double kappa) {
                Mat2 m;
                m.a11 = std::exp(-std::abs(kappa) * y);
                return m;
            }};
}

BoundaryField hilbert_transform(const BoundaryField& g) {
    if (g.components() != 1) throw std::invalid_argument("hilbert_transform: scalar field required");
    return apply_multiplier(multiplier_hilbert(), g);
}

BoundaryField tangential_derivative(const BoundaryField& g) {
    if (g.components() != 1)
        throw std::invalid_argument("tangential_derivative: scalar field required");
    return apply_multiplier(multiplier_derivative(), g);
}

BoundaryField harmonic_extension_sample(const BoundaryField& g, double y) {
    if (y < 0.0) throw std::invalid_argument("harmonic_extension_sample: negative height");
    FourierMultiplier M{g.components(), [y](double kappa) {
                            Mat2 m;
                            m.a11 = m.a22 = std::exp(-std::abs(kappa) * y);
                            return m;
                        }};
    return apply_multiplier(M, g);
}

// --- BumpSpec ---

BumpSpec::BumpSpec(std::function<double(double)> shape, std::function<double(double)> shape_deriv,
                   double half_width, bool normalize)
    : a_(half_width), shape_(std::move(shape)), shape_deriv_(std::move(shape_deriv)) {
    if (!(a_ > 0.0)) throw std::invalid_argument("BumpSpec: half width must be positive");
    // trapezoid on the unit support; the shape and all derivatives vanish at the
    // endpoints so this converges super-algebraically
    const int nq = 257;
    nodes_.resize(nq);
    vals_.resize(nq);
    qweight_ = 2.0 / (nq - 1);
    double mass_unit = 0.0;
    for (int i = 0; i < nq; ++i) {
        nodes_[i] = -1.0 + qweight_ * i;
        vals_[i] = shape_(nodes_[i]);
        double w = (i == 0 || i == nq - 1) ? 0.5 : 1.0;
        mass_unit += w * vals_[i];
    }
    mass_unit *= qweight_ * a_;  // mass of shape(s/a) over [-a, a]
    mass_ = mass_unit;
    if (normalize) {
        scale_ = 1.0 / mass_unit;
        mass_ = 1.0;
    }
}

BumpSpec BumpSpec::standard() {
    auto shape = [](double s) {
        double d = 1.0 - s * s;
        return d > 0.0 ? std::exp(-1.0 / d) : 0.0;
    };
    auto dshape = [](double s) {
        double d = 1.0 - s * s;
        return d > 0.0 ? std::exp(-1.0 / d) * (-2.0 * s) / (d * d) : 0.0;
    };
    return BumpSpec(shape, dshape, 1.0, true);
}

double BumpSpec::value(double s) const {
    if (std::abs(s) >= a_) return 0.0;
    return scale_ * shape_(s / a_);  // zeta(s) = scale * shape(s/a)
}

double BumpSpec::deriv(double s) const {
    if (std::abs(s) >= a_) return 0.0;
    return scale_ * shape_deriv_(s / a_) / a_;
}

namespace {

// integrate v(u) * trig(w * a * u) over u in [-1, 1] on the tabulated nodes
double bump_moment(const std::vector<double>& nodes, const std::vector<double>& vals,
                   double qweight, double warg, int power, bool use_cos) {
    const int nq = static_cast<int>(nodes.size());
    double acc = 0.0;
    for (int i = 0; i < nq; ++i) {
        double w = (i == 0 || i == nq - 1) ? 0.5 : 1.0;
        double u = nodes[i];
        double up = power == 0 ? 1.0 : (power == 1 ? u : u * u);
        double tr = use_cos ? std::cos(warg * u) : std::sin(warg * u);
        acc += w * vals[i] * up * tr;
    }
    return acc * qweight;
}

}  // namespace

// zetahat(w) = int_{-a}^{a} zeta(s) cos(w s) ds = scale * a * int_{-1}^{1} shape(u) cos(w a u) du
double BumpSpec::fhat(double w) const {
    return scale_ * a_ * bump_moment(nodes_, vals_, qweight_, w * a_, 0, true);
}

double BumpSpec::fhat_d1(double w) const {
    // d/dw: -int s zeta(s) sin(ws) ds = -scale * a^2 * int u shape(u) sin(w a u) du
    return -scale_ * a_ * a_ * bump_moment(nodes_, vals_, qweight_, w * a_, 1, false);
}

double BumpSpec::fhat_d2(double w) const {
    return -scale_ * a_ * a_ * a_ * bump_moment(nodes_, vals_, qweight_, w * a_, 2, true);
}

std::array<double, 3> BumpSpec::moments(double w) const {
    const int nq = static_cast<int>(nodes_.size());
    const double warg = w * a_;
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < nq; ++i) {
        const double wt = (i == 0 || i == nq - 1) ? 0.5 : 1.0;
        const double u = nodes_[i];
        const double c = std::cos(warg * u), s = std::sin(warg * u);
        const double v = wt * vals_[i];
        m0 += v * c;
        m1 += v * u * s;
        m2 += v * u * u * c;
    }
    return {scale_ * a_ * qweight_ * m0, -scale_ * a_ * a_ * qweight_ * m1,
            -scale_ * a_ * a_ * a_ * qweight_ * m2};
}

double BumpSpec::t_derivative_moment() const {
    // int |u| |(u zeta(u))'| du over the support; the substitution u = a v turns it
    // into a^2 * scale * int |v| |shape(v) + v shape'(v)| dv
    const int nq = static_cast<int>(nodes_.size());
    double acc = 0.0;
    for (int i = 0; i < nq; ++i) {
        double w = (i == 0 || i == nq - 1) ? 0.5 : 1.0;
        double u = nodes_[i];
        acc += w * std::abs(u) * std::abs(vals_[i] + u * shape_deriv_(u));
    }
    return acc * qweight_ * scale_ * a_ * a_;
}

BoundaryField mollifier_extension_sample(const BoundaryField& g, double t, const BumpSpec& bump) {
    if (!(t > 0.0)) throw std::invalid_argument("mollifier_extension_sample: t must be positive");
    if (std::abs(bump.mass() - 1.0) > 1e-10)
        throw std::invalid_argument("mollifier_extension_sample: bump mass differs from one");
    FourierMultiplier M{g.components(), [&bump, t](double kappa) {
                            Mat2 m;
                            m.a11 = m.a22 = bump.fhat(t * kappa);
                            return m;
                        }};
    return apply_multiplier(M, g);
}

}  // namespace dtnlab
