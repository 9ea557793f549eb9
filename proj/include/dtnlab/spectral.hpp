#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

namespace dtnlab {

using cdouble = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

// Equispaced sampling of a period-L torus; n must be a power of two >= 8.
struct BoundaryGrid {
    int n = 0;
    double L = 0.0;

    BoundaryGrid() = default;
    BoundaryGrid(int n_, double L_);

    double dx() const { return L / n; }
    double x(int j) const { return L * j / n; }
    // physical wavenumber of integer mode k
    double kappa(int k) const { return 2.0 * kPi * k / L; }
    int mode_of_slot(int s) const { return s < n / 2 ? s : s - n; }
    int slot_of_mode(int k) const { return k >= 0 ? k : k + n; }
    int nyquist_slot() const { return n / 2; }
    bool operator==(const BoundaryGrid&) const = default;
};

// Real periodic field with 1 or 2 components. Samples and Fourier coefficients
// are kept together and never mutated after construction, so fields are safe
// to share across threads. Convention: ghat(k) = (1/n) sum_j g_j e^{-i kappa_k x_j},
// synthesis g_j = sum_k ghat(k) e^{+i kappa_k x_j}.
class BoundaryField {
  public:
    BoundaryField(BoundaryGrid grid, std::vector<std::vector<double>> comps);

    static BoundaryField scalar(BoundaryGrid grid, std::vector<double> samples);
    static BoundaryField vec2(BoundaryGrid grid, std::vector<double> c1, std::vector<double> c2);
    static BoundaryField zero(BoundaryGrid grid, int ncomp);
    // Synthesizes real samples; spectra must be in FFT slot order.
    static BoundaryField from_spectrum(BoundaryGrid grid,
                                       std::vector<std::vector<cdouble>> spectra);

    const BoundaryGrid& grid() const { return grid_; }
    int components() const { return static_cast<int>(samples_.size()); }
    const std::vector<double>& samples(int c = 0) const { return samples_.at(c); }
    const std::vector<cdouble>& spectrum(int c = 0) const { return spectrum_.at(c); }
    cdouble coeff(int c, int k) const { return spectrum_.at(c)[grid_.slot_of_mode(k)]; }

    BoundaryField component(int c) const;
    double mean(int c = 0) const { return spectrum_.at(c)[0].real(); }

  private:
    BoundaryField() = default;
    BoundaryGrid grid_;
    std::vector<std::vector<double>> samples_;
    std::vector<std::vector<cdouble>> spectrum_;
};

// --- norms and pairings (discrete Riemann sums on the grid) ---

// ((L/n) sum_j |f(x_j)|^p)^(1/p), pointwise Euclidean magnitude across components
double lp_norm(const BoundaryField& f, double p);
double l2_norm(const BoundaryField& f);
double sup_norm(const BoundaryField& f);
// discrete C^{0,1} norm: sup |g| + sup of forward difference quotients
double lipschitz_norm(const BoundaryField& g);
// the slope part alone
double lipschitz_seminorm(const BoundaryField& g);
// (L/n) sum_j sum_c f_c(x_j) g_c(x_j)
double pairing(const BoundaryField& f, const BoundaryField& g);

BoundaryField add(const BoundaryField& a, const BoundaryField& b);
BoundaryField sub(const BoundaryField& a, const BoundaryField& b);
BoundaryField scale(const BoundaryField& a, double s);
BoundaryField add_constant(const BoundaryField& a, double c);

// 2x zero-padded pointwise product, truncated back to the base grid
BoundaryField dealiased_product(const BoundaryField& eta, const BoundaryField& f);

struct Mat2 {
    cdouble a11{0.0}, a12{0.0}, a21{0.0}, a22{0.0};
};

// k -> d x d matrix symbol, evaluated at the physical wavenumber kappa = 2*pi*k/L.
// Reality invariant M(-kappa) = conj(M(kappa)) makes real fields map to real fields.
struct FourierMultiplier {
    int dim = 1;
    std::function<Mat2(double kappa)> entries;
};

// Applies M mode-by-mode; the Nyquist mode is zeroed afterwards.
BoundaryField apply_multiplier(const FourierMultiplier& M, const BoundaryField& g);

// max over sampled modes of |M(-kappa) - conj(M(kappa))|
double reality_defect(const FourierMultiplier& M, const BoundaryGrid& grid);

FourierMultiplier multiplier_identity(int dim);
FourierMultiplier multiplier_derivative();       // i*kappa
FourierMultiplier multiplier_hilbert();          // -i*sgn(kappa)
FourierMultiplier multiplier_abs_derivative();   // |kappa|
FourierMultiplier multiplier_poisson(double y);  // e^{-|kappa| y}

BoundaryField hilbert_transform(const BoundaryField& g);
BoundaryField tangential_derivative(const BoundaryField& g);
BoundaryField harmonic_extension_sample(const BoundaryField& g, double y);

// Smooth symmetric bump on [-half_width, half_width], normalized to unit mass
// unless constructed otherwise. Moments fhat are continuous Fourier transforms
// of the (possibly periodized) kernel zeta_t, evaluated by quadrature over the
// support; super-algebraic accuracy since zeta is C_c^infinity.
class BumpSpec {
  public:
    static BumpSpec standard();  // exp(-1/(1-s^2)) on [-1,1], unit mass
    BumpSpec(std::function<double(double)> shape, std::function<double(double)> shape_deriv,
             double half_width, bool normalize);

    double half_width() const { return a_; }
    double mass() const { return mass_; }
    double value(double s) const;  // zeta(s), support |s| <= a
    double deriv(double s) const;

    // zetahat(w) = int zeta(s) cos(w s) ds and its first two w-derivatives
    double fhat(double w) const;
    double fhat_d1(double w) const;
    double fhat_d2(double w) const;
    // all three in one pass (shares the trig evaluations)
    std::array<double, 3> moments(double w) const;

    // int |u (u*zeta(u))'| du over the unit support; bounds |d/dt (zeta_t * psi)|
    // by lip(psi) times this constant
    double t_derivative_moment() const;

  private:
    double a_ = 1.0;
    double scale_ = 1.0;  // applied to shape so that the mass is one
    std::function<double(double)> shape_, shape_deriv_;
    double mass_ = 1.0;                 // mass as constructed (pre-normalization if skipped)
    std::vector<double> nodes_, vals_;  // unit-interval quadrature table
    double qweight_ = 0.0;
};

// Periodic mollification zeta_t * g as the exact multiplier zetahat(t*kappa).
BoundaryField mollifier_extension_sample(const BoundaryField& g, double t, const BumpSpec& bump);

}  // namespace dtnlab
