#pragma once

#include <functional>

#include "dtnlab/identities.hpp"
#include "dtnlab/measures.hpp"
#include "dtnlab/spectral.hpp"

namespace dtnlab {

struct GraphDomain {
    BoundaryField psi;
    double lipschitz = 0.0;  // seminorm of psi
};
GraphDomain make_graph_domain(BoundaryField psi);

// band-limited triangle wave (smooth stand-in for an |x|-type corner)
BoundaryField make_smooth_sawtooth(const BoundaryGrid& grid, double amplitude, int modes);

// rho(x, t) = (x, phi(x, t)) with phi = c0 t + (zeta_t * psi)(x)
class KenigSteinMap {
  public:
    KenigSteinMap(BoundaryField psi, BumpSpec bump, double c0);

    struct MapSlices {
        std::vector<double> phi, phi_t, phi_x, phi_xx, phi_xt, phi_tt;
    };
    MapSlices slices(double t) const;

    struct PointDerivatives {
        double phi = 0.0, phi_t = 0.0, phi_x = 0.0, phi_xx = 0.0, phi_xt = 0.0, phi_tt = 0.0;
    };
    PointDerivatives at(double x, double t) const;  // t > 0
    double boundary_value(double x) const;          // the t -> 0 limit, psi(x)

    double c0() const { return c0_; }
    const BoundaryField& psi() const { return psi_; }
    const BumpSpec& bump() const { return bump_; }

  private:
    BoundaryField psi_;
    BumpSpec bump_;
    double c0_ = 0.0;
    EtaExtension mollified_;  // zeta_t * psi and its derivatives
};

struct C0Policy {
    bool automatic = true;
    double fixed_value = 1.0;
    static C0Policy fixed(double v) { return {false, v}; }
};

// c0 search: start at 8 (1 + M * bump moment), double until min d(phi)/dt >= 1/8
// on the sampled grid; gives up after 10 doublings.
KenigSteinMap build_map(const BoundaryField& psi, const BumpSpec& bump,
                        const GradedGrid& check_grid, C0Policy policy = {});

struct MapVerification {
    double c0 = 0.0;
    double min_phi_t = 0.0;
    bool phi_t_ok = false;  // min d(phi)/dt >= 1/8
    double bilip_lower = 0.0, bilip_upper = 0.0;  // singular value range of D rho
    double carleson_hess_sq_t = 0.0;              // carleson norm of |hess phi|^2 t
    double carleson_hess_t = 0.0;                 // carleson norm of |hess phi| t
};
MapVerification verify_map(const KenigSteinMap& map, const GradedGrid& gg,
                           const TentFamily& tents);

// int over rho((0,Y] x torus) of the integrand, pulled back: integrand(rho) * d(phi)/dt
double pullback_integral(const KenigSteinMap& map,
                         const std::function<double(double, double)>& integrand,
                         const GradedGrid& gg);
// same restricted to the tent Q x (0, l], Q = [x0, x0 + l_Q)
double pullback_integral_tent(const KenigSteinMap& map,
                              const std::function<double(double, double)>& integrand,
                              const GradedGrid& gg, double x0, double len_q, double height);

struct ExtensionReport {
    double lip_eta = 0.0;
    double grad_sup = 0.0;           // max |grad G| over the sampled grid
    double grad_ratio = 0.0;         // grad_sup / lip_eta
    double carleson_hess_t = 0.0;    // |hess G| t
    double carleson_hess_sq_t = 0.0; // |hess G|^2 t
    double trace_sup_err = 0.0;      // sup |G(., y_min) - eta|
};
ExtensionReport lipschitz_extension_report(const BoundaryField& eta, const BumpSpec& bump,
                                  const GradedGrid& gg, const TentFamily& tents);

}  // namespace dtnlab
