#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "dtnlab/measures.hpp"
#include "dtnlab/spectral.hpp"
#include "dtnlab/stokes.hpp"

namespace dtnlab {

enum class ExtensionKind { mollifier, harmonic, constant_in_t };

// eta and its first/second derivatives on the slice at height t
struct EtaSlices {
    std::vector<double> eta, ex, et, exx, ext, ett;
};

// Extension of a boundary Lipschitz function into the half-plane. The mollifier
// kind is zeta_t * eta (multiplier zetahat(t kappa)); the harmonic kind is the
// Poisson extension; constant_in_t repeats the boundary values (used where an
// extension independent of t is wanted).
class EtaExtension {
  public:
    EtaExtension(BoundaryField eta, ExtensionKind kind, BumpSpec bump = BumpSpec::standard());
    EtaSlices slices(double t) const;
    const BoundaryField& boundary() const { return eta_; }
    ExtensionKind kind() const { return kind_; }

  private:
    BoundaryField eta_;
    ExtensionKind kind_;
    BumpSpec bump_;
};

struct IdentityReport {
    double lhs = 0.0;
    std::vector<std::pair<std::string, double>> terms;
    double rhs_total = 0.0;
    double abs_residual = 0.0;
    double rel_residual = 0.0;
    double tail_bound = 0.0;  // bound on the truncated t > Y remainder
    int levels = 0;
};

// identity for int_boundary [Lambda,eta]f . g against the four volume terms
IdentityReport key_identity_check(const BoundaryField& f, const BoundaryField& g,
                                  const EtaExtension& ext, const GradedGrid& gg);

// six-term t-weighted identity for int q (grad eta . h)
IdentityReport pressure_identity_check(const BoundaryField& f, const BoundaryField& g,
                                       const EtaExtension& ext, const GradedGrid& gg);

// both checks off one set of interior slices (they share the same volume data)
std::pair<IdentityReport, IdentityReport> identity_pair_check(const BoundaryField& f,
                                                              const BoundaryField& g,
                                                              const EtaExtension& ext,
                                                              const GradedGrid& gg);

// --- analytic test fields v = (v_j^alpha) for the bilinear identity ---

struct TestFieldSlices {
    // index [j][alpha], j = derivative direction (0 = x, 1 = t), alpha = component
    std::array<std::array<std::vector<double>, 2>, 2> v, dvdx, dvdt;
};

class TestField {
  public:
    virtual ~TestField() = default;
    virtual TestFieldSlices slices(double t) const = 0;
    virtual bool decays() const = 0;
};

// C-infinity plateau: 1 on [0, flat_until], 0 beyond support_end
struct SmoothCutoff {
    double flat_until = 1.0;
    double support_end = 4.0;
    double value(double t) const;
    double deriv(double t) const;
};

// v_j^alpha(x, t) = profile_j^alpha(x) * cutoff(t), band-limited in x
class SeparableTestField : public TestField {
  public:
    SeparableTestField(BoundaryGrid grid, std::array<std::array<BoundaryField, 2>, 2> profiles,
                       SmoothCutoff cutoff);
    static SeparableTestField random(const BoundaryGrid& grid, int band_limit, std::uint64_t seed,
                                     int trial, SmoothCutoff cutoff);
    TestFieldSlices slices(double t) const override;
    bool decays() const override { return true; }

  private:
    BoundaryGrid grid_;
    std::array<std::array<BoundaryField, 2>, 2> profiles_;       // values
    std::array<std::array<BoundaryField, 2>, 2> profiles_dx_;    // x-derivatives
    SmoothCutoff cutoff_;
};

// the substitution v_j^alpha = (grad_j eta) h^alpha used in the half-space proof
class GradEtaTimesSolution : public TestField {
  public:
    GradEtaTimesSolution(EtaExtension ext, StreamSolution sol);
    TestFieldSlices slices(double t) const override;
    bool decays() const override { return true; }

  private:
    EtaExtension ext_;
    StreamSolution sol_;
};

// a field with no t-decay; exists to exercise the decay precondition
class NonDecayingTestField : public TestField {
  public:
    explicit NonDecayingTestField(BoundaryGrid grid) : grid_(grid) {}
    TestFieldSlices slices(double t) const override;
    bool decays() const override { return false; }

  private:
    BoundaryGrid grid_;
};

// t-weighted bilinear identity for int grad h . v (h, pi solved from g)
IdentityReport dahlberg_identity_check(const BoundaryField& g, const TestField& v,
                                       const GradedGrid& gg);

// |int grad h . v| over the product of square-function factors
double bilinear_ratio(const BoundaryField& g, const TestField& v, const GradedGrid& gg,
                      double N0);

// |int q grad eta . h| / (||eta||_{C^{0,1}} ||f||_2 ||(h)*||_2)
double q_eta_h_ratio(const BoundaryField& f, const BoundaryField& g, const EtaExtension& ext,
                     const GradedGrid& gg, double N0);

// largest active mode of a field (for dealiasing preconditions)
int band_limit_of(const BoundaryField& f);

struct RatioEnsemble {
    std::vector<double> ratios;
    double max_ratio = 0.0;
};
// seeded bilinear ratios over groups of random data g, each paired with several
// random separable test fields; the solved slices are shared within a group
RatioEnsemble bilinear_ratio_ensemble(const BoundaryGrid& grid, const GradedGrid& gg,
                                      int band_limit, std::uint64_t seed, int groups,
                                      int per_group, double N0);
// seeded |int q grad(eta) . h| ratios over random (f, g, eta) triples
RatioEnsemble q_eta_h_ratio_ensemble(const BoundaryGrid& grid, const GradedGrid& gg,
                                     int band_limit, std::uint64_t seed, int trials, double N0);

}  // namespace dtnlab
