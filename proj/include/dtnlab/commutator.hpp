#pragma once

#include <cstdint>
#include <vector>

#include "dtnlab/spectral.hpp"
#include "dtnlab/stokes.hpp"

namespace dtnlab {

// [Lambda, eta] f = Lambda(eta f) - eta Lambda(f); products are dealiased
BoundaryField commutator_apply(const BoundaryField& eta, const BoundaryField& f);

// DtN through Hilbert-transform composition; equals apply_dtn on the nose
BoundaryField dtn_hilbert_form(const BoundaryField& f);

// ||[Lambda,eta] f||_p / (||eta||_{C^{0,1}} ||f||_p)
double commutator_ratio(const BoundaryField& eta, const BoundaryField& f, double p);

struct CalderonResult {
    BoundaryField field;  // H(d_x(eta g)) - eta H(d_x g)
    double ratio = 0.0;   // ||field||_2 / (||eta||_{C^{0,1}} ||g||_2)
};
CalderonResult calderon_commutator(const BoundaryField& eta, const BoundaryField& g);

struct SweepConfig {
    std::uint64_t seed = 42;
    int trials = 100;
    int band_limit = 32;
    int n = 256;
    double L = 2.0 * kPi;
    double p = 2.0;

    void validate() const;
};

struct SweepReport {
    SweepConfig config;
    std::vector<double> ratios;  // one per trial, trial-indexed
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
    double q50 = 0.0;
    double q90 = 0.0;
};

// Deterministic given (config, seed); per-trial RNG is derived from (seed, trial)
// so the parallel schedule cannot change the report.
SweepReport ensemble_sweep(const SweepConfig& cfg);

namespace reference {
SweepReport ensemble_sweep(const SweepConfig& cfg);  // serial baseline
}

// ratios for f = (cos(kappa_k x), 0), k = 1..k_max
std::vector<double> frequency_scan(const BoundaryField& eta, int k_max);
// max over the upper half of the scan divided by max over the lower half
double plateau_statistic(const std::vector<double>& ratios);

// seeded random band-limited trial fields (modes 1..band_limit, zero mean)
BoundaryField random_eta(const BoundaryGrid& grid, int band_limit, std::uint64_t seed, int trial,
                         bool unit_lipschitz = true);
BoundaryField random_f2(const BoundaryGrid& grid, int band_limit, std::uint64_t seed, int trial,
                        bool unit_l2 = true);
BoundaryField random_scalar(const BoundaryGrid& grid, int band_limit, std::uint64_t seed,
                            int trial, bool unit_l2 = true);

}  // namespace dtnlab
