#include "dtnlab/commutator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace dtnlab {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::mt19937_64 trial_engine(std::uint64_t seed, int trial, std::uint64_t stream) {
    return std::mt19937_64(mix64(seed * 0x100000001B3ULL + 0x9E3779B9ULL * stream + trial));
}

// band-limited zero-mean spectrum with coefficients ~ N(0,1)/k^decay, Hermitian
std::vector<cdouble> random_spectrum(const BoundaryGrid& grid, int band_limit,
                                     std::mt19937_64& eng, double decay) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<cdouble> sp(grid.n, cdouble{0.0});
    for (int k = 1; k <= band_limit; ++k) {
        double amp = 1.0 / std::pow(static_cast<double>(k), decay);
        cdouble c{gauss(eng) * amp, gauss(eng) * amp};
        sp[grid.slot_of_mode(k)] = c;
        sp[grid.slot_of_mode(-k)] = std::conj(c);
    }
    return sp;
}

}  // namespace

BoundaryField random_eta(const BoundaryGrid& grid, int band_limit, std::uint64_t seed, int trial,
                         bool unit_lipschitz) {
    auto eng = trial_engine(seed, trial, 1);
    auto f = BoundaryField::from_spectrum(grid, {random_spectrum(grid, band_limit, eng, 1.5)});
    if (!unit_lipschitz) return f;
    double norm = lipschitz_norm(f);
    if (norm <= 0.0) throw std::runtime_error("random_eta: degenerate draw");
    return scale(f, 1.0 / norm);
}

BoundaryField random_f2(const BoundaryGrid& grid, int band_limit, std::uint64_t seed, int trial,
                        bool unit_l2) {
    auto eng = trial_engine(seed, trial, 2);
    auto s1 = random_spectrum(grid, band_limit, eng, 0.5);
    auto s2 = random_spectrum(grid, band_limit, eng, 0.5);
    auto f = BoundaryField::from_spectrum(grid, {std::move(s1), std::move(s2)});
    if (!unit_l2) return f;
    double norm = l2_norm(f);
    if (norm <= 0.0) throw std::runtime_error("random_f2: degenerate draw");
    return scale(f, 1.0 / norm);
}

BoundaryField random_scalar(const BoundaryGrid& grid, int band_limit, std::uint64_t seed,
                            int trial, bool unit_l2) {
    auto eng = trial_engine(seed, trial, 3);
    auto f = BoundaryField::from_spectrum(grid, {random_spectrum(grid, band_limit, eng, 0.5)});
    if (!unit_l2) return f;
    double norm = l2_norm(f);
    if (norm <= 0.0) throw std::runtime_error("random_scalar: degenerate draw");
    return scale(f, 1.0 / norm);
}

BoundaryField commutator_apply(const BoundaryField& eta, const BoundaryField& f) {
    if (eta.components() != 1) throw std::invalid_argument("commutator_apply: eta must be scalar");
    BoundaryField lam_of_etaf = apply_dtn(dealiased_product(eta, f));
    BoundaryField eta_lamf = dealiased_product(eta, apply_dtn(f));
    return sub(lam_of_etaf, eta_lamf);
}

BoundaryField dtn_hilbert_form(const BoundaryField& f) {
    if (f.components() != 2)
        throw std::invalid_argument("dtn_hilbert_form: two-component field required");
    BoundaryField f1 = f.component(0), f2 = f.component(1);
    BoundaryField df1 = tangential_derivative(f1), df2 = tangential_derivative(f2);
    BoundaryField h1 = hilbert_transform(df1), h2 = hilbert_transform(df2);
    const int n = f.grid().n;
    std::vector<double> c1(n), c2(n);
    for (int j = 0; j < n; ++j) {
        c1[j] = 2.0 * h1.samples(0)[j] + df2.samples(0)[j];
        c2[j] = -df1.samples(0)[j] + 2.0 * h2.samples(0)[j];
    }
    return BoundaryField::vec2(f.grid(), std::move(c1), std::move(c2));
}

double commutator_ratio(const BoundaryField& eta, const BoundaryField& f, double p) {
    if (!(p > 1.0) || !std::isfinite(p))
        throw std::invalid_argument("commutator_ratio: p must satisfy 1 < p < infinity");
    const double denom = lipschitz_norm(eta) * lp_norm(f, p);
    if (denom <= 0.0) throw std::invalid_argument("commutator_ratio: zero denominator");
    return lp_norm(commutator_apply(eta, f), p) / denom;
}

CalderonResult calderon_commutator(const BoundaryField& eta, const BoundaryField& g) {
    if (eta.components() != 1 || g.components() != 1)
        throw std::invalid_argument("calderon_commutator: scalar fields required");
    const double gnorm = l2_norm(g);
    if (gnorm <= 0.0) throw std::invalid_argument("calderon_commutator: ||g||_2 = 0");
    // constants commute with H d_x exactly
    if (lipschitz_seminorm(eta) == 0.0) return {BoundaryField::zero(g.grid(), 1), 0.0};
    BoundaryField lhs = hilbert_transform(tangential_derivative(dealiased_product(eta, g)));
    BoundaryField rhs = dealiased_product(eta, hilbert_transform(tangential_derivative(g)));
    CalderonResult out{sub(lhs, rhs), 0.0};
    const double lip = lipschitz_norm(eta);
    out.ratio = lip > 0.0 ? l2_norm(out.field) / (lip * gnorm) : 0.0;
    return out;
}

void SweepConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("SweepConfig: trials must be >= 1");
    if (!(p > 1.0) || !std::isfinite(p))
        throw std::invalid_argument("SweepConfig: p must satisfy 1 < p < infinity");
    if (band_limit < 1 || band_limit > n / 4)
        throw std::invalid_argument("SweepConfig: band_limit must lie in [1, n/4]");
    BoundaryGrid check(n, L);  // validates n and L
}

namespace {

SweepReport finish_report(SweepConfig cfg, std::vector<double> ratios) {
    SweepReport rep;
    rep.config = cfg;
    rep.ratios = std::move(ratios);
    std::vector<double> sorted = rep.ratios;
    std::sort(sorted.begin(), sorted.end());
    const int t = static_cast<int>(sorted.size());
    rep.max_ratio = sorted.back();
    double acc = 0.0;
    for (double r : sorted) acc += r;
    rep.mean_ratio = acc / t;
    rep.q50 = sorted[static_cast<int>(0.50 * (t - 1))];
    rep.q90 = sorted[static_cast<int>(0.90 * (t - 1))];
    return rep;
}

double sweep_trial(const SweepConfig& cfg, const BoundaryGrid& grid, int trial) {
    BoundaryField eta = random_eta(grid, cfg.band_limit, cfg.seed, trial);
    BoundaryField f = random_f2(grid, cfg.band_limit, cfg.seed, trial);
    return commutator_ratio(eta, f, cfg.p);
}

}  // namespace

SweepReport ensemble_sweep(const SweepConfig& cfg) {
    cfg.validate();
    BoundaryGrid grid(cfg.n, cfg.L);
    std::vector<double> ratios(cfg.trials, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < cfg.trials; ++t) ratios[t] = sweep_trial(cfg, grid, t);
    return finish_report(cfg, std::move(ratios));
}

namespace reference {

SweepReport ensemble_sweep(const SweepConfig& cfg) {
    cfg.validate();
    BoundaryGrid grid(cfg.n, cfg.L);
    std::vector<double> ratios(cfg.trials, 0.0);
    for (int t = 0; t < cfg.trials; ++t) ratios[t] = sweep_trial(cfg, grid, t);
    return finish_report(cfg, std::move(ratios));
}

}  // namespace reference

std::vector<double> frequency_scan(const BoundaryField& eta, int k_max) {
    const BoundaryGrid& grid = eta.grid();
    if (k_max < 1 || k_max > grid.n / 4)
        throw std::invalid_argument("frequency_scan: k_max must lie in [1, n/4]");
    if (lipschitz_seminorm(eta) == 0.0) return std::vector<double>(k_max, 0.0);
    const double lip = lipschitz_norm(eta);
    std::vector<double> out(k_max, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int k = 1; k <= k_max; ++k) {
        std::vector<cdouble> sp(grid.n, cdouble{0.0});
        sp[grid.slot_of_mode(k)] = 0.5;
        sp[grid.slot_of_mode(-k)] = 0.5;
        auto f = BoundaryField::from_spectrum(
            grid, {sp, std::vector<cdouble>(grid.n, cdouble{0.0})});
        BoundaryField c = commutator_apply(eta, f);
        out[k - 1] = lip > 0.0 ? l2_norm(c) / (lip * l2_norm(f)) : 0.0;
    }
    return out;
}

double plateau_statistic(const std::vector<double>& ratios) {
    const int k = static_cast<int>(ratios.size());
    if (k < 2) throw std::invalid_argument("plateau_statistic: need at least two ratios");
    double lo = 0.0, hi = 0.0;
    for (int i = 0; i < k / 2; ++i) lo = std::max(lo, ratios[i]);
    for (int i = k / 2; i < k; ++i) hi = std::max(hi, ratios[i]);
    if (lo == 0.0) return hi == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return hi / lo;
}

}  // namespace dtnlab
