#include "dtnlab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace dtnlab::fft {

namespace {

// FFTW's planner is not thread-safe; plan creation is serialized and each
// thread keeps its own plan/buffer pair per transform size.
std::mutex planner_mutex;

struct PlanPair {
    int n = 0;
    fftw_complex* buf = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    explicit PlanPair(int n_) : n(n_) {
        std::lock_guard<std::mutex> lock(planner_mutex);
        buf = fftw_alloc_complex(static_cast<size_t>(n));
        fwd = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~PlanPair() {
        std::lock_guard<std::mutex> lock(planner_mutex);
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (buf) fftw_free(buf);
    }
    PlanPair(const PlanPair&) = delete;
    PlanPair& operator=(const PlanPair&) = delete;
};

PlanPair& plans_for(int n) {
    thread_local std::map<int, std::unique_ptr<PlanPair>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, std::make_unique<PlanPair>(n)).first;
    return *it->second;
}

}  // namespace

std::vector<std::complex<double>> forward(const std::vector<std::complex<double>>& in) {
    const int n = static_cast<int>(in.size());
    if (n == 0) throw std::invalid_argument("fft: empty input");
    PlanPair& pp = plans_for(n);
    for (int j = 0; j < n; ++j) {
        pp.buf[j][0] = in[j].real();
        pp.buf[j][1] = in[j].imag();
    }
    fftw_execute(pp.fwd);
    std::vector<std::complex<double>> out(n);
    const double scale = 1.0 / n;
    for (int j = 0; j < n; ++j) out[j] = {pp.buf[j][0] * scale, pp.buf[j][1] * scale};
    return out;
}

std::vector<std::complex<double>> inverse(const std::vector<std::complex<double>>& in) {
    const int n = static_cast<int>(in.size());
    if (n == 0) throw std::invalid_argument("fft: empty input");
    PlanPair& pp = plans_for(n);
    for (int j = 0; j < n; ++j) {
        pp.buf[j][0] = in[j].real();
        pp.buf[j][1] = in[j].imag();
    }
    fftw_execute(pp.bwd);
    std::vector<std::complex<double>> out(n);
    for (int j = 0; j < n; ++j) out[j] = {pp.buf[j][0], pp.buf[j][1]};
    return out;
}

std::vector<std::complex<double>> forward_real(const std::vector<double>& in) {
    std::vector<std::complex<double>> c(in.begin(), in.end());
    return forward(c);
}

std::vector<double> inverse_real(const std::vector<std::complex<double>>& in) {
    auto c = inverse(in);
    std::vector<double> out(c.size());
    for (size_t j = 0; j < c.size(); ++j) out[j] = c[j].real();
    return out;
}

}  // namespace dtnlab::fft
