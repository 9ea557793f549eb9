#pragma once

#include <complex>
#include <vector>

namespace dtnlab::fft {

// Forward DFT with 1/n normalization: out[s] = (1/n) sum_j in[j] e^{-2pi i s j / n}.
// Slot s holds integer mode k = s for s < n/2 and k = s - n otherwise.
std::vector<std::complex<double>> forward(const std::vector<std::complex<double>>& in);

// Unnormalized synthesis: out[j] = sum_s in[s] e^{+2pi i s j / n}.
std::vector<std::complex<double>> inverse(const std::vector<std::complex<double>>& in);

std::vector<std::complex<double>> forward_real(const std::vector<double>& in);

// Synthesis of a Hermitian spectrum; imaginary leakage is discarded.
std::vector<double> inverse_real(const std::vector<std::complex<double>>& in);

}  // namespace dtnlab::fft
