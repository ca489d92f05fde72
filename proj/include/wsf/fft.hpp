#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace wsf::fft {

// Forward real FFT, zero-padded to n. Returns bins 0..n/2 (inclusive).
std::vector<std::complex<double>> rfft(const std::vector<double>& in, std::size_t n);

// Inverse of rfft back to n real samples (normalized by 1/n).
std::vector<double> irfft(const std::vector<std::complex<double>>& spec, std::size_t n);

// c[l] = sum_k a[(k+l) mod L] * b[k], for l = 0..L-1.
std::vector<double> circular_cross_correlation(const std::vector<double>& a,
                                               const std::vector<double>& b);

// Linear convolution of x with kernel k, "same" alignment centered on x.
std::vector<double> convolve_same(const std::vector<double>& x,
                                  const std::vector<double>& kernel);

std::size_t next_pow2(std::size_t n);

}  // namespace wsf::fft
