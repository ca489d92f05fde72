#include "wsf/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace wsf::fft {

namespace {

// fftw planning is not thread-safe; execution with new arrays is.
std::mutex g_plan_mutex;

fftw_plan r2c_plan(std::size_t n) {
    static std::map<std::size_t, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> in(n);
    std::vector<fftw_complex> out(n / 2 + 1);
    fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out.data(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(n, p);
    return p;
}

fftw_plan c2r_plan(std::size_t n) {
    static std::map<std::size_t, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<fftw_complex> in(n / 2 + 1);
    std::vector<double> out(n);
    fftw_plan p = fftw_plan_dft_c2r_1d(static_cast<int>(n), in.data(), out.data(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(n, p);
    return p;
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::vector<std::complex<double>> rfft(const std::vector<double>& in, std::size_t n) {
    if (n == 0 || in.size() > n)
        throw std::invalid_argument("rfft: need n >= input length, n > 0");
    std::vector<double> buf(n, 0.0);
    std::memcpy(buf.data(), in.data(), in.size() * sizeof(double));
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_plan p = r2c_plan(n);
    fftw_execute_dft_r2c(p, buf.data(), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

std::vector<double> irfft(const std::vector<std::complex<double>>& spec, std::size_t n) {
    if (spec.size() != n / 2 + 1)
        throw std::invalid_argument("irfft: spectrum size must be n/2+1");
    std::vector<std::complex<double>> buf = spec;  // c2r destroys its input
    std::vector<double> out(n);
    fftw_plan p = c2r_plan(n);
    fftw_execute_dft_c2r(p, reinterpret_cast<fftw_complex*>(buf.data()), out.data());
    const double scale = 1.0 / static_cast<double>(n);
    for (double& v : out) v *= scale;
    return out;
}

std::vector<double> circular_cross_correlation(const std::vector<double>& a,
                                               const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("circular_cross_correlation: equal non-zero lengths required");
    const std::size_t L = a.size();
    auto fa = rfft(a, L);
    auto fb = rfft(b, L);
    for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= std::conj(fb[k]);
    return irfft(fa, L);
}

std::vector<double> convolve_same(const std::vector<double>& x,
                                  const std::vector<double>& kernel) {
    const std::size_t n = x.size(), m = kernel.size();
    if (n == 0 || m == 0) throw std::invalid_argument("convolve_same: empty input");
    const std::size_t full = n + m - 1;
    const std::size_t nfft = next_pow2(full);
    auto fx = rfft(x, nfft);
    auto fk = rfft(kernel, nfft);
    for (std::size_t k = 0; k < fx.size(); ++k) fx[k] *= fk[k];
    auto conv = irfft(fx, nfft);
    // centered slice of the full convolution
    std::vector<double> out(n);
    const std::size_t off = (m - 1) / 2;
    for (std::size_t i = 0; i < n; ++i) out[i] = conv[i + off];
    return out;
}

}  // namespace wsf::fft
