#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "wsf/signal.hpp"

namespace wsf::tfa {

struct WindowSpec {
    std::size_t length = 0;  // samples, odd, >= 3
    double sigma = 0.0;      // samples
    void validate() const;
};

// Unit-L2 Gaussian window and its time derivative (per-sample units).
struct Window {
    WindowSpec spec;
    std::vector<double> values;
    std::vector<double> dvalues;  // dh/dn, same normalization as values
    double h_hat_0 = 0.0;         // sum of values
};

Window make_window(const WindowSpec& spec);

struct TFRepresentation {
    // row-major [frames x bins]; values_d is the derivative-window STFT
    std::vector<std::complex<double>> values;
    std::vector<std::complex<double>> values_d;
    std::vector<double> times;  // s, frame centers
    std::vector<double> freqs;  // Hz, bins 0..n_fft/2
    std::size_t hop = 0;        // samples
    double fs = 0.0;
    Window window;

    std::size_t frames() const { return times.size(); }
    std::size_t bins() const { return freqs.size(); }
    const std::complex<double>& at(std::size_t m, std::size_t k) const {
        return values[m * freqs.size() + k];
    }
    const std::complex<double>& at_d(std::size_t m, std::size_t k) const {
        return values_d[m * freqs.size() + k];
    }
};

struct ComponentEstimate {
    std::vector<double> ridge_freq;  // Hz per frame
    std::vector<double> inst_freq;   // Hz per frame
    std::vector<double> amplitude;
    std::vector<double> phase;       // cycles per frame, phase[0] = 0
    int harmonic_index = 1;
};

TFRepresentation stft(const Signal& signal, const WindowSpec& window, std::size_t hop,
                      std::size_t n_fft);

struct FreqBand {
    double lo = 0.0, hi = 0.0;  // Hz
};

// Exact DP optimum of sum_m log|V(m,c_m)|^2 - lambda * sum_m (freq(c_{m+1})-freq(c_m))^2.
// lambda is per Hz^2.
std::vector<std::size_t> extract_ridge(const TFRepresentation& tfr, const FreqBand& band,
                                       double smoothness_penalty);

std::vector<double> estimate_amplitude(const TFRepresentation& tfr,
                                       const std::vector<std::size_t>& ridge);

// Reassignment-refined IF at the ridge, clipped to +-1 bin; frames with
// |V| below 1e-6 of the global max fall back to the ridge frequency.
std::vector<double> estimate_if(const TFRepresentation& tfr,
                                const std::vector<std::size_t>& ridge);

// Trapezoidal integral of the IF at the frame spacing; phase[0] = 0, cycles.
std::vector<double> integrate_phase(const std::vector<double>& inst_freq, std::size_t hop,
                                    double fs);

int select_dominant_harmonic(const TFRepresentation& tfr,
                             const std::vector<std::size_t>& base_ridge, int max_mult);

}  // namespace wsf::tfa
