#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wsf/signal.hpp"

namespace wsf::model {

// Per-segment cosine coefficients, segment boundaries, and the tabulated
// phase/envelopes of a generated signal.
struct GroundTruth {
    std::vector<std::vector<double>> wsf_coeffs;  // one coefficient vector per segment
    std::vector<double> change_points;            // s, strictly increasing
    std::vector<double> phase;                    // cycles, at the sample grid
    std::vector<double> env_a;                    // 2nd-harmonic envelope A(t)
    std::vector<double> env_b;                    // 3rd-harmonic envelope B(t)
};

struct NoiseSpec {
    std::optional<double> snr_db;  // none = no noise
    std::uint64_t seed = 0;
};

// Three-harmonic benchmark: x(t) = cos(2*pi*phi) + A(t) cos(4*pi*phi) + B(t) cos(6*pi*phi),
// phi(t) = 40 t + cos(8*pi*t)/(2*pi), logistic envelopes switching at t = 1/3 and 2/3.
// phase_perturb, when given, is added to phi at the sample grid (cycles).
std::pair<Signal, GroundTruth> synth_benchmark(double fs, double duration,
                                               const std::vector<double>* phase_perturb = nullptr);

// Y(t) = int_0^t X(u)/max|X| du with X a Gaussian-smoothed Brownian motion
// tabulated on a uniform grid of n samples at rate fs. |Y'| <= 1 by construction.
std::vector<double> smoothed_brownian_phase(std::uint64_t seed, double kernel_std,
                                            double fs, std::size_t n);

Signal add_noise(const Signal& signal, const NoiseSpec& spec);

}  // namespace wsf::model
