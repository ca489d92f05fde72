#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace wsf {

// Uniformly sampled real-valued series.
struct Signal {
    std::vector<double> samples;
    double fs = 0.0;  // Hz
    double t0 = 0.0;  // s

    std::size_t size() const { return samples.size(); }
    double duration() const { return static_cast<double>(samples.size()) / fs; }
    double time_at(std::size_t n) const { return t0 + static_cast<double>(n) / fs; }

    void validate() const {
        if (samples.empty())
            throw std::invalid_argument("Signal: samples must be non-empty");
        if (!(fs > 0.0))
            throw std::invalid_argument("Signal: fs must be > 0");
        for (double v : samples)
            if (!std::isfinite(v))
                throw std::invalid_argument("Signal: samples must be finite");
    }
};

// splitmix64, used to derive independent RNG streams from a master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace wsf
