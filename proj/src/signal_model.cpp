#include "wsf/signal_model.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "wsf/errors.hpp"
#include "wsf/fft.hpp"

namespace wsf::model {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kF0 = 40.0;      // fundamental cycles over [0,1]
constexpr double kMaxIF = 44.0;   // max of phi' = 40 - 4 sin(8 pi t)
constexpr double kRate = 250.0;   // logistic transition rate

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double env_a(double t) { return logistic(kRate * (t - 1.0 / 3.0)) - logistic(kRate * (t - 2.0 / 3.0)); }
double env_b(double t) { return logistic(kRate * (t - 1.0 / 3.0)); }
double phi(double t) { return kF0 * t + std::cos(4.0 * kTwoPi * t) / kTwoPi; }

}  // namespace

std::pair<Signal, GroundTruth> synth_benchmark(double fs, double duration,
                                               const std::vector<double>* phase_perturb) {
    if (!(fs > 0.0) || !(duration > 0.0))
        throw std::invalid_argument("synth_benchmark: fs and duration must be > 0");
    if (fs < 2.0 * 3.0 * kMaxIF)
        throw std::invalid_argument("synth_benchmark: fs below Nyquist bound for 3rd harmonic");
    const std::size_t n = static_cast<std::size_t>(std::floor(fs * duration));
    if (phase_perturb && phase_perturb->size() != n)
        throw std::invalid_argument("synth_benchmark: phase perturbation length mismatch");

    Signal sig;
    sig.fs = fs;
    sig.t0 = 0.0;
    sig.samples.resize(n);
    GroundTruth gt;
    gt.phase.resize(n);
    gt.env_a.resize(n);
    gt.env_b.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        double p = phi(t);
        if (phase_perturb) p += (*phase_perturb)[i];
        const double a = env_a(t), b = env_b(t);
        sig.samples[i] = std::cos(kTwoPi * p) + a * std::cos(2.0 * kTwoPi * p) +
                         b * std::cos(3.0 * kTwoPi * p);
        gt.phase[i] = p;
        gt.env_a[i] = a;
        gt.env_b[i] = b;
    }
    gt.wsf_coeffs = {{1.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, {1.0, 0.0, 1.0}};
    for (double cp : {1.0 / 3.0, 2.0 / 3.0})
        if (cp < duration) gt.change_points.push_back(cp);
    return {std::move(sig), std::move(gt)};
}

std::vector<double> smoothed_brownian_phase(std::uint64_t seed, double kernel_std,
                                            double fs, std::size_t n) {
    if (!(kernel_std > 0.0)) throw std::invalid_argument("smoothed_brownian_phase: kernel_std must be > 0");
    if (!(fs > 0.0) || n < 2) throw std::invalid_argument("smoothed_brownian_phase: need fs > 0, n >= 2");
    const double dt = 1.0 / fs;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> w(n, 0.0);
    const double step = std::sqrt(dt);
    for (std::size_t i = 1; i < n; ++i) w[i] = w[i - 1] + step * gauss(rng);

    // Gaussian kernel truncated at +-4 sigma, unit integral
    const std::size_t half = static_cast<std::size_t>(std::ceil(4.0 * kernel_std * fs));
    std::vector<double> kernel(2 * half + 1);
    double mass = 0.0;
    for (std::size_t j = 0; j < kernel.size(); ++j) {
        const double u = (static_cast<double>(j) - static_cast<double>(half)) * dt;
        kernel[j] = std::exp(-0.5 * (u * u) / (kernel_std * kernel_std));
        mass += kernel[j];
    }
    for (double& k : kernel) k /= mass;

    std::vector<double> x = fft::convolve_same(w, kernel);
    double sup = 0.0;
    for (double v : x) sup = std::max(sup, std::abs(v));
    if (sup == 0.0) sup = 1.0;

    std::vector<double> y(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        y[i] = y[i - 1] + 0.5 * (x[i - 1] + x[i]) / sup * dt;
    return y;
}

Signal add_noise(const Signal& signal, const NoiseSpec& spec) {
    signal.validate();
    if (!spec.snr_db) return signal;
    double power = 0.0;
    for (double v : signal.samples) power += v * v;
    power /= static_cast<double>(signal.samples.size());
    if (power <= 0.0)
        throw DataError("add_noise: zero-power signal with finite SNR");
    const double sigma = std::sqrt(power / std::pow(10.0, *spec.snr_db / 10.0));
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    Signal out = signal;
    for (double& v : out.samples) v += gauss(rng);
    return out;
}

}  // namespace wsf::model
