#include "wsf/tfa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "wsf/errors.hpp"
#include "wsf/fft.hpp"

namespace wsf::tfa {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMagFloorRel = 1e-6;
}  // namespace

void WindowSpec::validate() const {
    if (length < 3 || length % 2 == 0)
        throw std::invalid_argument("WindowSpec: length must be odd and >= 3");
    if (!(sigma > 0.0))
        throw std::invalid_argument("WindowSpec: sigma must be > 0");
}

Window make_window(const WindowSpec& spec) {
    spec.validate();
    Window w;
    w.spec = spec;
    const std::size_t n = spec.length;
    const double c = static_cast<double>(n - 1) / 2.0;
    w.values.resize(n);
    w.dvalues.resize(n);
    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) - c;
        w.values[i] = std::exp(-0.5 * u * u / (spec.sigma * spec.sigma));
        energy += w.values[i] * w.values[i];
    }
    const double scale = 1.0 / std::sqrt(energy);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) - c;
        w.values[i] *= scale;
        w.dvalues[i] = -u / (spec.sigma * spec.sigma) * w.values[i];
        w.h_hat_0 += w.values[i];
    }
    return w;
}

TFRepresentation stft(const Signal& signal, const WindowSpec& window, std::size_t hop,
                      std::size_t n_fft) {
    signal.validate();
    window.validate();
    if (hop < 1) throw std::invalid_argument("stft: hop must be >= 1");
    if (n_fft < window.length) throw std::invalid_argument("stft: n_fft must be >= window length");
    if (signal.size() <= window.length)
        throw std::invalid_argument("stft: signal must be longer than the window");

    TFRepresentation tfr;
    tfr.window = make_window(window);
    tfr.hop = hop;
    tfr.fs = signal.fs;
    const std::size_t len = window.length;
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(len / 2);
    const std::size_t n = signal.size();
    const std::size_t n_frames = (n - 1) / hop + 1;
    const std::size_t n_bins = n_fft / 2 + 1;

    tfr.times.resize(n_frames);
    tfr.freqs.resize(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k)
        tfr.freqs[k] = static_cast<double>(k) * signal.fs / static_cast<double>(n_fft);
    tfr.values.resize(n_frames * n_bins);
    tfr.values_d.resize(n_frames * n_bins);

    // phase reference at the frame center: V = twist[k] * FFT(windowed frame)
    std::vector<std::complex<double>> twist(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k) {
        const double ang = kTwoPi * static_cast<double>(k) * static_cast<double>(half) /
                           static_cast<double>(n_fft);
        twist[k] = {std::cos(ang), std::sin(ang)};
    }

    std::vector<double> buf(n_fft), buf_d(n_fft);
    for (std::size_t m = 0; m < n_frames; ++m) {
        const std::ptrdiff_t center = static_cast<std::ptrdiff_t>(m * hop);
        tfr.times[m] = signal.time_at(static_cast<std::size_t>(center));
        std::fill(buf.begin(), buf.end(), 0.0);
        std::fill(buf_d.begin(), buf_d.end(), 0.0);
        for (std::size_t j = 0; j < len; ++j) {
            const std::ptrdiff_t u = center - half + static_cast<std::ptrdiff_t>(j);
            if (u < 0 || u >= static_cast<std::ptrdiff_t>(n)) continue;
            const double x = signal.samples[static_cast<std::size_t>(u)];
            buf[j] = x * tfr.window.values[j];
            buf_d[j] = x * tfr.window.dvalues[j];
        }
        auto spec = fft::rfft(buf, n_fft);
        auto spec_d = fft::rfft(buf_d, n_fft);
        for (std::size_t k = 0; k < n_bins; ++k) {
            tfr.values[m * n_bins + k] = spec[k] * twist[k];
            tfr.values_d[m * n_bins + k] = spec_d[k] * twist[k];
        }
    }
    return tfr;
}

std::vector<std::size_t> extract_ridge(const TFRepresentation& tfr, const FreqBand& band,
                                       double smoothness_penalty) {
    if (smoothness_penalty < 0.0)
        throw std::invalid_argument("extract_ridge: penalty must be >= 0");
    const auto& freqs = tfr.freqs;
    std::size_t lo = 0, hi = 0;
    while (lo < freqs.size() && freqs[lo] < band.lo) ++lo;
    hi = lo;
    while (hi < freqs.size() && freqs[hi] <= band.hi) ++hi;
    if (hi <= lo) throw std::invalid_argument("extract_ridge: empty frequency band");
    const std::size_t nb = hi - lo;
    const std::size_t nf = tfr.frames();

    std::vector<double> gain(nf * nb);
    for (std::size_t m = 0; m < nf; ++m)
        for (std::size_t b = 0; b < nb; ++b) {
            const double mag2 = std::norm(tfr.at(m, lo + b));
            gain[m * nb + b] = std::log(std::max(mag2, 1e-300));
        }

    // forward DP, exact optimum
    std::vector<double> score(gain.begin(), gain.begin() + nb);
    std::vector<std::size_t> back(nf * nb, 0);
    std::vector<double> prev(nb), cur(nb);
    std::copy(score.begin(), score.end(), prev.begin());
    for (std::size_t m = 1; m < nf; ++m) {
        for (std::size_t b = 0; b < nb; ++b) {
            double best = -std::numeric_limits<double>::infinity();
            std::size_t arg = 0;
            for (std::size_t pb = 0; pb < nb; ++pb) {
                const double df = freqs[lo + b] - freqs[lo + pb];
                const double s = prev[pb] - smoothness_penalty * df * df;
                if (s > best) {
                    best = s;
                    arg = pb;
                }
            }
            cur[b] = best + gain[m * nb + b];
            back[m * nb + b] = arg;
        }
        std::swap(prev, cur);
    }
    std::size_t b = static_cast<std::size_t>(
        std::max_element(prev.begin(), prev.end()) - prev.begin());
    std::vector<std::size_t> ridge(nf);
    for (std::size_t m = nf; m-- > 0;) {
        ridge[m] = lo + b;
        if (m > 0) b = back[m * nb + b];
    }
    return ridge;
}

std::vector<double> estimate_amplitude(const TFRepresentation& tfr,
                                       const std::vector<std::size_t>& ridge) {
    if (ridge.size() != tfr.frames())
        throw std::invalid_argument("estimate_amplitude: ridge/frame mismatch");
    double global_max = 0.0;
    for (std::size_t m = 0; m < tfr.frames(); ++m)
        global_max = std::max(global_max, std::abs(tfr.at(m, ridge[m])));
    const double floor = kMagFloorRel * global_max;
    std::vector<double> amp(tfr.frames());
    for (std::size_t m = 0; m < tfr.frames(); ++m) {
        const double mag = std::max(std::abs(tfr.at(m, ridge[m])), floor);
        amp[m] = 2.0 * mag / tfr.window.h_hat_0;
    }
    return amp;
}

std::vector<double> estimate_if(const TFRepresentation& tfr,
                                const std::vector<std::size_t>& ridge) {
    if (ridge.size() != tfr.frames())
        throw std::invalid_argument("estimate_if: ridge/frame mismatch");
    double global_max = 0.0;
    for (std::size_t m = 0; m < tfr.frames(); ++m)
        global_max = std::max(global_max, std::abs(tfr.at(m, ridge[m])));
    const double floor = kMagFloorRel * global_max;
    const double bin_hz = tfr.freqs.size() > 1 ? tfr.freqs[1] - tfr.freqs[0] : 0.0;
    std::vector<double> out(tfr.frames());
    for (std::size_t m = 0; m < tfr.frames(); ++m) {
        const auto v = tfr.at(m, ridge[m]);
        double f = tfr.freqs[ridge[m]];
        if (std::abs(v) > floor) {
            // reassignment correction; dvalues are per sample, so scale by fs
            double corr = -std::imag(tfr.at_d(m, ridge[m]) / v) / kTwoPi * tfr.fs;
            corr = std::clamp(corr, -bin_hz, bin_hz);
            f += corr;
        }
        out[m] = f;
    }
    return out;
}

std::vector<double> integrate_phase(const std::vector<double>& inst_freq, std::size_t hop,
                                    double fs) {
    if (inst_freq.empty()) throw std::invalid_argument("integrate_phase: empty IF");
    if (hop < 1 || !(fs > 0.0)) throw std::invalid_argument("integrate_phase: bad hop/fs");
    for (double f : inst_freq)
        if (!(f > 0.0)) throw std::invalid_argument("integrate_phase: IF must be > 0");
    const double dt = static_cast<double>(hop) / fs;
    std::vector<double> phase(inst_freq.size(), 0.0);
    for (std::size_t m = 1; m < inst_freq.size(); ++m)
        phase[m] = phase[m - 1] + 0.5 * (inst_freq[m - 1] + inst_freq[m]) * dt;
    return phase;
}

int select_dominant_harmonic(const TFRepresentation& tfr,
                             const std::vector<std::size_t>& base_ridge, int max_mult) {
    if (max_mult < 1) throw std::invalid_argument("select_dominant_harmonic: max_mult >= 1");
    if (base_ridge.size() != tfr.frames())
        throw std::invalid_argument("select_dominant_harmonic: ridge/frame mismatch");
    const double bin_hz = tfr.freqs[1] - tfr.freqs[0];
    int best_l = 0;
    double best_mag = -1.0;
    for (int l = 1; l <= max_mult; ++l) {
        double mean_mag = 0.0;
        bool in_range = true;
        for (std::size_t m = 0; m < tfr.frames(); ++m) {
            const double f = static_cast<double>(l) * tfr.freqs[base_ridge[m]];
            const std::size_t k = static_cast<std::size_t>(std::llround(f / bin_hz));
            if (k >= tfr.bins()) {
                in_range = false;
                break;
            }
            mean_mag += std::abs(tfr.at(m, k));
        }
        if (!in_range) continue;
        mean_mag /= static_cast<double>(tfr.frames());
        if (mean_mag > best_mag) {
            best_mag = mean_mag;
            best_l = l;
        }
    }
    if (best_l == 0)
        throw NumericError("select_dominant_harmonic: all candidate ridges out of range");
    return best_l;
}

}  // namespace wsf::tfa
