#include "wsf/warping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wsf/errors.hpp"
#include "wsf/fft.hpp"
#include "wsf/interp.hpp"

namespace wsf::warping {

namespace {

double quantile(std::vector<double> v, double q) {
    const std::size_t idx = static_cast<std::size_t>(
        q * static_cast<double>(v.size() - 1));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(idx), v.end());
    return v[idx];
}

// global periodogram peak, used when no fundamental band is configured
double estimate_f0(const Signal& s, double f_hi_frac) {
    const std::size_t n = s.size();
    double mean = 0.0;
    for (double v : s.samples) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> x(s.samples);
    for (double& v : x) v -= mean;
    const std::size_t nfft = fft::next_pow2(n);
    auto spec = fft::rfft(x, nfft);
    const double df = s.fs / static_cast<double>(nfft);
    const double f_lo = 2.0 / s.duration();
    const double f_hi = s.fs * f_hi_frac;
    double best = 0.0, best_f = 0.0;
    for (std::size_t k = 1; k < spec.size(); ++k) {
        const double f = static_cast<double>(k) * df;
        if (f < f_lo || f > f_hi) continue;
        const double mag = std::abs(spec[k]);
        if (mag > best) {
            best = mag;
            best_f = f;
        }
    }
    if (best_f == 0.0) throw DataError("iterate_warp: could not locate a spectral peak");
    return best_f;
}

struct ReflectStft {
    tfa::TFRepresentation tfr;  // frames trimmed to the original span
};

// STFT with reflect padding by half a window so edge frames keep full
// window mass (amplitude stays calibrated near the boundaries).
ReflectStft stft_reflect(const Signal& s, const tfa::WindowSpec& win, std::size_t hop,
                         std::size_t n_fft) {
    const std::size_t n = s.size();
    const std::size_t half = win.length / 2;
    Signal padded;
    padded.fs = s.fs;
    padded.t0 = s.t0 - static_cast<double>(half) / s.fs;
    padded.samples.resize(n + 2 * half);
    for (std::size_t i = 0; i < padded.samples.size(); ++i) {
        std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(half);
        if (idx < 0) idx = -idx;
        if (idx >= static_cast<std::ptrdiff_t>(n))
            idx = 2 * static_cast<std::ptrdiff_t>(n) - 2 - idx;
        padded.samples[i] = s.samples[static_cast<std::size_t>(idx)];
    }
    auto full = tfa::stft(padded, win, hop, n_fft);

    ReflectStft out;
    out.tfr.hop = hop;
    out.tfr.fs = full.fs;
    out.tfr.freqs = full.freqs;
    out.tfr.window = full.window;
    const std::size_t nb = full.bins();
    for (std::size_t m = 0; m < full.frames(); ++m) {
        const std::size_t center = m * hop;
        if (center < half || center >= half + n) continue;
        out.tfr.times.push_back(full.times[m]);
        out.tfr.values.insert(out.tfr.values.end(), full.values.begin() + m * nb,
                              full.values.begin() + (m + 1) * nb);
        out.tfr.values_d.insert(out.tfr.values_d.end(), full.values_d.begin() + m * nb,
                                full.values_d.begin() + (m + 1) * nb);
    }
    return out;
}

}  // namespace

WarpMap invert_phase(const std::vector<double>& phase, const std::vector<double>& times,
                     std::size_t n_out, double delta_tau) {
    if (phase.size() != times.size() || phase.size() < 2)
        throw std::invalid_argument("invert_phase: phase/times must match, >= 2 samples");
    if (n_out < 2) throw std::invalid_argument("invert_phase: n_out must be >= 2");
    for (std::size_t i = 1; i < phase.size(); ++i)
        if (!(phase[i] > phase[i - 1]))
            throw std::invalid_argument("invert_phase: phase must be strictly increasing");

    const double range = phase.back() - phase.front();
    WarpMap map;
    if (delta_tau > 0.0) {
        if (static_cast<double>(n_out - 1) * delta_tau > range * (1.0 + 1e-9))
            throw std::invalid_argument("invert_phase: grid exceeds the phase range");
        map.delta_tau = delta_tau;
    } else {
        map.delta_tau = range / static_cast<double>(n_out - 1);
    }
    MonotoneCubic inverse(phase, times);  // swap axes: interpolate t as a function of phi
    map.source_times.resize(n_out);
    for (std::size_t m = 0; m < n_out; ++m) {
        const double q =
            std::min(phase.front() + static_cast<double>(m) * map.delta_tau, phase.back());
        map.source_times[m] = inverse(q);
    }
    return map;
}

std::vector<double> warp(const Signal& signal, const WarpMap& map) {
    signal.validate();
    if (map.source_times.empty())
        throw std::invalid_argument("warp: empty map");
    const double t_lo = signal.t0;
    const double t_hi = signal.time_at(signal.size() - 1);
    const double tol = 1e-9 * (t_hi - t_lo);
    for (double t : map.source_times)
        if (t < t_lo - tol || t > t_hi + tol)
            throw std::invalid_argument("warp: source time outside the signal span");
    CubicSpline spline(signal.t0, 1.0 / signal.fs, signal.samples);
    std::vector<double> out(map.source_times.size());
    for (std::size_t m = 0; m < out.size(); ++m)
        out[m] = spline(std::clamp(map.source_times[m], t_lo, t_hi));
    return out;
}

Signal demodulate(const Signal& signal, const std::vector<double>& amplitude,
                  double floor_quantile) {
    signal.validate();
    if (amplitude.size() != signal.size())
        throw std::invalid_argument("demodulate: amplitude length mismatch");
    if (!(floor_quantile > 0.0 && floor_quantile < 0.5))
        throw std::invalid_argument("demodulate: floor_quantile must be in (0, 0.5)");
    double amax = 0.0;
    for (double a : amplitude) amax = std::max(amax, std::abs(a));
    if (amax == 0.0) throw DataError("demodulate: all-zero amplitude");
    const double floor = quantile(amplitude, floor_quantile);
    Signal out = signal;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.samples[i] = signal.samples[i] / std::max(amplitude[i], floor);
    return out;
}

IterateResult iterate_warp(const Signal& signal, const IterateConfig& config) {
    signal.validate();
    if (config.max_iterations < 1)
        throw std::invalid_argument("iterate_warp: max_iterations must be >= 1");
    if (config.samples_per_cycle < 4)
        throw std::invalid_argument("iterate_warp: samples_per_cycle must be >= 4");

    IterateResult result;
    Signal cur = signal;
    int ell = std::max(config.harmonic, 0);
    const std::size_t L = config.samples_per_cycle;

    for (int iter = 1; iter <= config.max_iterations; ++iter) {
        // fundamental band for this pass
        double b_lo, b_hi, f0;
        if (iter == 1) {
            if (config.f0_min > 0.0 && config.f0_max > config.f0_min) {
                b_lo = config.f0_min;
                b_hi = config.f0_max;
                f0 = 0.5 * (b_lo + b_hi);
            } else {
                f0 = estimate_f0(cur, 1.0 / 8.0);
                b_lo = 0.7 * f0;
                b_hi = 1.3 * f0;
            }
        } else {
            f0 = 1.0;  // warped units
            b_lo = 0.7;
            b_hi = 1.3;
        }

        // gaussian window scaled to the fundamental
        const double sigma_samples = config.window_cycles / f0 * cur.fs;
        std::size_t win_len = 2 * static_cast<std::size_t>(std::floor(3.0 * sigma_samples)) + 1;
        if (win_len + 2 > cur.size()) {
            win_len = cur.size() - 2;
            if (win_len % 2 == 0) --win_len;
        }
        if (win_len < 3) throw DataError("iterate_warp: signal too short for analysis window");
        tfa::WindowSpec win{win_len, sigma_samples};
        const std::size_t hop = std::max<std::size_t>(1, cur.size() / config.target_frames);
        const std::size_t n_fft = fft::next_pow2(4 * win_len);
        auto rs = stft_reflect(cur, win, hop, n_fft);
        const auto& tfr = rs.tfr;

        const double bin_hz = tfr.freqs[1] - tfr.freqs[0];
        const double lambda = config.ridge_lambda_bins / (bin_hz * bin_hz);
        auto base_ridge = tfa::extract_ridge(tfr, {b_lo, b_hi}, lambda);
        if (iter == 1 && ell == 0)
            ell = tfa::select_dominant_harmonic(tfr, base_ridge, config.max_mult);
        auto ridge = base_ridge;
        if (ell > 1)
            ridge = tfa::extract_ridge(
                tfr, {static_cast<double>(ell) * b_lo, static_cast<double>(ell) * b_hi}, lambda);

        tfa::ComponentEstimate est;
        est.harmonic_index = ell;
        est.ridge_freq.resize(tfr.frames());
        for (std::size_t m = 0; m < tfr.frames(); ++m) est.ridge_freq[m] = tfr.freqs[ridge[m]];
        est.amplitude = tfa::estimate_amplitude(tfr, ridge);
        {
            // the envelope is slowly varying by assumption; average over one
            // fundamental cycle so demodulation does not inject frame noise
            const std::size_t half = static_cast<std::size_t>(
                std::lround(0.5 * cur.fs / (f0 * static_cast<double>(hop))));
            if (half > 0 && est.amplitude.size() > 2 * half) {
                const std::ptrdiff_t n_amp = static_cast<std::ptrdiff_t>(est.amplitude.size());
                std::vector<double> sm(est.amplitude.size());
                for (std::ptrdiff_t m = 0; m < n_amp; ++m) {
                    double acc = 0.0;
                    for (std::ptrdiff_t d = -static_cast<std::ptrdiff_t>(half);
                         d <= static_cast<std::ptrdiff_t>(half); ++d) {
                        std::ptrdiff_t idx = m + d;
                        if (idx < 0) idx = -idx;
                        if (idx >= n_amp) idx = 2 * n_amp - 2 - idx;
                        acc += est.amplitude[static_cast<std::size_t>(idx)];
                    }
                    sm[static_cast<std::size_t>(m)] =
                        acc / static_cast<double>(2 * half + 1);
                }
                est.amplitude = std::move(sm);
            }
        }
        est.inst_freq = tfa::estimate_if(tfr, ridge);
        for (double& f : est.inst_freq) f /= static_cast<double>(ell);  // fundamental IF
        est.phase = tfa::integrate_phase(est.inst_freq, hop, cur.fs);

        const double total_cycles = est.phase.back() - est.phase.front();
        // only complete cycles: a uniform grid of exactly 1/L cycle per sample
        // keeps every length-L row aligned to one fundamental period
        const long rounds = config.m_equals_n ? std::lround(total_cycles)
                                              : static_cast<long>(std::floor(total_cycles));
        if (rounds < 2)
            throw DataError("iterate_warp: fewer than 2 complete cycles after warping");

        const std::size_t n_out = config.m_equals_n
                                      ? cur.size()
                                      : L * static_cast<std::size_t>(rounds) + 1;
        const double delta = config.m_equals_n ? 0.0 : 1.0 / static_cast<double>(L);
        auto map = invert_phase(est.phase, tfr.times, n_out, delta);
        auto warped_samples = warp(cur, map);

        // demodulate by the amplitude resampled onto the warped grid
        CubicSpline amp_spline(tfr.times.front(), static_cast<double>(hop) / cur.fs,
                               est.amplitude);
        std::vector<double> amp_w(n_out);
        for (std::size_t m = 0; m < n_out; ++m)
            amp_w[m] = amp_spline(std::clamp(map.source_times[m], amp_spline.x_front(),
                                             amp_spline.x_back()));

        WarpedSignal ws;
        ws.signal.samples = std::move(warped_samples);
        ws.signal.fs = 1.0 / map.delta_tau;  // samples per warped cycle
        ws.signal.t0 = 0.0;
        ws.signal = demodulate(ws.signal, amp_w, config.demod_floor_quantile);
        ws.map = std::move(map);
        ws.iteration = iter;
        ws.samples_per_cycle =
            config.m_equals_n ? n_out / static_cast<std::size_t>(rounds) : L;

        // compose the original-time map
        if (iter == 1) {
            ws.orig_times = ws.map.source_times;
        } else {
            std::vector<double> prev_axis(result.warped.orig_times.size());
            for (std::size_t i = 0; i < prev_axis.size(); ++i)
                prev_axis[i] = cur.t0 + static_cast<double>(i) / cur.fs;
            MonotoneCubic compose(prev_axis, result.warped.orig_times);
            ws.orig_times.resize(ws.map.source_times.size());
            for (std::size_t m = 0; m < ws.orig_times.size(); ++m)
                ws.orig_times[m] = compose(std::clamp(ws.map.source_times[m],
                                                      prev_axis.front(), prev_axis.back()));
        }

        auto mat = cycles::segment(ws.signal.samples, ws.samples_per_cycle, ws.orig_times);
        const double entropy = cycles::svd_entropy(mat);
        result.entropy_trace.push_back(entropy);
        result.component_traces.push_back(std::move(est));
        result.warped = std::move(ws);
        result.harmonic = ell;
        if (config.keep_traces) result.stages.push_back(result.warped);

        if (entropy < config.entropy_abs_floor) break;
        if (result.entropy_trace.size() >= 2) {
            const double prev = result.entropy_trace[result.entropy_trace.size() - 2];
            if ((prev - entropy) / prev < config.entropy_rel_tol) break;
        }
        cur = result.warped.signal;
    }
    return result;
}

PeriodRefineResult refine_period(const WarpedSignal& warped, double factor_lo,
                                 double factor_hi, std::size_t n_grid) {
    if (!(factor_lo > 0.0) || !(factor_hi > factor_lo))
        throw std::invalid_argument("refine_period: degenerate factor range");
    if (n_grid < 3) throw std::invalid_argument("refine_period: n_grid must be >= 3");
    const std::size_t L = warped.samples_per_cycle;
    const std::size_t M = warped.signal.size();
    const double mid = 0.5 * (factor_lo + factor_hi);

    CubicSpline samples(0.0, 1.0, warped.signal.samples);
    MonotoneCubic times(
        [&] {
            std::vector<double> idx(M);
            for (std::size_t i = 0; i < M; ++i) idx[i] = static_cast<double>(i);
            return idx;
        }(),
        warped.orig_times);

    auto resample = [&](double f, std::vector<double>& res, std::vector<double>& ot) {
        const std::size_t count =
            static_cast<std::size_t>(std::floor(static_cast<double>(M - 1) / f)) + 1;
        res.resize(count);
        ot.resize(count);
        for (std::size_t m = 0; m < count; ++m) {
            const double pos = static_cast<double>(m) * f;
            res[m] = samples(pos);
            ot[m] = times(pos);
        }
    };

    PeriodRefineResult best;
    std::vector<double> factors(n_grid);
    for (std::size_t g = 0; g < n_grid; ++g) {
        factors[g] = factor_lo + (factor_hi - factor_lo) * static_cast<double>(g) /
                                     static_cast<double>(n_grid - 1);
        std::vector<double> res, ot;
        resample(factors[g], res, ot);
        if (res.size() < 2 * L) {
            best.entropies.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        best.entropies.push_back(cycles::svd_entropy(cycles::segment(res, L, ot)));
    }

    std::size_t arg = n_grid;
    for (std::size_t g = 0; g < n_grid; ++g) {
        if (!std::isfinite(best.entropies[g])) continue;
        if (arg == n_grid) {
            arg = g;
            continue;
        }
        const double diff = best.entropies[g] - best.entropies[arg];
        if (diff < -1e-12) {
            arg = g;
        } else if (diff <= 1e-12 &&
                   std::abs(factors[g] - mid) < std::abs(factors[arg] - mid)) {
            arg = g;  // tie toward the range midpoint
        }
    }
    if (arg == n_grid)
        throw DataError("refine_period: no candidate leaves >= 2 cycles");

    best.factor = factors[arg];
    best.rescaled = warped;
    resample(best.factor, best.rescaled.signal.samples, best.rescaled.orig_times);
    best.rescaled.map.delta_tau = warped.map.delta_tau * best.factor;
    {
        std::vector<double> idx(M);
        for (std::size_t i = 0; i < M; ++i) idx[i] = static_cast<double>(i);
        MonotoneCubic src(idx, warped.map.source_times);
        auto& st = best.rescaled.map.source_times;
        st.resize(best.rescaled.signal.samples.size());
        for (std::size_t m = 0; m < st.size(); ++m)
            st[m] = src(static_cast<double>(m) * best.factor);
    }
    return best;
}

}  // namespace wsf::warping
