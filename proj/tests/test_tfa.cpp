#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "wsf/signal.hpp"
#include "wsf/signal_model.hpp"
#include "wsf/tfa.hpp"

using namespace wsf;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Signal make_tone(double fs, double duration, double freq, double amp, double freq2 = 0.0,
                 double amp2 = 0.0) {
    Signal s;
    s.fs = fs;
    const auto n = static_cast<std::size_t>(fs * duration);
    s.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        s.samples[i] = amp * std::cos(kTwoPi * freq * t) + amp2 * std::cos(kTwoPi * freq2 * t);
    }
    return s;
}

// frames whose window is fully inside the signal
bool interior(const tfa::TFRepresentation& tfr, std::size_t m, std::size_t n_samples) {
    const double half = static_cast<double>(tfr.window.spec.length / 2) / tfr.fs;
    return tfr.times[m] >= half &&
           tfr.times[m] <= static_cast<double>(n_samples) / tfr.fs - half;
}

}  // namespace

TEST_CASE("window: preconditions, symmetry, normalization, decay") {
    CHECK_THROWS(tfa::make_window({1, 1.0}));    // too short
    CHECK_THROWS(tfa::make_window({4, 1.0}));    // even length
    CHECK_THROWS(tfa::make_window({9, 0.0}));    // nonpositive sigma

    auto w = tfa::make_window({511, 511.0 / 10.0});
    const std::size_t c = w.values.size() / 2;
    CHECK(*std::max_element(w.values.begin(), w.values.end()) == w.values[c]);
    for (std::size_t i = 0; i < w.values.size(); ++i)
        CHECK(w.values[i] == w.values[w.values.size() - 1 - i]);  // even about center

    double l2 = 0.0;
    for (double v : w.values) l2 += v * v;
    CHECK(l2 == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(w.values.front() < 1e-4 * w.values[c]);  // exp(-(L/2)^2 / (2 sigma^2))
    CHECK(w.h_hat_0 > 0.0);
}

TEST_CASE("stft: zero input, tone peak location, linearity") {
    const double fs = 1000.0;
    tfa::WindowSpec win{201, 201.0 / 6.0};

    Signal zero;
    zero.fs = fs;
    zero.samples.assign(1000, 0.0);
    auto tz = tfa::stft(zero, win, 10, 1000);
    for (const auto& v : tz.values) CHECK(std::abs(v) == 0.0);

    auto x = make_tone(fs, 1.0, 50.0, 2.0);
    auto tfr = tfa::stft(x, win, 10, 1000);
    REQUIRE(tfr.freqs[1] - tfr.freqs[0] == doctest::Approx(1.0));
    for (std::size_t m = 0; m < tfr.frames(); ++m) {
        if (!interior(tfr, m, x.size())) continue;
        std::size_t best = 0;
        for (std::size_t k = 1; k < tfr.bins(); ++k)
            if (std::abs(tfr.at(m, k)) > std::abs(tfr.at(m, best))) best = k;
        CHECK(tfr.freqs[best] == doctest::Approx(50.0));
    }

    auto y = make_tone(fs, 1.0, 81.0, 0.7);
    Signal xy = x;
    for (std::size_t i = 0; i < xy.size(); ++i) xy.samples[i] += y.samples[i];
    auto txy = tfa::stft(xy, win, 10, 1000);
    auto ty = tfa::stft(y, win, 10, 1000);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < txy.values.size(); ++i) {
        num += std::norm(txy.values[i] - tfr.values[i] - ty.values[i]);
        den += std::norm(txy.values[i]);
    }
    CHECK(num <= 1e-24 * den);  // linearity to 1e-12 relative
}

TEST_CASE("stft: Parseval sanity at hop 1 for an interior-supported signal") {
    const double fs = 500.0;
    tfa::WindowSpec win{101, 101.0 / 6.0};
    Signal x;
    x.fs = fs;
    x.samples.assign(500, 0.0);
    // burst supported well inside the signal
    for (std::size_t i = 150; i < 350; ++i) {
        const double t = static_cast<double>(i) / fs;
        const double taper = std::sin(std::numbers::pi * (static_cast<double>(i) - 150.0) / 200.0);
        x.samples[i] = taper * std::cos(kTwoPi * 60.0 * t);
    }
    const std::size_t n_fft = 512;
    auto tfr = tfa::stft(x, win, 1, n_fft);

    double sig_energy = 0.0;
    for (double v : x.samples) sig_energy += v * v;

    // unit-L2 window at hop 1: sum_m h^2(u - t_m) = 1 per sample, so the
    // frame-and-bin energy sum (two-sided) over n_fft recovers signal energy
    double spec_energy = 0.0;
    for (std::size_t m = 0; m < tfr.frames(); ++m) {
        for (std::size_t k = 0; k < tfr.bins(); ++k) {
            const double w = (k == 0 || k == tfr.bins() - 1) ? 1.0 : 2.0;
            spec_energy += w * std::norm(tfr.at(m, k));
        }
    }
    spec_energy /= static_cast<double>(n_fft);
    CHECK(std::abs(spec_energy / sig_energy - 1.0) < 0.05);
}

TEST_CASE("ridge: tone tracking, penalty-free argmax, stiff-limit constancy") {
    const double fs = 1000.0;
    tfa::WindowSpec win{201, 201.0 / 6.0};
    auto x = make_tone(fs, 1.0, 50.0, 1.0);
    auto tfr = tfa::stft(x, win, 10, 1000);

    auto ridge = tfa::extract_ridge(tfr, {30.0, 70.0}, 1.0);
    for (std::size_t m = 0; m < tfr.frames(); ++m) {
        if (!interior(tfr, m, x.size())) continue;
        CHECK(tfr.freqs[ridge[m]] == doctest::Approx(50.0));
    }

    // lambda = 0 reduces to the per-frame argmax within the band
    auto free_ridge = tfa::extract_ridge(tfr, {30.0, 70.0}, 0.0);
    for (std::size_t m = 0; m < tfr.frames(); ++m) {
        std::size_t best = free_ridge[m];
        for (std::size_t k = 0; k < tfr.bins(); ++k) {
            if (tfr.freqs[k] < 30.0 || tfr.freqs[k] > 70.0) continue;
            CHECK(std::abs(tfr.at(m, k)) <= std::abs(tfr.at(m, best)) + 1e-15);
        }
    }

    // two alternating tones with a huge penalty: constant-bin path wins
    Signal two;
    two.fs = fs;
    two.samples.assign(1000, 0.0);
    for (std::size_t i = 0; i < 1000; ++i) {
        const double t = static_cast<double>(i) / fs;
        two.samples[i] = (i < 500) ? std::cos(kTwoPi * 40.0 * t) : std::cos(kTwoPi * 60.0 * t);
    }
    auto t2 = tfa::stft(two, win, 10, 1000);
    auto stiff = tfa::extract_ridge(t2, {30.0, 70.0}, 1e12);
    for (std::size_t m = 1; m < stiff.size(); ++m) CHECK(stiff[m] == stiff[0]);

    CHECK_THROWS(tfa::extract_ridge(tfr, {70.0, 30.0}, 1.0));  // empty band
}

TEST_CASE("amplitude: on-bin tone calibration, zero input, exact scaling") {
    const double fs = 1000.0;
    tfa::WindowSpec win{201, 201.0 / 6.0};
    auto x = make_tone(fs, 1.0, 50.0, 2.0);
    auto tfr = tfa::stft(x, win, 10, 1000);
    auto ridge = tfa::extract_ridge(tfr, {30.0, 70.0}, 1.0);
    auto amp = tfa::estimate_amplitude(tfr, ridge);
    for (std::size_t m = 0; m < tfr.frames(); ++m) {
        if (!interior(tfr, m, x.size())) continue;
        CHECK(std::abs(amp[m] - 2.0) < 0.02);  // within 1 %
    }

    Signal scaled = x;
    for (double& v : scaled.samples) v *= 3.0;
    auto ts = tfa::stft(scaled, win, 10, 1000);
    auto amps = tfa::estimate_amplitude(ts, ridge);
    for (std::size_t m = 0; m < amp.size(); ++m)
        CHECK(amps[m] == doctest::Approx(3.0 * amp[m]).epsilon(1e-9));
}

TEST_CASE("instantaneous frequency: on-bin and off-bin tones, finite fallback") {
    const double fs = 1000.0;
    tfa::WindowSpec win{201, 201.0 / 6.0};

    auto x = make_tone(fs, 1.0, 50.0, 1.0);
    auto tfr = tfa::stft(x, win, 10, 1000);
    auto ridge = tfa::extract_ridge(tfr, {30.0, 70.0}, 1.0);
    auto f = tfa::estimate_if(tfr, ridge);
    for (std::size_t m = 0; m < tfr.frames(); ++m) {
        if (!interior(tfr, m, x.size())) continue;
        CHECK(std::abs(f[m] - 50.0) < 0.05);  // 0.1 % of the tone frequency
    }

    auto y = make_tone(fs, 1.0, 50.3, 1.0);  // off-bin with 1 Hz bins
    auto tfy = tfa::stft(y, win, 10, 1000);
    auto ry = tfa::extract_ridge(tfy, {30.0, 70.0}, 1.0);
    auto fy = tfa::estimate_if(tfy, ry);
    for (std::size_t m = 0; m < tfy.frames(); ++m) {
        if (!interior(tfy, m, y.size())) continue;
        CHECK(std::abs(fy[m] - 50.3) < 0.05);
    }

    // near-zero |V| frames fall back to the ridge frequency and stay finite
    Signal gap;
    gap.fs = fs;
    gap.samples.assign(1000, 0.0);
    for (std::size_t i = 0; i < 400; ++i) gap.samples[i] = std::cos(kTwoPi * 50.0 * (i / fs));
    auto tg = tfa::stft(gap, win, 10, 1000);
    auto rg = tfa::extract_ridge(tg, {30.0, 70.0}, 1.0);
    auto fg = tfa::estimate_if(tg, rg);
    for (double v : fg) CHECK(std::isfinite(v));
}

TEST_CASE("phase integration: constant, analytic chirp, monotone, rejects nonpositive") {
    const double fs = 1000.0;
    const std::size_t hop = 10;
    const std::size_t frames = 101;  // spans exactly 1 s

    std::vector<double> flat(frames, 40.0);
    auto p = tfa::integrate_phase(flat, hop, fs);
    CHECK(p.front() == 0.0);
    CHECK(std::abs(p.back() - 40.0) < 1e-9);

    std::vector<double> chirp(frames);
    for (std::size_t m = 0; m < frames; ++m) {
        const double t = static_cast<double>(m * hop) / fs;
        chirp[m] = 40.0 - 4.0 * std::sin(8.0 * std::numbers::pi * t);
    }
    auto pc = tfa::integrate_phase(chirp, hop, fs);
    // analytic integral over [0,1] is 40; trapezoid error is O(hop^2)
    CHECK(std::abs(pc.back() - 40.0) < 1e-3);
    for (std::size_t m = 1; m < pc.size(); ++m) CHECK(pc[m] > pc[m - 1]);

    std::vector<double> bad(frames, 40.0);
    bad[5] = -1.0;
    CHECK_THROWS(tfa::integrate_phase(bad, hop, fs));
}

TEST_CASE("dominant harmonic selection") {
    const double fs = 1000.0;
    tfa::WindowSpec win{201, 201.0 / 6.0};
    Signal x;
    x.fs = fs;
    x.samples.resize(1000);
    for (std::size_t i = 0; i < 1000; ++i) {
        const double t = static_cast<double>(i) / fs;
        x.samples[i] = std::cos(kTwoPi * 40.0 * t) + 3.0 * std::cos(kTwoPi * 80.0 * t);
    }
    auto tfr = tfa::stft(x, win, 10, 1000);
    auto ridge = tfa::extract_ridge(tfr, {35.0, 45.0}, 1.0);
    CHECK(tfa::select_dominant_harmonic(tfr, ridge, 3) == 2);
    CHECK(tfa::select_dominant_harmonic(tfr, ridge, 1) == 1);  // single candidate

    auto pure = make_tone(fs, 1.0, 40.0, 1.0);
    auto tp = tfa::stft(pure, win, 10, 1000);
    auto rp = tfa::extract_ridge(tp, {35.0, 45.0}, 1.0);
    CHECK(tfa::select_dominant_harmonic(tp, rp, 3) == 1);
}

TEST_CASE("estimators are equivariant under integer-hop time shifts") {
    const double fs = 1000.0;
    const std::size_t hop = 10;
    tfa::WindowSpec win{201, 201.0 / 6.0};
    Signal x;
    x.fs = fs;
    x.samples.resize(1200);
    for (std::size_t i = 0; i < x.samples.size(); ++i) {
        const double t = static_cast<double>(i) / fs;
        x.samples[i] = std::cos(kTwoPi * (45.0 * t + 5.0 * t * t));
    }
    Signal shifted;  // x delayed by exactly 3 hops
    shifted.fs = fs;
    shifted.samples.assign(x.samples.begin() + 30, x.samples.end());

    auto ta = tfa::stft(x, win, hop, 1024);
    auto tb = tfa::stft(shifted, win, hop, 1024);
    auto ra = tfa::extract_ridge(ta, {30.0, 80.0}, 1.0);
    auto rb = tfa::extract_ridge(tb, {30.0, 80.0}, 1.0);
    auto fa = tfa::estimate_if(ta, ra);
    auto fb = tfa::estimate_if(tb, rb);
    auto aa = tfa::estimate_amplitude(ta, ra);
    auto ab = tfa::estimate_amplitude(tb, rb);

    for (std::size_t m = 0; m + 3 < ta.frames() && m < tb.frames(); ++m) {
        if (!interior(tb, m, shifted.size())) continue;
        CHECK(std::abs(fb[m] - fa[m + 3]) < 1e-6);
        CHECK(std::abs(ab[m] - aa[m + 3]) < 1e-9);
    }
}

TEST_CASE("ridge smoothness on the noiseless benchmark") {
    auto [sig, truth] = model::synth_benchmark(6000.0, 1.0);
    (void)truth;
    const double sigma = 1.5 / 40.0 * sig.fs;
    const auto len = 2 * static_cast<std::size_t>(std::floor(3.0 * sigma)) + 1;
    tfa::WindowSpec win{len, sigma};
    auto tfr = tfa::stft(sig, win, 10, 4096);
    const double bin = tfr.freqs[1] - tfr.freqs[0];
    auto ridge = tfa::extract_ridge(tfr, {36.0, 44.0}, 0.5 / (bin * bin));
    for (std::size_t m = 1; m < ridge.size(); ++m) {
        if (!interior(tfr, m, sig.size()) || !interior(tfr, m - 1, sig.size())) continue;
        const auto jump = ridge[m] > ridge[m - 1] ? ridge[m] - ridge[m - 1]
                                                  : ridge[m - 1] - ridge[m];
        CHECK(jump <= 2);
    }
}
