#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "wsf/cycles.hpp"
#include "wsf/eval.hpp"
#include "wsf/signal_model.hpp"
#include "wsf/warping.hpp"

using namespace wsf;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> template_row(std::size_t L, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> a{g(rng), g(rng), g(rng)}, b{g(rng), g(rng), g(rng)};
    std::vector<double> row(L);
    for (std::size_t j = 0; j < L; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(L);
        for (std::size_t k = 0; k < 3; ++k)
            row[j] += a[k] * std::cos(kTwoPi * static_cast<double>(k + 1) * t) +
                      b[k] * std::sin(kTwoPi * static_cast<double>(k + 1) * t);
    }
    return row;
}

cycles::CycleMatrix planted(const std::vector<double>& tmpl, const std::vector<std::size_t>& shifts) {
    cycles::CycleMatrix m;
    m.L = tmpl.size();
    m.P = shifts.size();
    m.rows.resize(m.P * m.L);
    m.row_spans.resize(m.P);
    for (std::size_t p = 0; p < m.P; ++p) {
        for (std::size_t j = 0; j < m.L; ++j)
            m.rows[p * m.L + j] = tmpl[(j + shifts[p]) % m.L];
        m.row_spans[p] = {static_cast<double>(p), static_cast<double>(p + 1)};
    }
    return m;
}
}  // namespace

TEST_CASE("segment: exact periodic input gives identical rows") {
    const std::size_t L = 200, P = 40;
    std::vector<double> samples(P * L), times(P * L);
    for (std::size_t m = 0; m < samples.size(); ++m) {
        samples[m] = std::cos(kTwoPi * static_cast<double>(m % L) / static_cast<double>(L));
        times[m] = static_cast<double>(m) / static_cast<double>(P * L);
    }
    auto mat = cycles::segment(samples, L, times);
    REQUIRE(mat.P == P);
    REQUIRE(mat.L == L);
    for (std::size_t p = 1; p < P; ++p) {
        double se = 0.0;
        for (std::size_t j = 0; j < L; ++j) {
            const double d = mat.at(p, j) - mat.at(0, j);
            se += d * d;
        }
        CHECK(std::sqrt(se / static_cast<double>(L)) < 1e-10);
    }
    for (std::size_t p = 1; p < P; ++p) {
        CHECK(mat.row_spans[p].first > mat.row_spans[p - 1].first);
        CHECK(mat.row_spans[p].first == doctest::Approx(mat.row_spans[p - 1].second));
    }

    CHECK_THROWS(cycles::segment(std::vector<double>(L, 1.0), L, std::vector<double>(L, 0.0)));
}

TEST_CASE("segment: noiseless benchmark cycles match their segment's waveform") {
    auto [sig, truth] = model::synth_benchmark(6000.0, 1.0);
    warping::IterateConfig cfg;
    cfg.f0_min = 36.0;
    cfg.f0_max = 44.0;
    cfg.max_iterations = 2;
    cfg.entropy_rel_tol = -1e9;
    auto r = warping::iterate_warp(sig, cfg);
    auto mat = cycles::segment(r.warped.signal.samples, r.warped.samples_per_cycle,
                               r.warped.orig_times);

    std::vector<std::vector<double>> wsfs;
    for (const auto& c : truth.wsf_coeffs) wsfs.push_back(eval::sample_wsf(c, mat.L));

    std::size_t checked = 0;
    for (std::size_t p = 1; p + 1 < mat.P; ++p) {
        const double mid = 0.5 * (mat.row_spans[p].first + mat.row_spans[p].second);
        // skip cycles straddling a change point
        const double margin = 1.5 / 40.0;
        if (std::abs(mid - 1.0 / 3.0) < margin || std::abs(mid - 2.0 / 3.0) < margin) continue;
        const std::size_t expect = mid < 1.0 / 3.0 ? 0 : (mid < 2.0 / 3.0 ? 1 : 2);

        std::vector<double> row(mat.rows.begin() + static_cast<std::ptrdiff_t>(p * mat.L),
                                mat.rows.begin() + static_cast<std::ptrdiff_t>((p + 1) * mat.L));
        std::size_t best = 0;
        double best_err = 1e300;
        for (std::size_t w = 0; w < wsfs.size(); ++w) {
            const double e = eval::wsf_rmse(row, wsfs[w]);
            if (e < best_err) {
                best_err = e;
                best = w;
            }
        }
        CHECK(best == expect);
        ++checked;
    }
    CHECK(checked >= 30);
}

TEST_CASE("svd entropy analytics") {
    const std::size_t P = 7, L = 30;

    // rank-1 outer product
    std::vector<double> m1(P * L);
    for (std::size_t p = 0; p < P; ++p)
        for (std::size_t j = 0; j < L; ++j)
            m1[p * L + j] = (1.0 + static_cast<double>(p)) * std::sin(0.2 * static_cast<double>(j) + 0.3);
    CHECK(std::abs(cycles::svd_entropy(m1, P, L)) < 1e-12);

    // identity: equal singular values
    std::vector<double> eye(P * P, 0.0);
    for (std::size_t p = 0; p < P; ++p) eye[p * P + p] = 1.0;
    CHECK(std::abs(cycles::svd_entropy(eye, P, P) - std::log(static_cast<double>(P))) < 1e-12);

    // singular values (3, 1): -(0.75 log 0.75 + 0.25 log 0.25)
    std::vector<double> d(2 * 4, 0.0);
    d[0] = 3.0;
    d[5] = 1.0;
    const double expect = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25));
    CHECK(std::abs(cycles::svd_entropy(d, 2, 4) - expect) < 1e-12);
    CHECK(std::abs(cycles::svd_entropy(d, 2, 4) - 0.5623) < 1e-4);

    CHECK_THROWS(cycles::svd_entropy(std::vector<double>(12, 0.0), 3, 4));
}

TEST_CASE("best cyclic shift: planted shifts and tie rules") {
    auto tmpl = template_row(128, 99);
    std::vector<double> shifted(128);
    for (std::size_t j = 0; j < 128; ++j) shifted[j] = tmpl[(j + 5) % 128];

    auto r = cycles::best_cyclic_shift(shifted, tmpl);
    CHECK(r.shift == 128 - 5);  // shifting `shifted` forward by L-5 recovers tmpl
    CHECK(r.residual < 1e-9);

    auto self = cycles::best_cyclic_shift(tmpl, tmpl);
    CHECK(self.shift == 0);
    CHECK(self.residual < 1e-9);

    std::vector<double> c1(64, 2.5), c2(64, 2.5);
    CHECK(cycles::best_cyclic_shift(c1, c2).shift == 0);  // all-tie case
}

TEST_CASE("best cyclic shift antisymmetry when the minimizer is unique") {
    const std::size_t L = 100;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto a = template_row(L, 1000 + seed);
        std::mt19937_64 rng(seed);
        const std::size_t s = rng() % L;
        std::vector<double> b(L);
        for (std::size_t j = 0; j < L; ++j) b[j] = a[(j + s) % L];
        const auto ab = cycles::best_cyclic_shift(a, b).shift;
        const auto ba = cycles::best_cyclic_shift(b, a).shift;
        CHECK((ab + ba) % L == 0);
    }
}

TEST_CASE("synchronize: planted shifts collapse to rank one") {
    auto tmpl = template_row(200, 5);
    std::mt19937_64 rng(7);
    std::vector<std::size_t> shifts(10);
    for (auto& s : shifts) s = rng() % 200;
    auto m = planted(tmpl, shifts);

    auto sync = cycles::synchronize(m);
    CHECK(cycles::svd_entropy(sync.aligned) < 1e-8);
    // shifts are recovered relative to row 0
    for (std::size_t p = 0; p < shifts.size(); ++p) {
        const std::size_t expect = (shifts[p] + 200 - shifts[0]) % 200;
        CHECK(sync.shifts.shifts[p] == (200 - expect) % 200);
    }
}

TEST_CASE("synchronize: aligned input stays fixed") {
    auto tmpl = template_row(150, 11);
    auto m = planted(tmpl, std::vector<std::size_t>(8, 0));
    auto sync = cycles::synchronize(m);
    for (auto s : sync.shifts.shifts) CHECK(s == 0);
    CHECK(sync.aligned.rows == m.rows);
}

TEST_CASE("synchronize: equivariant under a global shift") {
    auto tmpl = template_row(120, 21);
    std::vector<std::size_t> shifts{3, 50, 97, 10, 77, 0, 33};
    auto a = cycles::synchronize(planted(tmpl, shifts));

    std::vector<std::size_t> moved(shifts);
    for (auto& s : moved) s = (s + 17) % 120;
    auto b = cycles::synchronize(planted(tmpl, moved));

    // the two aligned matrices agree up to one common cyclic shift
    std::vector<double> ra(a.aligned.rows.begin(), a.aligned.rows.begin() + 120);
    std::vector<double> rb(b.aligned.rows.begin(), b.aligned.rows.begin() + 120);
    const std::size_t common = cycles::best_cyclic_shift(ra, rb).shift;
    for (std::size_t p = 0; p < shifts.size(); ++p) {
        double se = 0.0;
        for (std::size_t j = 0; j < 120; ++j) {
            const double d = a.aligned.at(p, (j + common) % 120) - b.aligned.at(p, j);
            se += d * d;
        }
        CHECK(std::sqrt(se / 120.0) < 1e-9);
    }
}

TEST_CASE("synchronize: never hurts on shift-generated ensembles; two-template case") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        auto tmpl = template_row(100, 300 + static_cast<std::uint64_t>(trial));
        std::vector<std::size_t> shifts(6 + trial);
        for (auto& s : shifts) s = rng() % 100;
        auto m = planted(tmpl, shifts);
        auto sync = cycles::synchronize(m);
        CHECK(cycles::svd_entropy(sync.aligned) <= cycles::svd_entropy(m) + 1e-9);
    }

    // two distinct templates, five rows each
    auto t1 = template_row(80, 41);
    auto t2 = template_row(80, 42);
    std::vector<std::size_t> s1{0, 13, 27, 55, 71}, s2{5, 60, 22, 44, 9};
    cycles::CycleMatrix m;
    m.L = 80;
    m.P = 10;
    m.rows.resize(800);
    m.row_spans.resize(10);
    for (std::size_t p = 0; p < 10; ++p) {
        const auto& t = p < 5 ? t1 : t2;
        const std::size_t s = p < 5 ? s1[p] : s2[p - 5];
        for (std::size_t j = 0; j < 80; ++j) m.rows[p * 80 + j] = t[(j + s) % 80];
        m.row_spans[p] = {static_cast<double>(p), static_cast<double>(p + 1)};
    }
    auto sync = cycles::synchronize(m);
    CHECK(cycles::svd_entropy(sync.aligned) <= cycles::svd_entropy(m) + 1e-9);
    // within each template the aligned rows coincide
    for (std::size_t grp = 0; grp < 2; ++grp) {
        const std::size_t base = grp * 5;
        for (std::size_t p = base + 1; p < base + 5; ++p) {
            double se = 0.0;
            for (std::size_t j = 0; j < 80; ++j) {
                const double d = sync.aligned.at(p, j) - sync.aligned.at(base, j);
                se += d * d;
            }
            CHECK(std::sqrt(se / 80.0) < 1e-6);
        }
    }
}

TEST_CASE("synchronize refuses fewer than two rows") {
    cycles::CycleMatrix m;
    m.L = 10;
    m.P = 1;
    m.rows.assign(10, 1.0);
    m.row_spans = {{0.0, 1.0}};
    CHECK_THROWS(cycles::synchronize(m));
}
