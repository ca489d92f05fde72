#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "wsf/eval.hpp"

using namespace wsf;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_CASE("change-point scoring: exact, empty, windowed matching") {
    std::vector<double> truth{1.0 / 3.0, 2.0 / 3.0};
    const double cycle = 1.0 / 40.0;

    auto exact = eval::score_change_points(truth, truth, cycle);
    CHECK(exact.f1 == doctest::Approx(1.0));
    CHECK(exact.rmse_change_points == doctest::Approx(0.0));
    CHECK(exact.n_true_pos == 2);

    auto none = eval::score_change_points({}, truth, cycle);
    CHECK(none.f1 == doctest::Approx(0.0));
    CHECK(none.n_false_neg == 2);

    // one hit inside the window, one miss outside it
    auto mixed = eval::score_change_points({1.0 / 3.0 + 0.01, 0.9}, truth, cycle);
    CHECK(mixed.n_true_pos == 1);
    CHECK(mixed.n_false_pos == 1);
    CHECK(mixed.n_false_neg == 1);
    CHECK(mixed.f1 == doctest::Approx(2.0 / 4.0));
    CHECK(mixed.rmse_change_points == doctest::Approx(0.01));
    REQUIRE(mixed.matched_errors.size() == 2);
    CHECK(mixed.matched_errors[0] == doctest::Approx(0.01));
    CHECK(std::isnan(mixed.matched_errors[1]));
}

TEST_CASE("change-point scoring: greedy matching is one-to-one") {
    // two detections near one truth point: only one can match
    auto r = eval::score_change_points({0.33, 0.34}, {1.0 / 3.0}, 1.0 / 40.0);
    CHECK(r.n_true_pos == 1);
    CHECK(r.n_false_pos == 1);
}

TEST_CASE("F1 responds correctly to extra detections") {
    std::vector<double> truth{0.25, 0.75};
    const double cycle = 0.02;
    auto base = eval::score_change_points({0.25}, truth, cycle);
    auto plus_correct = eval::score_change_points({0.25, 0.75}, truth, cycle);
    auto plus_spurious = eval::score_change_points({0.25, 0.5}, truth, cycle);
    CHECK(plus_correct.f1 > base.f1);
    CHECK(plus_spurious.f1 <= base.f1);
}

TEST_CASE("wsf rmse: shift and sign invariance, pseudometric symmetry") {
    const std::size_t L = 200;
    auto truth = eval::sample_wsf({1.0, 0.0, 1.0}, L);

    CHECK(eval::wsf_rmse(truth, truth) < 1e-6);

    // the residual energy cancels almost completely, so FFT rounding noise
    // passes through the square root amplified to ~1e-8
    std::vector<double> shifted(L);
    for (std::size_t j = 0; j < L; ++j) shifted[j] = truth[(j + 7) % L];
    CHECK(eval::wsf_rmse(shifted, truth) < 1e-6);

    std::vector<double> flipped(truth);
    for (double& v : flipped) v = -v;
    CHECK(eval::wsf_rmse(flipped, truth) < 1e-6);

    auto other = eval::sample_wsf({1.0, 1.0, 1.0}, L);
    CHECK(eval::wsf_rmse(truth, other) ==
          doctest::Approx(eval::wsf_rmse(other, truth)).epsilon(1e-9));
    CHECK(eval::wsf_rmse(truth, other) > 0.1);
}

TEST_CASE("sample_wsf evaluates the cosine series on t = j/L") {
    auto w = eval::sample_wsf({1.0, 0.5}, 8);
    for (std::size_t j = 0; j < 8; ++j) {
        const double t = static_cast<double>(j) / 8.0;
        const double expect = std::cos(kTwoPi * t) + 0.5 * std::cos(2.0 * kTwoPi * t);
        CHECK(w[j] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("wsf matching assigns estimates to their nearest truth") {
    const std::size_t L = 128;
    std::vector<std::vector<double>> truths{eval::sample_wsf({1.0, 0.0, 0.0}, L),
                                            eval::sample_wsf({1.0, 1.0, 1.0}, L),
                                            eval::sample_wsf({1.0, 0.0, 1.0}, L)};
    // estimates permuted and cyclically shifted
    std::vector<std::vector<double>> est(3, std::vector<double>(L));
    for (std::size_t j = 0; j < L; ++j) {
        est[0][j] = truths[2][(j + 11) % L];
        est[1][j] = truths[0][(j + 40) % L];
        est[2][j] = truths[1][j];
    }
    auto errs = eval::match_wsfs(est, truths);
    REQUIRE(errs.size() == 3);
    for (double e : errs) CHECK(e < 1e-6);

    // fewer estimates than truths: every truth still gets its nearest estimate
    auto partial = eval::match_wsfs({est[0]}, truths);
    REQUIRE(partial.size() == 3);
    CHECK(partial[2] < 1e-6);  // est[0] is truth 3 shifted
}

TEST_CASE("single-realization benchmark sweep is reproducible") {
    eval::BenchmarkConfig cfg;
    cfg.snrs_db = {20.0};
    cfg.n_realizations = 1;
    cfg.iterations = {1};
    cfg.master_seed = 11;

    auto a = eval::run_benchmark(cfg);
    auto b = eval::run_benchmark(cfg);
    CHECK(a.to_json() == b.to_json());
    CHECK(a.to_csv() == b.to_csv());

    REQUIRE(a.rows.size() == 1);
    CHECK(a.rows[0].n_ok == 1);
    CHECK(a.rows[0].n_failed == 0);
    CHECK(a.rows[0].mean_f1 >= 0.0);
    CHECK(a.rows[0].mean_f1 <= 1.0);
    CHECK(a.errors.empty());
}
