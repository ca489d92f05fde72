#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wsf::eval {

struct ScoreReport {
    double f1 = 0.0;
    double rmse_change_points = 0.0;  // over matched pairs; NaN when none matched
    std::vector<double> matched_errors;  // |detected - truth| per truth point, NaN if unmatched
    std::vector<double> wsf_rmse;        // per ground-truth WSF, cluster medians
    std::vector<double> wsf_rmse_reg;    // same, trig-regression estimates
    std::size_t n_true_pos = 0, n_false_pos = 0, n_false_neg = 0;
};

// Greedy nearest-first one-to-one matching of detections to truth within
// +-cycle_len; F1 = 2TP / (2TP + FP + FN).
ScoreReport score_change_points(const std::vector<double>& detected,
                                const std::vector<double>& truth, double cycle_len);

// RMS difference minimized over cyclic shift and sign (free phase origin).
double wsf_rmse(const std::vector<double>& estimated, const std::vector<double>& truth);

// One cycle of sum_k coeffs[k] cos(2 pi (k+1) t) on the grid t = j/L.
std::vector<double> sample_wsf(const std::vector<double>& coeffs, std::size_t L);

// One-to-one assignment (brute force over injections) of estimated waveforms
// to truth waveforms by shift-aligned RMSE; truths left unmatched when there
// are fewer estimates fall back to their nearest estimate.
std::vector<double> match_wsfs(const std::vector<std::vector<double>>& estimated,
                               const std::vector<std::vector<double>>& truth);

struct BenchmarkConfig {
    std::vector<double> snrs_db{30.0, 20.0, 10.0};
    std::size_t n_realizations = 100;
    std::vector<int> iterations{1, 2, 3};
    std::uint64_t master_seed = 0;
    double fs = 6000.0;
    double duration = 1.0;
    double kernel_std = 0.05;        // phase-perturbation smoothing, s
    std::size_t samples_per_cycle = 200;
    std::size_t k_max = 6;
    std::size_t replicates = 50;
    double window_cycles = 1.5;
    double ridge_lambda_bins = 0.5;
};

struct BenchmarkRow {
    double snr_db = 0.0;
    int iterations = 0;
    double mean_f1 = 0.0;
    std::vector<double> rmse_change_points;  // per truth change point, across matches
    std::vector<double> mean_wsf_rmse;       // per truth WSF
    std::vector<double> median_wsf_rmse;
    std::vector<double> mean_wsf_rmse_reg;   // regression estimates
    std::vector<double> median_wsf_rmse_reg;
    double mean_entropy = 0.0;
    double median_entropy = 0.0;
    std::size_t n_ok = 0, n_failed = 0;
};

struct BenchmarkReport {
    BenchmarkConfig config;
    std::vector<BenchmarkRow> rows;
    std::vector<std::string> errors;  // "snr=<db> realization=<r>: <what>"

    std::string to_csv() const;
    std::string to_json() const;
};

BenchmarkReport run_benchmark(const BenchmarkConfig& config);

}  // namespace wsf::eval
