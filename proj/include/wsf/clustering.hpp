#pragma once

#include <cstdint>
#include <vector>

#include "wsf/cycles.hpp"

namespace wsf::cluster {

struct KMeansResult {
    std::vector<std::size_t> labels;
    std::vector<double> centers;  // row-major k x dim
    std::size_t k = 0;
    double within_ss = 0.0;
    std::vector<double> objective_trace;  // Lloyd objective per iteration (best replicate)
};

// Lloyd with k-means++ seeding, best of `replicates` by within-cluster sum of
// squared distances; deterministic per seed.
KMeansResult kmeans(const std::vector<double>& data, std::size_t n_rows, std::size_t dim,
                    std::size_t k, std::size_t replicates, std::uint64_t seed);

// Calinski-Harabasz sweep over k = 2..k_max; returns 1 for degenerate data or
// when the best CH value falls below ch_floor.
std::size_t select_k(const std::vector<double>& data, std::size_t n_rows, std::size_t dim,
                     std::size_t k_max, std::size_t replicates, std::uint64_t seed,
                     double ch_floor = 10.0);

double calinski_harabasz(const std::vector<double>& data, std::size_t n_rows, std::size_t dim,
                         const KMeansResult& km);

struct TrigFit {
    std::vector<double> cos_coeffs;  // a_1..a_K
    std::vector<double> sin_coeffs;  // b_1..b_K
    double rms_error = 0.0;
};

// Least-squares fit of sum_k a_k cos(2 pi k t) + b_k sin(2 pi k t) on the
// grid t = j/L.
TrigFit trig_regression(const std::vector<double>& median, std::size_t n_harmonics);

// Smallest K whose residual energy fraction drops below resid_frac; otherwise
// argmin over K of residual fraction plus the per-harmonic penalty.
std::size_t select_harmonic_count(const std::vector<double>& median, std::size_t k_max,
                                  double resid_frac = 0.05, double penalty_per_dof = 2.0);

struct WsfEstimates {
    std::vector<std::vector<double>> medians;  // k x L pointwise medians
    std::vector<TrigFit> regressions;
};

WsfEstimates estimate_wsfs(const cycles::CycleMatrix& matrix,
                           const std::vector<std::size_t>& labels, std::size_t k,
                           std::size_t k_max_harmonics = 10);

// Original-time boundaries between consecutive cycles with different labels.
std::vector<double> change_points(const std::vector<std::size_t>& labels,
                                  const std::vector<std::pair<double, double>>& row_spans);

// Sub-cycle refinement: around each label transition, place the switch at the
// sample minimizing the residual against the two cluster medians.
std::vector<double> refine_change_points(const cycles::CycleMatrix& matrix,
                                         const std::vector<std::size_t>& labels,
                                         const std::vector<std::size_t>& shifts,
                                         const WsfEstimates& wsfs,
                                         const std::vector<double>& orig_times);

}  // namespace wsf::cluster
