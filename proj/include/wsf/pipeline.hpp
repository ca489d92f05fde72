#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wsf/clustering.hpp"
#include "wsf/cycles.hpp"
#include "wsf/signal.hpp"
#include "wsf/warping.hpp"

namespace wsf::pipeline {

// Fully-resolved run configuration; serializes to/from JSON round-trip stable.
struct PipelineConfig {
    // time-frequency front end (0 = derived from the data)
    std::size_t window_length = 0;  // samples, odd
    double window_sigma = 0.0;      // samples
    double window_cycles = 1.5;     // sigma in fundamental cycles when sigma unset
    std::size_t hop = 0;
    std::size_t n_fft = 0;
    double f0_min = 0.0, f0_max = 0.0;  // initial fundamental band, Hz; 0 = auto
    int harmonic = 0;                   // 0 = auto
    int max_mult = 3;
    double ridge_lambda_bins = 0.5;

    // warping iteration
    std::size_t samples_per_cycle = 200;
    bool m_equals_n = false;
    int max_iterations = 3;
    double entropy_rel_tol = 0.01;
    double demod_floor_quantile = 0.05;

    // period refinement grid; n_grid = 0 disables the search
    double refine_lo = 1.0, refine_hi = 1.0;
    std::size_t refine_grid = 0;

    // cycle alignment + clustering
    bool drop_edge_cycles = true;  // first/last cycle are edge-contaminated
    bool synchronize = true;
    std::size_t k_max = 6;
    std::size_t replicates = 50;
    std::size_t k_max_harmonics = 10;
    std::uint64_t seed = 0;

    std::string output_dir;

    std::string to_json() const;
    static PipelineConfig from_json(const std::string& text);
    void validate() const;
};

struct AnalysisResult {
    warping::IterateResult warp;
    cycles::CycleMatrix matrix;          // as clustered (aligned when sync on)
    std::vector<std::size_t> shifts;     // per row; zeros when sync off
    std::size_t k = 1;
    std::vector<std::size_t> labels;
    cluster::WsfEstimates wsfs;
    std::vector<double> change_points;          // cycle-boundary rule
    std::vector<double> change_points_refined;  // sub-cycle residual scan
    std::vector<double> entropy_trace;
};

AnalysisResult analyze(const Signal& signal, const PipelineConfig& config);

}  // namespace wsf::pipeline
