#pragma once

#include <cstdint>
#include <vector>

#include "wsf/cycles.hpp"
#include "wsf/signal.hpp"
#include "wsf/tfa.hpp"

namespace wsf::warping {

// Non-uniform resampling grid: source_times[m] solves phase(t_m) = m*delta_tau
// (plus the phase origin) in the input signal's time axis.
struct WarpMap {
    std::vector<double> source_times;
    double delta_tau = 0.0;  // cycles per output sample
};

// Signal on the warped axis (units: cycles of the warped fundamental).
struct WarpedSignal {
    Signal signal;                  // fs = samples per cycle
    WarpMap map;                    // to the immediate input axis
    std::vector<double> orig_times; // composed map: original time per sample
    std::size_t samples_per_cycle = 0;
    int iteration = 1;
};

// Uniform-phase resampling grid. By default the phase increment is chosen so
// the grid spans the whole phase range; a positive delta_tau pins the
// increment exactly (the grid then covers the first (n_out-1)*delta_tau
// cycles, which must fit inside the phase range).
WarpMap invert_phase(const std::vector<double>& phase, const std::vector<double>& times,
                     std::size_t n_out, double delta_tau = 0.0);

// Cubic resampling of the signal at map.source_times.
std::vector<double> warp(const Signal& signal, const WarpMap& map);

Signal demodulate(const Signal& signal, const std::vector<double>& amplitude,
                  double floor_quantile);

struct IterateConfig {
    double f0_min = 0.0, f0_max = 0.0;  // initial fundamental band, Hz; 0 = auto
    int harmonic = 0;                   // warping harmonic; 0 = auto (<= max_mult)
    int max_mult = 3;
    std::size_t samples_per_cycle = 200;
    bool m_equals_n = false;            // M = N instead of integer-aligned cycles
    int max_iterations = 10;
    double entropy_rel_tol = 0.01;
    double entropy_abs_floor = 1e-6;
    double window_cycles = 1.5;         // gaussian sigma_t, in fundamental cycles
    double ridge_lambda_bins = 0.5;     // DP penalty per squared-bin jump
    std::size_t target_frames = 600;
    double demod_floor_quantile = 0.05;
    bool keep_traces = false;           // retain per-iteration warped signals
};

struct IterateResult {
    WarpedSignal warped;                     // last completed iteration
    std::vector<double> entropy_trace;       // one SVD entropy per iteration
    std::vector<tfa::ComponentEstimate> component_traces;
    std::vector<WarpedSignal> stages;        // only when keep_traces
    int harmonic = 1;                        // warping harmonic actually used
};

IterateResult iterate_warp(const Signal& signal, const IterateConfig& config);

struct PeriodRefineResult {
    double factor = 1.0;
    WarpedSignal rescaled;
    std::vector<double> entropies;  // one per grid candidate
};

// Grid search of a time-rescaling factor minimizing the SVD entropy of the
// resegmented cycle matrix; ties go toward the range midpoint.
PeriodRefineResult refine_period(const WarpedSignal& warped, double factor_lo,
                                 double factor_hi, std::size_t n_grid);

}  // namespace wsf::warping
