#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace wsf::cycles {

// P x L matrix of unit-period cycles; row_spans are the original-time
// intervals each row came from.
struct CycleMatrix {
    std::vector<double> rows;  // row-major P x L
    std::size_t P = 0;
    std::size_t L = 0;
    std::vector<std::pair<double, double>> row_spans;  // s

    double at(std::size_t p, std::size_t l) const { return rows[p * L + l]; }
    double& at(std::size_t p, std::size_t l) { return rows[p * L + l]; }
};

// Chop consecutive length-L segments; orig_times maps each warped sample to
// original time and must cover at least P*L + 1 samples worth of spans.
CycleMatrix segment(const std::vector<double>& warped_samples, std::size_t L,
                    const std::vector<double>& orig_times);

// Shannon entropy of the normalized singular values (natural log).
double svd_entropy(const std::vector<double>& matrix, std::size_t n_rows, std::size_t n_cols);
double svd_entropy(const CycleMatrix& m);

struct ShiftResult {
    std::size_t shift = 0;
    double residual = 0.0;
};

// argmin over cyclic shifts of ||shift(a) - b||; ties go to the smallest
// angle min(l, L-l), then to the smaller l. shift(a)[k] = a[(k+l) mod L].
ShiftResult best_cyclic_shift(const std::vector<double>& a, const std::vector<double>& b);

struct ShiftAssignment {
    std::vector<std::size_t> shifts;  // per row, in [0, L)
    std::size_t reference_row = 0;
};

struct SyncResult {
    CycleMatrix aligned;
    ShiftAssignment shifts;
};

// Graph-connection-Laplacian synchronization: pairwise best shifts as SO(2)
// blocks, top-2 eigenvectors, per-block Procrustes, baseline row 0.
SyncResult synchronize(const CycleMatrix& matrix, std::uint64_t pair_subsample_seed = 0);

}  // namespace wsf::cycles
