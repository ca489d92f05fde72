#include "wsf/cycles.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

#include "wsf/errors.hpp"
#include "wsf/fft.hpp"

namespace wsf::cycles {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// smaller angle wins; ties by the smaller shift index
bool angle_less(std::size_t a, std::size_t b, std::size_t L) {
    const std::size_t wa = std::min(a, L - a), wb = std::min(b, L - b);
    if (wa != wb) return wa < wb;
    return a < b;
}

std::size_t round_shift(double angle, std::size_t L) {
    // nearest integer, ties toward 0
    double raw = angle * static_cast<double>(L) / kTwoPi;
    double r = std::floor(std::abs(raw) + 0.5);
    if (std::abs(raw) + 0.5 == r && r > 0.0) r -= 1.0;  // half-way: toward zero
    long s = static_cast<long>(raw < 0 ? -r : r);
    const long Ll = static_cast<long>(L);
    s %= Ll;
    if (s < 0) s += Ll;
    return static_cast<std::size_t>(s);
}

std::vector<double> cyclic_shift(const double* row, std::size_t L, std::size_t s) {
    std::vector<double> out(L);
    for (std::size_t k = 0; k < L; ++k) out[k] = row[(k + s) % L];
    return out;
}

}  // namespace

CycleMatrix segment(const std::vector<double>& warped_samples, std::size_t L,
                    const std::vector<double>& orig_times) {
    if (L < 2) throw std::invalid_argument("segment: L must be >= 2");
    if (warped_samples.size() < 2 * L)
        throw DataError("segment: need at least 2 complete cycles (2*L samples)");
    if (orig_times.size() != warped_samples.size())
        throw std::invalid_argument("segment: orig_times length mismatch");
    CycleMatrix m;
    m.L = L;
    m.P = warped_samples.size() / L;
    m.rows.assign(warped_samples.begin(),
                  warped_samples.begin() + static_cast<std::ptrdiff_t>(m.P * L));
    m.row_spans.resize(m.P);
    for (std::size_t p = 0; p < m.P; ++p) {
        const double start = orig_times[p * L];
        const double end = (p + 1) * L < orig_times.size() ? orig_times[(p + 1) * L]
                                                           : orig_times.back();
        m.row_spans[p] = {start, end};
    }
    return m;
}

double svd_entropy(const std::vector<double>& matrix, std::size_t n_rows, std::size_t n_cols) {
    if (n_rows == 0 || n_cols == 0 || matrix.size() != n_rows * n_cols)
        throw std::invalid_argument("svd_entropy: bad dimensions");
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        M(matrix.data(), static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
    if (M.cwiseAbs().maxCoeff() == 0.0)
        throw DataError("svd_entropy: all-zero matrix");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    const double total = sv.sum();
    double entropy = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        const double p = sv[i] / total;
        if (p > 0.0) entropy -= p * std::log(p);
    }
    return entropy;
}

double svd_entropy(const CycleMatrix& m) { return svd_entropy(m.rows, m.P, m.L); }

ShiftResult best_cyclic_shift(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("best_cyclic_shift: equal non-empty lengths required");
    const std::size_t L = a.size();
    // ||shift(a)-b||^2 = ||a||^2 + ||b||^2 - 2 c[l], c[l] = sum_k a[(k+l)%L] b[k]
    auto corr = fft::circular_cross_correlation(a, b);
    double na = 0.0, nb = 0.0, cmax = corr[0];
    for (std::size_t k = 0; k < L; ++k) {
        na += a[k] * a[k];
        nb += b[k] * b[k];
        cmax = std::max(cmax, std::abs(corr[k]));
    }
    const double eps = 1e-9 * (std::abs(cmax) + 1.0);
    double best_c = corr[0];
    std::size_t best_l = 0;
    for (std::size_t l = 1; l < L; ++l) {
        if (corr[l] > best_c + eps) {
            best_c = corr[l];
            best_l = l;
        } else if (corr[l] > best_c - eps && angle_less(l, best_l, L)) {
            best_c = std::max(best_c, corr[l]);
            best_l = l;
        }
    }
    ShiftResult r;
    r.shift = best_l;
    r.residual = std::sqrt(std::max(0.0, na + nb - 2.0 * corr[best_l]));
    return r;
}

SyncResult synchronize(const CycleMatrix& matrix, std::uint64_t pair_subsample_seed) {
    if (matrix.P < 2) throw DataError("synchronize: insufficient cycles (P < 2)");
    const std::size_t P = matrix.P, L = matrix.L;

    // pair graph: dense up to P = 500, seeded random O(P log P) beyond
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (P <= 500) {
        for (std::size_t i = 0; i < P; ++i)
            for (std::size_t j = i + 1; j < P; ++j) pairs.emplace_back(i, j);
    } else {
        std::mt19937_64 rng(pair_subsample_seed);
        std::uniform_int_distribution<std::size_t> pick(0, P - 1);
        std::set<std::pair<std::size_t, std::size_t>> chosen;
        for (std::size_t i = 0; i + 1 < P; ++i) chosen.emplace(i, i + 1);  // connectivity
        const std::size_t degree = static_cast<std::size_t>(std::ceil(std::log2(P))) + 2;
        for (std::size_t i = 0; i < P; ++i)
            for (std::size_t d = 0; d < degree; ++d) {
                std::size_t j = pick(rng);
                if (j == i) continue;
                chosen.emplace(std::min(i, j), std::max(i, j));
            }
        pairs.assign(chosen.begin(), chosen.end());
    }

    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2 * P, 2 * P);
    auto put_block = [&](std::size_t i, std::size_t j, double angle) {
        const double c = std::cos(angle), s = std::sin(angle);
        C(2 * i, 2 * j) = c;
        C(2 * i, 2 * j + 1) = s;
        C(2 * i + 1, 2 * j) = -s;
        C(2 * i + 1, 2 * j + 1) = c;
    };
    for (std::size_t i = 0; i < P; ++i) put_block(i, i, 0.0);
    std::vector<double> ri(L), rj(L);
    for (auto [i, j] : pairs) {
        ri.assign(matrix.rows.begin() + static_cast<std::ptrdiff_t>(i * L),
                  matrix.rows.begin() + static_cast<std::ptrdiff_t>((i + 1) * L));
        rj.assign(matrix.rows.begin() + static_cast<std::ptrdiff_t>(j * L),
                  matrix.rows.begin() + static_cast<std::ptrdiff_t>((j + 1) * L));
        const std::size_t l = best_cyclic_shift(ri, rj).shift;
        const double angle = kTwoPi * static_cast<double>(l) / static_cast<double>(L);
        put_block(i, j, angle);
        put_block(j, i, -angle);
    }

    Eigen::MatrixXd Q(2 * P, 2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
    if (eig.info() == Eigen::Success) {
        // top-2 eigenvectors (solver sorts ascending)
        Q.col(0) = eig.eigenvectors().col(2 * static_cast<Eigen::Index>(P) - 1);
        Q.col(1) = eig.eigenvectors().col(2 * static_cast<Eigen::Index>(P) - 2);
    } else {
        // the QL iteration occasionally stalls; the dominant eigenvalues of C
        // are positive, so the top singular vectors of this symmetric matrix
        // span the same subspace
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeThinU);
        if (svd.matrixU().cols() < 2)
            throw NumericError("synchronize: eigendecomposition failed");
        Q.col(0) = svd.matrixU().col(0);
        Q.col(1) = svd.matrixU().col(1);
    }

    // The top-2 eigenbasis is defined up to an O(2) factor; a reflection
    // factor makes every block a reflection and the rotation fit degenerate.
    double det_sum = 0.0;
    for (std::size_t i = 0; i < P; ++i)
        det_sum += Q.block<2, 2>(2 * static_cast<Eigen::Index>(i), 0).determinant();
    if (det_sum < 0.0) Q.col(1) *= -1.0;

    // per-block Procrustes fit to SO(2)
    std::vector<double> theta(P);
    for (std::size_t i = 0; i < P; ++i) {
        Eigen::Matrix2d Qi = Q.block<2, 2>(2 * static_cast<Eigen::Index>(i), 0);
        Eigen::JacobiSVD<Eigen::Matrix2d> svd(Qi, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::Matrix2d R = svd.matrixU() * svd.matrixV().transpose();
        if (R.determinant() < 0.0) {
            Eigen::Matrix2d U = svd.matrixU();
            U.col(1) *= -1.0;
            R = U * svd.matrixV().transpose();
        }
        // block convention: R(0,1) = sin, R(0,0) = cos
        theta[i] = std::atan2(R(0, 1), R(0, 0));
    }

    SyncResult out;
    out.aligned = matrix;
    out.shifts.shifts.resize(P);
    out.shifts.reference_row = 0;
    for (std::size_t i = 0; i < P; ++i) {
        const std::size_t s = round_shift(theta[i] - theta[0], L);
        out.shifts.shifts[i] = s;
        auto shifted = cyclic_shift(matrix.rows.data() + i * L, L, s);
        std::copy(shifted.begin(), shifted.end(),
                  out.aligned.rows.begin() + static_cast<std::ptrdiff_t>(i * L));
    }
    return out;
}

}  // namespace wsf::cycles
