#include "wsf/clustering.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "wsf/errors.hpp"
#include "wsf/signal.hpp"

namespace wsf::cluster {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sq_dist(const double* a, const double* b, std::size_t dim) {
    double d = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double diff = a[i] - b[i];
        d += diff * diff;
    }
    return d;
}

KMeansResult lloyd_once(const std::vector<double>& data, std::size_t n, std::size_t dim,
                        std::size_t k, std::mt19937_64& rng) {
    KMeansResult r;
    r.k = k;
    r.centers.assign(k * dim, 0.0);
    r.labels.assign(n, 0);

    // k-means++ seeding
    std::uniform_int_distribution<std::size_t> uni(0, n - 1);
    std::vector<std::size_t> seeds;
    seeds.push_back(uni(rng));
    std::vector<double> d2(n);
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t s : seeds)
                best = std::min(best, sq_dist(&data[i * dim], &data[s * dim], dim));
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            seeds.push_back(uni(rng));  // all remaining points coincide
            continue;
        }
        std::uniform_real_distribution<double> pick(0.0, total);
        double target = pick(rng), acc = 0.0;
        std::size_t chosen = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
            acc += d2[i];
            if (acc >= target) {
                chosen = i;
                break;
            }
        }
        seeds.push_back(chosen);
    }
    for (std::size_t c = 0; c < k; ++c)
        std::copy_n(&data[seeds[c] * dim], dim, &r.centers[c * dim]);

    std::vector<std::size_t> counts(k);
    double prev_obj = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200; ++it) {
        double obj = 0.0;
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t arg = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const double d = sq_dist(&data[i * dim], &r.centers[c * dim], dim);
                if (d < best) {
                    best = d;
                    arg = c;
                }
            }
            if (r.labels[i] != arg) changed = true;
            r.labels[i] = arg;
            obj += best;
        }
        r.objective_trace.push_back(obj);

        std::fill(r.centers.begin(), r.centers.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[r.labels[i]];
            for (std::size_t j = 0; j < dim; ++j)
                r.centers[r.labels[i] * dim + j] += data[i * dim + j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // re-seed an empty cluster with the point farthest from its center
                double worst = -1.0;
                std::size_t arg = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d =
                        sq_dist(&data[i * dim], &r.centers[r.labels[i] * dim], dim);
                    if (d > worst) {
                        worst = d;
                        arg = i;
                    }
                }
                std::copy_n(&data[arg * dim], dim, &r.centers[c * dim]);
                r.labels[arg] = c;
                counts[c] = 1;
                changed = true;
            } else {
                for (std::size_t j = 0; j < dim; ++j)
                    r.centers[c * dim + j] /= static_cast<double>(counts[c]);
            }
        }
        if (!changed && obj >= prev_obj - 1e-15) break;
        prev_obj = obj;
    }

    r.within_ss = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        r.within_ss += sq_dist(&data[i * dim], &r.centers[r.labels[i] * dim], dim);
    return r;
}

}  // namespace

KMeansResult kmeans(const std::vector<double>& data, std::size_t n_rows, std::size_t dim,
                    std::size_t k, std::size_t replicates, std::uint64_t seed) {
    if (k < 1 || replicates < 1) throw std::invalid_argument("kmeans: k, replicates >= 1");
    if (n_rows < k) throw std::invalid_argument("kmeans: k exceeds the number of rows");
    if (data.size() != n_rows * dim) throw std::invalid_argument("kmeans: bad data shape");

    KMeansResult best;
    best.within_ss = std::numeric_limits<double>::infinity();
    for (std::size_t rep = 0; rep < replicates; ++rep) {
        std::mt19937_64 rng(mix_seed(seed, rep));
        auto r = lloyd_once(data, n_rows, dim, k, rng);
        if (r.within_ss < best.within_ss) best = std::move(r);
    }
    return best;
}

double calinski_harabasz(const std::vector<double>& data, std::size_t n_rows, std::size_t dim,
                         const KMeansResult& km) {
    const std::size_t k = km.k;
    if (k < 2 || n_rows <= k) return 0.0;
    std::vector<double> mean(dim, 0.0);
    for (std::size_t i = 0; i < n_rows; ++i)
        for (std::size_t j = 0; j < dim; ++j) mean[j] += data[i * dim + j];
    for (double& v : mean) v /= static_cast<double>(n_rows);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t l : km.labels) ++counts[l];
    double between = 0.0;
    for (std::size_t c = 0; c < k; ++c)
        between += static_cast<double>(counts[c]) *
                   sq_dist(&km.centers[c * dim], mean.data(), dim);
    const double within = km.within_ss;
    if (within <= 0.0) return std::numeric_limits<double>::infinity();
    return (between / static_cast<double>(k - 1)) /
           (within / static_cast<double>(n_rows - k));
}

std::size_t select_k(const std::vector<double>& data, std::size_t n_rows, std::size_t dim,
                     std::size_t k_max, std::size_t replicates, std::uint64_t seed,
                     double ch_floor) {
    if (k_max < 2) throw std::invalid_argument("select_k: k_max must be >= 2");
    if (n_rows <= k_max) throw std::invalid_argument("select_k: need more rows than k_max");

    bool degenerate = true;
    for (std::size_t i = 1; i < n_rows && degenerate; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            if (data[i * dim + j] != data[j]) {
                degenerate = false;
                break;
            }
    if (degenerate) return 1;

    double best_ch = -1.0;
    std::size_t best_k = 1;
    for (std::size_t k = 2; k <= k_max; ++k) {
        auto km = kmeans(data, n_rows, dim, k, replicates, mix_seed(seed, 1000 + k));
        const double ch = calinski_harabasz(data, n_rows, dim, km);
        if (ch > best_ch) {
            best_ch = ch;
            best_k = k;
        }
    }
    if (best_ch < ch_floor) return 1;
    return best_k;
}

TrigFit trig_regression(const std::vector<double>& median, std::size_t n_harmonics) {
    const std::size_t L = median.size();
    if (L < 2 || n_harmonics < 1 || 2 * n_harmonics >= L)
        throw std::invalid_argument("trig_regression: need 1 <= K < L/2");
    const Eigen::Index rows = static_cast<Eigen::Index>(L);
    const Eigen::Index cols = static_cast<Eigen::Index>(2 * n_harmonics);
    Eigen::MatrixXd X(rows, cols);
    for (Eigen::Index j = 0; j < rows; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(L);
        for (std::size_t h = 1; h <= n_harmonics; ++h) {
            X(j, static_cast<Eigen::Index>(h - 1)) = std::cos(kTwoPi * static_cast<double>(h) * t);
            X(j, static_cast<Eigen::Index>(n_harmonics + h - 1)) =
                std::sin(kTwoPi * static_cast<double>(h) * t);
        }
    }
    Eigen::Map<const Eigen::VectorXd> y(median.data(), rows);
    Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    TrigFit fit;
    fit.cos_coeffs.assign(beta.data(), beta.data() + n_harmonics);
    fit.sin_coeffs.assign(beta.data() + n_harmonics, beta.data() + 2 * n_harmonics);
    fit.rms_error = std::sqrt((y - X * beta).squaredNorm() / static_cast<double>(L));
    return fit;
}

std::size_t select_harmonic_count(const std::vector<double>& median, std::size_t k_max,
                                  double resid_frac, double penalty_per_dof) {
    const std::size_t L = median.size();
    if (k_max < 1 || 2 * k_max >= L)
        throw std::invalid_argument("select_harmonic_count: need 1 <= K_max < L/2");
    auto full = trig_regression(median, k_max);
    double total = 0.0;
    for (double v : median) total += v * v;
    if (total <= 0.0) return 1;

    // orthogonal grid basis: per-harmonic captured energy is (a^2+b^2) L/2
    std::vector<double> resid(k_max + 1);
    resid[0] = total;
    for (std::size_t h = 1; h <= k_max; ++h) {
        const double cap = (full.cos_coeffs[h - 1] * full.cos_coeffs[h - 1] +
                            full.sin_coeffs[h - 1] * full.sin_coeffs[h - 1]) *
                           static_cast<double>(L) / 2.0;
        resid[h] = std::max(0.0, resid[h - 1] - cap);
    }
    for (std::size_t h = 1; h <= k_max; ++h)
        if (resid[h] / total <= resid_frac) return h;
    std::size_t best = 1;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t h = 1; h <= k_max; ++h) {
        const double score = resid[h] / total + penalty_per_dof * 2.0 *
                                                    static_cast<double>(h) /
                                                    static_cast<double>(L);
        if (score < best_score - 1e-15) {
            best_score = score;
            best = h;
        }
    }
    return best;
}

WsfEstimates estimate_wsfs(const cycles::CycleMatrix& matrix,
                           const std::vector<std::size_t>& labels, std::size_t k,
                           std::size_t k_max_harmonics) {
    if (labels.size() != matrix.P)
        throw std::invalid_argument("estimate_wsfs: labels/rows mismatch");
    WsfEstimates out;
    out.medians.resize(k);
    std::vector<double> column;
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t p = 0; p < matrix.P; ++p)
            if (labels[p] == c) members.push_back(p);
        if (members.empty())
            throw NumericError("estimate_wsfs: empty cluster");
        out.medians[c].resize(matrix.L);
        for (std::size_t l = 0; l < matrix.L; ++l) {
            column.clear();
            for (std::size_t p : members) column.push_back(matrix.at(p, l));
            auto mid = column.begin() + static_cast<std::ptrdiff_t>(column.size() / 2);
            std::nth_element(column.begin(), mid, column.end());
            double med = *mid;
            if (column.size() % 2 == 0) {
                auto lo = std::max_element(column.begin(), mid);
                med = 0.5 * (med + *lo);
            }
            out.medians[c][l] = med;
        }
        const std::size_t kmax = std::min(k_max_harmonics, matrix.L / 2 - 1);
        const std::size_t K = select_harmonic_count(out.medians[c], kmax);
        out.regressions.push_back(trig_regression(out.medians[c], K));
    }
    return out;
}

std::vector<double> change_points(const std::vector<std::size_t>& labels,
                                  const std::vector<std::pair<double, double>>& row_spans) {
    if (labels.size() != row_spans.size())
        throw std::invalid_argument("change_points: labels/spans mismatch");
    std::vector<double> out;
    for (std::size_t p = 0; p + 1 < labels.size(); ++p)
        if (labels[p] != labels[p + 1]) out.push_back(row_spans[p].second);
    return out;
}

std::vector<double> refine_change_points(const cycles::CycleMatrix& matrix,
                                         const std::vector<std::size_t>& labels,
                                         const std::vector<std::size_t>& shifts,
                                         const WsfEstimates& wsfs,
                                         const std::vector<double>& orig_times) {
    if (labels.size() != matrix.P || shifts.size() != matrix.P)
        throw std::invalid_argument("refine_change_points: labels/shifts mismatch");
    const std::size_t L = matrix.L;
    std::vector<double> out;

    // regression fits are smoother than raw medians, which matters at low SNR
    std::vector<std::vector<double>> models(wsfs.medians.size());
    for (std::size_t c = 0; c < models.size(); ++c) {
        if (c < wsfs.regressions.size()) {
            const auto& fit = wsfs.regressions[c];
            models[c].assign(L, 0.0);
            for (std::size_t j = 0; j < L; ++j) {
                const double t = static_cast<double>(j) / static_cast<double>(L);
                for (std::size_t h = 0; h < fit.cos_coeffs.size(); ++h) {
                    const double w = kTwoPi * static_cast<double>(h + 1) * t;
                    models[c][j] += fit.cos_coeffs[h] * std::cos(w) +
                                    fit.sin_coeffs[h] * std::sin(w);
                }
            }
        } else {
            models[c] = wsfs.medians[c];
        }
    }
    auto model_at = [&](std::size_t cluster, std::size_t row, std::size_t j) {
        // aligned[k] = raw[(k + shift) % L]  =>  raw[j] ~ model[(j - shift) mod L]
        const std::size_t idx = (j + L - shifts[row] % L) % L;
        return models[cluster][idx];
    };

    // run-length encode the labels; runs of a single cycle wedged between
    // regimes are transition cycles, not regimes of their own
    struct Run {
        std::size_t label, first, last;  // rows, inclusive
    };
    std::vector<Run> runs;
    for (std::size_t p = 0; p < matrix.P; ++p) {
        if (runs.empty() || runs.back().label != labels[p])
            runs.push_back({labels[p], p, p});
        else
            runs.back().last = p;
    }
    constexpr std::size_t kMinRun = 2;
    std::vector<Run> major;
    for (const auto& r : runs)
        if (r.last - r.first + 1 >= kMinRun) major.push_back(r);
    if (major.empty()) major = runs;

    for (std::size_t g = 0; g + 1 < major.size(); ++g) {
        const auto& ra = major[g];
        const auto& rb = major[g + 1];
        if (ra.label == rb.label) continue;
        // scan the switch over rows [last of a, first of b]
        const std::size_t row0 = ra.last, row1 = rb.first;
        const std::size_t n = (row1 - row0 + 1) * L;
        std::vector<double> da(n), db(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t row = row0 + i / L;
            const double w = matrix.at(row, i % L);
            const double ma = w - model_at(ra.label, row, i % L);
            const double mb = w - model_at(rb.label, row, i % L);
            da[i] = ma * ma;
            db[i] = mb * mb;
        }
        std::vector<double> resid(n + 1);
        double suffix_b = 0.0;
        for (double v : db) suffix_b += v;
        resid[0] = suffix_b;
        double prefix_a = 0.0;
        for (std::size_t s = 1; s <= n; ++s) {
            prefix_a += da[s - 1];
            suffix_b -= db[s - 1];
            resid[s] = prefix_a + suffix_b;
        }
        // the residual valley is shallow where the two waveforms nearly agree;
        // a moving average keeps its center but suppresses the noise walk
        const std::size_t half = L / 8;
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_s = 0;
        for (std::size_t s = 0; s <= n; ++s) {
            const std::size_t lo = s > half ? s - half : 0;
            const std::size_t hi = std::min(n, s + half);
            double acc = 0.0;
            for (std::size_t u = lo; u <= hi; ++u) acc += resid[u];
            acc /= static_cast<double>(hi - lo + 1);
            if (acc < best) {
                best = acc;
                best_s = s;
            }
        }
        const std::size_t pos = std::min(row0 * L + best_s, orig_times.size() - 1);
        out.push_back(orig_times[pos]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace wsf::cluster
