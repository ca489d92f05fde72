#include "wsf/eval.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "wsf/clustering.hpp"
#include "wsf/cycles.hpp"
#include "wsf/errors.hpp"
#include "wsf/fft.hpp"
#include "wsf/signal_model.hpp"
#include "wsf/warping.hpp"

namespace wsf::eval {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return kNaN;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
    if (v.empty()) return kNaN;
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double m = *mid;
    if (v.size() % 2 == 0) {
        auto lo = std::max_element(v.begin(), mid);
        m = 0.5 * (m + *lo);
    }
    return m;
}

double rms_of(const std::vector<double>& v) {
    if (v.empty()) return kNaN;
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

ScoreReport score_change_points(const std::vector<double>& detected,
                                const std::vector<double>& truth, double cycle_len) {
    if (!(cycle_len > 0.0)) throw std::invalid_argument("score_change_points: cycle_len > 0");
    ScoreReport r;
    r.matched_errors.assign(truth.size(), kNaN);

    struct Pair {
        double dist;
        std::size_t d, t;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < detected.size(); ++i)
        for (std::size_t j = 0; j < truth.size(); ++j) {
            const double dist = std::abs(detected[i] - truth[j]);
            if (dist <= cycle_len) pairs.push_back({dist, i, j});
        }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.t != b.t) return a.t < b.t;
        return a.d < b.d;
    });
    std::vector<bool> d_used(detected.size(), false), t_used(truth.size(), false);
    std::vector<double> sq_errors;
    for (const auto& p : pairs) {
        if (d_used[p.d] || t_used[p.t]) continue;
        d_used[p.d] = true;
        t_used[p.t] = true;
        r.matched_errors[p.t] = p.dist;
        sq_errors.push_back(p.dist);
        ++r.n_true_pos;
    }
    r.n_false_pos = detected.size() - r.n_true_pos;
    r.n_false_neg = truth.size() - r.n_true_pos;
    r.rmse_change_points = rms_of(sq_errors);
    const double denom =
        static_cast<double>(2 * r.n_true_pos + r.n_false_pos + r.n_false_neg);
    r.f1 = denom > 0.0 ? 2.0 * static_cast<double>(r.n_true_pos) / denom : 1.0;
    return r;
}

double wsf_rmse(const std::vector<double>& estimated, const std::vector<double>& truth) {
    if (estimated.size() != truth.size() || estimated.empty())
        throw std::invalid_argument("wsf_rmse: equal non-empty lengths required");
    const std::size_t L = estimated.size();
    // ||shift(e) +- t||^2 = ||e||^2 + ||t||^2 -+ 2 c[s]
    auto corr = fft::circular_cross_correlation(estimated, truth);
    double ne = 0.0, nt = 0.0;
    for (std::size_t k = 0; k < L; ++k) {
        ne += estimated[k] * estimated[k];
        nt += truth[k] * truth[k];
    }
    std::size_t sbest = 0;
    for (std::size_t s = 1; s < L; ++s)
        if (std::abs(corr[s]) > std::abs(corr[sbest])) sbest = s;
    const double sign = corr[sbest] < 0.0 ? -1.0 : 1.0;
    // sub-sample peak: the correlation is a smooth trigonometric polynomial,
    // so a parabola through the three samples around the maximum is accurate
    const double y0 = sign * corr[(sbest + L - 1) % L];
    const double y1 = sign * corr[sbest];
    const double y2 = sign * corr[(sbest + 1) % L];
    const double denom = y0 - 2.0 * y1 + y2;
    double cbest = y1;
    if (denom < 0.0) {
        const double delta = 0.5 * (y0 - y2) / denom;
        cbest = y1 - 0.25 * (y0 - y2) * delta;
    }
    return std::sqrt(std::max(0.0, ne + nt - 2.0 * cbest) / static_cast<double>(L));
}

std::vector<double> sample_wsf(const std::vector<double>& coeffs, std::size_t L) {
    std::vector<double> out(L, 0.0);
    for (std::size_t j = 0; j < L; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(L);
        for (std::size_t k = 0; k < coeffs.size(); ++k)
            out[j] += coeffs[k] *
                      std::cos(2.0 * std::numbers::pi * static_cast<double>(k + 1) * t);
    }
    return out;
}

std::vector<double> match_wsfs(const std::vector<std::vector<double>>& estimated,
                               const std::vector<std::vector<double>>& truth) {
    const std::size_t ne = estimated.size(), nt = truth.size();
    if (ne == 0 || nt == 0)
        throw std::invalid_argument("match_wsfs: empty input");
    std::vector<double> cost(ne * nt);
    for (std::size_t i = 0; i < ne; ++i)
        for (std::size_t j = 0; j < nt; ++j) cost[i * nt + j] = wsf_rmse(estimated[i], truth[j]);

    // brute-force optimal injection of the smaller side into the larger
    std::vector<double> out(nt, kNaN);
    if (ne >= nt) {
        std::vector<std::size_t> perm(ne);
        for (std::size_t i = 0; i < ne; ++i) perm[i] = i;
        std::sort(perm.begin(), perm.end());
        double best = std::numeric_limits<double>::infinity();
        std::vector<std::size_t> best_assign(nt);
        do {
            double total = 0.0;
            for (std::size_t j = 0; j < nt; ++j) total += cost[perm[j] * nt + j];
            if (total < best) {
                best = total;
                for (std::size_t j = 0; j < nt; ++j) best_assign[j] = perm[j];
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        for (std::size_t j = 0; j < nt; ++j) out[j] = cost[best_assign[j] * nt + j];
    } else {
        std::vector<std::size_t> perm(nt);
        for (std::size_t j = 0; j < nt; ++j) perm[j] = j;
        double best = std::numeric_limits<double>::infinity();
        std::vector<std::size_t> best_assign;
        do {
            double total = 0.0;
            for (std::size_t i = 0; i < ne; ++i) total += cost[i * nt + perm[i]];
            if (total < best) {
                best = total;
                best_assign.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(ne));
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        for (std::size_t i = 0; i < ne; ++i) out[best_assign[i]] = cost[i * nt + best_assign[i]];
        for (std::size_t j = 0; j < nt; ++j)
            if (std::isnan(out[j])) {
                double m = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < ne; ++i) m = std::min(m, cost[i * nt + j]);
                out[j] = m;  // fewer estimates than truths: nearest-estimate fallback
            }
    }
    return out;
}

namespace {

struct RealizationScores {
    // one entry per requested iteration count
    std::vector<ScoreReport> scores;
    std::vector<double> entropies;
    bool ok = false;
};

RealizationScores run_realization(const BenchmarkConfig& cfg, double snr_db,
                                  std::uint64_t gidx) {
    RealizationScores out;
    const std::size_t n =
        static_cast<std::size_t>(std::llround(cfg.fs * cfg.duration));
    auto perturb = model::smoothed_brownian_phase(mix_seed(cfg.master_seed, 2 * gidx),
                                                  cfg.kernel_std, cfg.fs, n);
    auto [clean, truth] = model::synth_benchmark(cfg.fs, cfg.duration, &perturb);
    model::NoiseSpec noise;
    noise.snr_db = snr_db;
    noise.seed = mix_seed(cfg.master_seed, 2 * gidx + 1);
    auto y = model::add_noise(clean, noise);

    const int max_iters = *std::max_element(cfg.iterations.begin(), cfg.iterations.end());
    warping::IterateConfig ic;
    ic.samples_per_cycle = cfg.samples_per_cycle;
    ic.max_iterations = max_iters;
    ic.entropy_rel_tol = -1e9;  // run every requested iteration
    ic.entropy_abs_floor = 0.0;
    ic.window_cycles = cfg.window_cycles;
    ic.ridge_lambda_bins = cfg.ridge_lambda_bins;
    ic.keep_traces = true;
    auto warp = warping::iterate_warp(y, ic);

    std::vector<std::vector<double>> truth_wsfs;
    for (const auto& c : truth.wsf_coeffs)
        truth_wsfs.push_back(sample_wsf(c, cfg.samples_per_cycle));
    const double cycle_len = cfg.duration / 40.0;  // fundamental makes 40 cycles

    for (int want : cfg.iterations) {
        const auto& ws = warp.stages[static_cast<std::size_t>(
            std::min<int>(want, static_cast<int>(warp.stages.size())) - 1)];
        // first/last cycles are edge-contaminated; drop them before clustering
        const std::size_t Lc = ws.samples_per_cycle;
        std::vector<double> samples = ws.signal.samples;
        std::vector<double> orig_times = ws.orig_times;
        if (samples.size() >= 4 * Lc) {
            samples.assign(ws.signal.samples.begin() + static_cast<std::ptrdiff_t>(Lc),
                           ws.signal.samples.end() - static_cast<std::ptrdiff_t>(Lc));
            orig_times.assign(ws.orig_times.begin() + static_cast<std::ptrdiff_t>(Lc),
                              ws.orig_times.end() - static_cast<std::ptrdiff_t>(Lc));
        }
        auto raw = cycles::segment(samples, Lc, orig_times);
        auto sync = cycles::synchronize(raw, mix_seed(cfg.master_seed, 9000 + gidx));
        const std::size_t k_max = std::min(cfg.k_max, raw.P - 1);
        const std::uint64_t cseed = mix_seed(cfg.master_seed, 5000 + gidx * 8 +
                                                                  static_cast<std::uint64_t>(want));
        std::size_t k = 1;
        std::vector<std::size_t> labels(raw.P, 0);
        if (k_max >= 2) {
            k = cluster::select_k(sync.aligned.rows, raw.P, raw.L, k_max,
                                  cfg.replicates, cseed);
            if (k >= 2)
                labels = cluster::kmeans(sync.aligned.rows, raw.P, raw.L, k,
                                         cfg.replicates, mix_seed(cseed, 1000 + k))
                             .labels;
        }
        auto wsfs = cluster::estimate_wsfs(sync.aligned, labels, k);
        auto cps = cluster::refine_change_points(raw, labels, sync.shifts.shifts, wsfs,
                                                 orig_times);
        auto score = score_change_points(cps, truth.change_points, cycle_len);
        score.wsf_rmse = match_wsfs(wsfs.medians, truth_wsfs);
        std::vector<std::vector<double>> regs;
        for (const auto& fit : wsfs.regressions) {
            std::vector<double> w(raw.L, 0.0);
            for (std::size_t j = 0; j < raw.L; ++j) {
                const double t = static_cast<double>(j) / static_cast<double>(raw.L);
                for (std::size_t h = 0; h < fit.cos_coeffs.size(); ++h) {
                    const double a = 2.0 * std::numbers::pi * static_cast<double>(h + 1) * t;
                    w[j] += fit.cos_coeffs[h] * std::cos(a) + fit.sin_coeffs[h] * std::sin(a);
                }
            }
            regs.push_back(std::move(w));
        }
        score.wsf_rmse_reg = match_wsfs(regs, truth_wsfs);
        out.scores.push_back(std::move(score));
        // entropy of the matrix that is actually clustered (edges dropped)
        out.entropies.push_back(cycles::svd_entropy(raw));
    }
    out.ok = true;
    return out;
}

}  // namespace

BenchmarkReport run_benchmark(const BenchmarkConfig& cfg) {
    if (cfg.n_realizations < 1)
        throw std::invalid_argument("run_benchmark: n_realizations >= 1 required");
    BenchmarkReport report;
    report.config = cfg;

    for (std::size_t si = 0; si < cfg.snrs_db.size(); ++si) {
        std::vector<std::vector<double>> f1(cfg.iterations.size());
        std::vector<std::vector<std::vector<double>>> cp_err(cfg.iterations.size());
        std::vector<std::vector<std::vector<double>>> wsf_err(cfg.iterations.size());
        std::vector<std::vector<std::vector<double>>> wsf_err_reg(cfg.iterations.size());
        std::vector<std::vector<double>> ent(cfg.iterations.size());
        std::vector<std::size_t> failed(cfg.iterations.size(), 0);

        for (std::size_t r = 0; r < cfg.n_realizations; ++r) {
            const std::uint64_t gidx = si * cfg.n_realizations + r;
            RealizationScores rs;
            try {
                rs = run_realization(cfg, cfg.snrs_db[si], gidx);
            } catch (const std::exception& e) {
                rs.ok = false;  // recorded, not fatal
                report.errors.push_back("snr=" + std::to_string(cfg.snrs_db[si]) +
                                        " realization=" + std::to_string(r) + ": " +
                                        e.what());
            }
            for (std::size_t ii = 0; ii < cfg.iterations.size(); ++ii) {
                if (!rs.ok) {
                    ++failed[ii];
                    continue;
                }
                const auto& s = rs.scores[ii];
                f1[ii].push_back(s.f1);
                if (cp_err[ii].empty()) cp_err[ii].resize(s.matched_errors.size());
                for (std::size_t j = 0; j < s.matched_errors.size(); ++j)
                    if (!std::isnan(s.matched_errors[j]))
                        cp_err[ii][j].push_back(s.matched_errors[j]);
                if (wsf_err[ii].empty()) wsf_err[ii].resize(s.wsf_rmse.size());
                for (std::size_t j = 0; j < s.wsf_rmse.size(); ++j)
                    wsf_err[ii][j].push_back(s.wsf_rmse[j]);
                if (wsf_err_reg[ii].empty()) wsf_err_reg[ii].resize(s.wsf_rmse_reg.size());
                for (std::size_t j = 0; j < s.wsf_rmse_reg.size(); ++j)
                    wsf_err_reg[ii][j].push_back(s.wsf_rmse_reg[j]);
                ent[ii].push_back(rs.entropies[ii]);
            }
        }

        for (std::size_t ii = 0; ii < cfg.iterations.size(); ++ii) {
            BenchmarkRow row;
            row.snr_db = cfg.snrs_db[si];
            row.iterations = cfg.iterations[ii];
            row.mean_f1 = mean_of(f1[ii]);
            for (const auto& e : cp_err[ii]) row.rmse_change_points.push_back(rms_of(e));
            for (const auto& e : wsf_err[ii]) {
                row.mean_wsf_rmse.push_back(mean_of(e));
                row.median_wsf_rmse.push_back(median_of(e));
            }
            for (const auto& e : wsf_err_reg[ii]) {
                row.mean_wsf_rmse_reg.push_back(mean_of(e));
                row.median_wsf_rmse_reg.push_back(median_of(e));
            }
            row.mean_entropy = mean_of(ent[ii]);
            row.median_entropy = median_of(ent[ii]);
            row.n_ok = f1[ii].size();
            row.n_failed = failed[ii];
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

std::string BenchmarkReport::to_csv() const {
    std::size_t n_cp = 0, n_wsf = 0;
    for (const auto& r : rows) {
        n_cp = std::max(n_cp, r.rmse_change_points.size());
        n_wsf = std::max(n_wsf, r.mean_wsf_rmse.size());
    }
    std::ostringstream out;
    out.precision(10);
    out << "snr_db,iterations,mean_f1";
    for (std::size_t j = 0; j < n_cp; ++j) out << ",rmse_cp" << (j + 1);
    for (std::size_t j = 0; j < n_wsf; ++j) out << ",mean_wsf_rmse" << (j + 1);
    for (std::size_t j = 0; j < n_wsf; ++j) out << ",median_wsf_rmse" << (j + 1);
    for (std::size_t j = 0; j < n_wsf; ++j) out << ",mean_wsf_rmse_reg" << (j + 1);
    for (std::size_t j = 0; j < n_wsf; ++j) out << ",median_wsf_rmse_reg" << (j + 1);
    out << ",mean_entropy,median_entropy,n_ok,n_failed\n";
    for (const auto& r : rows) {
        out << r.snr_db << ',' << r.iterations << ',' << r.mean_f1;
        for (std::size_t j = 0; j < n_cp; ++j)
            out << ',' << (j < r.rmse_change_points.size() ? r.rmse_change_points[j] : kNaN);
        for (std::size_t j = 0; j < n_wsf; ++j)
            out << ',' << (j < r.mean_wsf_rmse.size() ? r.mean_wsf_rmse[j] : kNaN);
        for (std::size_t j = 0; j < n_wsf; ++j)
            out << ',' << (j < r.median_wsf_rmse.size() ? r.median_wsf_rmse[j] : kNaN);
        for (std::size_t j = 0; j < n_wsf; ++j)
            out << ',' << (j < r.mean_wsf_rmse_reg.size() ? r.mean_wsf_rmse_reg[j] : kNaN);
        for (std::size_t j = 0; j < n_wsf; ++j)
            out << ',' << (j < r.median_wsf_rmse_reg.size() ? r.median_wsf_rmse_reg[j] : kNaN);
        out << ',' << r.mean_entropy << ',' << r.median_entropy << ',' << r.n_ok << ','
            << r.n_failed << '\n';
    }
    return out.str();
}

std::string BenchmarkReport::to_json() const {
    nlohmann::json j;
    j["config"] = {{"snrs_db", config.snrs_db},
                   {"n_realizations", config.n_realizations},
                   {"iterations", config.iterations},
                   {"master_seed", config.master_seed},
                   {"fs", config.fs},
                   {"duration", config.duration},
                   {"kernel_std", config.kernel_std},
                   {"samples_per_cycle", config.samples_per_cycle},
                   {"k_max", config.k_max},
                   {"replicates", config.replicates},
                   {"window_cycles", config.window_cycles},
                   {"ridge_lambda_bins", config.ridge_lambda_bins}};
    j["errors"] = errors;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row;
        row["snr_db"] = r.snr_db;
        row["iterations"] = r.iterations;
        row["mean_f1"] = r.mean_f1;
        row["rmse_change_points"] = r.rmse_change_points;
        row["mean_wsf_rmse"] = r.mean_wsf_rmse;
        row["median_wsf_rmse"] = r.median_wsf_rmse;
        row["mean_wsf_rmse_reg"] = r.mean_wsf_rmse_reg;
        row["median_wsf_rmse_reg"] = r.median_wsf_rmse_reg;
        row["mean_entropy"] = r.mean_entropy;
        row["median_entropy"] = r.median_entropy;
        row["n_ok"] = r.n_ok;
        row["n_failed"] = r.n_failed;
        j["rows"].push_back(std::move(row));
    }
    return j.dump(2);
}

}  // namespace wsf::eval
