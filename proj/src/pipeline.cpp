#include "wsf/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>

#include "wsf/errors.hpp"

namespace wsf::pipeline {

using nlohmann::json;

void PipelineConfig::validate() const {
    if (window_length != 0 && (window_length < 3 || window_length % 2 == 0))
        throw std::invalid_argument("config: window_length must be odd and >= 3");
    if (window_sigma < 0.0 || window_cycles <= 0.0)
        throw std::invalid_argument("config: window scale must be positive");
    if (harmonic < 0 || max_mult < 1)
        throw std::invalid_argument("config: harmonic >= 0, max_mult >= 1 required");
    if (samples_per_cycle < 4)
        throw std::invalid_argument("config: samples_per_cycle must be >= 4");
    if (max_iterations < 1)
        throw std::invalid_argument("config: max_iterations must be >= 1");
    if (!(demod_floor_quantile > 0.0 && demod_floor_quantile < 0.5))
        throw std::invalid_argument("config: demod_floor_quantile must be in (0, 0.5)");
    if (refine_grid != 0 && (refine_grid < 3 || !(refine_hi > refine_lo) || refine_lo <= 0.0))
        throw std::invalid_argument("config: refine grid needs >= 3 points, 0 < lo < hi");
    if (k_max < 2 || replicates < 1)
        throw std::invalid_argument("config: k_max >= 2, replicates >= 1 required");
    if (ridge_lambda_bins < 0.0)
        throw std::invalid_argument("config: ridge_lambda_bins must be >= 0");
}

std::string PipelineConfig::to_json() const {
    json j;
    j["window_length"] = window_length;
    j["window_sigma"] = window_sigma;
    j["window_cycles"] = window_cycles;
    j["hop"] = hop;
    j["n_fft"] = n_fft;
    j["f0_min"] = f0_min;
    j["f0_max"] = f0_max;
    j["harmonic"] = harmonic;
    j["max_mult"] = max_mult;
    j["ridge_lambda_bins"] = ridge_lambda_bins;
    j["samples_per_cycle"] = samples_per_cycle;
    j["m_equals_n"] = m_equals_n;
    j["max_iterations"] = max_iterations;
    j["entropy_rel_tol"] = entropy_rel_tol;
    j["demod_floor_quantile"] = demod_floor_quantile;
    j["refine_lo"] = refine_lo;
    j["refine_hi"] = refine_hi;
    j["refine_grid"] = refine_grid;
    j["drop_edge_cycles"] = drop_edge_cycles;
    j["synchronize"] = synchronize;
    j["k_max"] = k_max;
    j["replicates"] = replicates;
    j["k_max_harmonics"] = k_max_harmonics;
    j["seed"] = seed;
    j["output_dir"] = output_dir;
    return j.dump(2);
}

PipelineConfig from_json_obj(const json& j) {
    PipelineConfig c;
    c.window_length = j.value("window_length", c.window_length);
    c.window_sigma = j.value("window_sigma", c.window_sigma);
    c.window_cycles = j.value("window_cycles", c.window_cycles);
    c.hop = j.value("hop", c.hop);
    c.n_fft = j.value("n_fft", c.n_fft);
    c.f0_min = j.value("f0_min", c.f0_min);
    c.f0_max = j.value("f0_max", c.f0_max);
    c.harmonic = j.value("harmonic", c.harmonic);
    c.max_mult = j.value("max_mult", c.max_mult);
    c.ridge_lambda_bins = j.value("ridge_lambda_bins", c.ridge_lambda_bins);
    c.samples_per_cycle = j.value("samples_per_cycle", c.samples_per_cycle);
    c.m_equals_n = j.value("m_equals_n", c.m_equals_n);
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    c.entropy_rel_tol = j.value("entropy_rel_tol", c.entropy_rel_tol);
    c.demod_floor_quantile = j.value("demod_floor_quantile", c.demod_floor_quantile);
    c.refine_lo = j.value("refine_lo", c.refine_lo);
    c.refine_hi = j.value("refine_hi", c.refine_hi);
    c.refine_grid = j.value("refine_grid", c.refine_grid);
    c.drop_edge_cycles = j.value("drop_edge_cycles", c.drop_edge_cycles);
    c.synchronize = j.value("synchronize", c.synchronize);
    c.k_max = j.value("k_max", c.k_max);
    c.replicates = j.value("replicates", c.replicates);
    c.k_max_harmonics = j.value("k_max_harmonics", c.k_max_harmonics);
    c.seed = j.value("seed", c.seed);
    c.output_dir = j.value("output_dir", c.output_dir);
    return c;
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("config JSON parse error: ") + e.what());
    }
    auto c = from_json_obj(j);
    c.validate();
    return c;
}

AnalysisResult analyze(const Signal& signal, const PipelineConfig& config) {
    config.validate();
    signal.validate();

    warping::IterateConfig ic;
    ic.f0_min = config.f0_min;
    ic.f0_max = config.f0_max;
    ic.harmonic = config.harmonic;
    ic.max_mult = config.max_mult;
    ic.samples_per_cycle = config.samples_per_cycle;
    ic.m_equals_n = config.m_equals_n;
    ic.max_iterations = config.max_iterations;
    ic.entropy_rel_tol = config.entropy_rel_tol;
    ic.window_cycles = config.window_cycles;
    ic.ridge_lambda_bins = config.ridge_lambda_bins;
    ic.demod_floor_quantile = config.demod_floor_quantile;

    AnalysisResult r;
    r.warp = warping::iterate_warp(signal, ic);
    warping::WarpedSignal ws = r.warp.warped;
    if (config.refine_grid >= 3) {
        auto ref = warping::refine_period(ws, config.refine_lo, config.refine_hi,
                                          config.refine_grid);
        ws = std::move(ref.rescaled);
    }
    r.entropy_trace = r.warp.entropy_trace;

    std::vector<double> samples = ws.signal.samples;
    std::vector<double> orig_times = ws.orig_times;
    const std::size_t L = ws.samples_per_cycle;
    if (config.drop_edge_cycles && samples.size() >= 4 * L) {
        samples.assign(ws.signal.samples.begin() + static_cast<std::ptrdiff_t>(L),
                       ws.signal.samples.end() - static_cast<std::ptrdiff_t>(L));
        orig_times.assign(ws.orig_times.begin() + static_cast<std::ptrdiff_t>(L),
                          ws.orig_times.end() - static_cast<std::ptrdiff_t>(L));
    }
    auto raw = cycles::segment(samples, L, orig_times);
    if (config.synchronize) {
        auto sync = cycles::synchronize(raw, mix_seed(config.seed, 77));
        r.matrix = std::move(sync.aligned);
        r.shifts = std::move(sync.shifts.shifts);
    } else {
        r.matrix = raw;
        r.shifts.assign(raw.P, 0);
    }

    const std::size_t k_max = std::min(config.k_max, r.matrix.P - 1);
    if (k_max >= 2) {
        r.k = cluster::select_k(r.matrix.rows, r.matrix.P, r.matrix.L, k_max,
                                config.replicates, config.seed);
    } else {
        r.k = 1;
    }
    if (r.k >= 2) {
        // same seed stream select_k used for the winning k, so labels match it
        auto km = cluster::kmeans(r.matrix.rows, r.matrix.P, r.matrix.L, r.k,
                                  config.replicates, mix_seed(config.seed, 1000 + r.k));
        r.labels = std::move(km.labels);
    } else {
        r.labels.assign(r.matrix.P, 0);
    }

    r.wsfs = cluster::estimate_wsfs(r.matrix, r.labels, r.k, config.k_max_harmonics);
    r.change_points = cluster::change_points(r.labels, r.matrix.row_spans);
    r.change_points_refined =
        cluster::refine_change_points(raw, r.labels, r.shifts, r.wsfs, orig_times);
    return r;
}

}  // namespace wsf::pipeline
