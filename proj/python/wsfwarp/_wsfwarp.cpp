#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "wsf/clustering.hpp"
#include "wsf/cycles.hpp"
#include "wsf/eval.hpp"
#include "wsf/pipeline.hpp"
#include "wsf/signal_model.hpp"

namespace py = pybind11;

namespace {

py::dict synth_benchmark(double fs, double duration, std::optional<double> snr_db,
                         std::uint64_t seed, bool perturb_phase, double kernel_std) {
    const auto n = static_cast<std::size_t>(std::llround(fs * duration));
    std::vector<double> perturb;
    const std::vector<double>* pp = nullptr;
    if (perturb_phase) {
        perturb = wsf::model::smoothed_brownian_phase(wsf::mix_seed(seed, 1), kernel_std,
                                                      fs, n);
        pp = &perturb;
    }
    auto [signal, truth] = wsf::model::synth_benchmark(fs, duration, pp);
    wsf::model::NoiseSpec noise{snr_db, wsf::mix_seed(seed, 2)};
    auto noisy = wsf::model::add_noise(signal, noise);

    py::dict out;
    out["samples"] = noisy.samples;
    out["fs"] = noisy.fs;
    out["change_points"] = truth.change_points;
    out["wsf_coeffs"] = truth.wsf_coeffs;
    return out;
}

py::dict analyze(const std::vector<double>& samples, double fs,
                 const std::string& config_json) {
    wsf::Signal s;
    s.samples = samples;
    s.fs = fs;
    auto cfg = config_json.empty() ? wsf::pipeline::PipelineConfig{}
                                   : wsf::pipeline::PipelineConfig::from_json(config_json);
    auto r = wsf::pipeline::analyze(s, cfg);

    py::dict out;
    out["k"] = r.k;
    out["labels"] = r.labels;
    out["shifts"] = r.shifts;
    out["harmonic"] = r.warp.harmonic;
    out["entropy_trace"] = r.entropy_trace;
    out["change_points"] = r.change_points;
    out["change_points_refined"] = r.change_points_refined;
    out["medians"] = r.wsfs.medians;
    py::list regs;
    for (const auto& fit : r.wsfs.regressions) {
        py::dict d;
        d["cos"] = fit.cos_coeffs;
        d["sin"] = fit.sin_coeffs;
        d["rms_error"] = fit.rms_error;
        regs.append(d);
    }
    out["regressions"] = regs;
    out["config"] = cfg.to_json();
    return out;
}

double svd_entropy(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("svd_entropy: empty matrix");
    const std::size_t L = rows.front().size();
    std::vector<double> flat;
    for (const auto& r : rows) {
        if (r.size() != L) throw std::invalid_argument("svd_entropy: ragged matrix");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return wsf::cycles::svd_entropy(flat, rows.size(), L);
}

std::string run_benchmark(const std::vector<double>& snrs_db, std::size_t n_realizations,
                       const std::vector<int>& iterations, std::uint64_t seed) {
    wsf::eval::BenchmarkConfig cfg;
    cfg.snrs_db = snrs_db;
    cfg.n_realizations = n_realizations;
    cfg.iterations = iterations;
    cfg.master_seed = seed;
    return wsf::eval::run_benchmark(cfg).to_json();
}

}  // namespace

PYBIND11_MODULE(_wsfwarp, m) {
    m.doc() = "wave-shape estimation and change-point detection";
    m.def("synth_benchmark", &synth_benchmark, py::arg("fs") = 6000.0,
          py::arg("duration") = 1.0, py::arg("snr_db") = std::nullopt,
          py::arg("seed") = 0, py::arg("perturb_phase") = false,
          py::arg("kernel_std") = 0.05,
          "Generate the three-harmonic benchmark signal with optional noise.");
    m.def("analyze", &analyze, py::arg("samples"), py::arg("fs"),
          py::arg("config_json") = std::string(),
          "Run the full warping/clustering pipeline on a sampled signal.");
    m.def("svd_entropy", &svd_entropy, py::arg("rows"),
          "Shannon entropy of the normalized singular values.");
    m.def("run_benchmark", &run_benchmark, py::arg("snrs_db"), py::arg("n_realizations"),
          py::arg("iterations"), py::arg("seed") = 0,
          "Monte-Carlo benchmark sweep; returns a JSON report.");
    m.def("default_config_json",
          [] { return wsf::pipeline::PipelineConfig{}.to_json(); },
          "Default pipeline configuration as JSON.");
}
