// wsf: synthesize benchmark signals, analyze oscillatory recordings, and run
// the evaluation sweep. Exit codes: 0 ok, 2 bad arguments, 3 data error,
// 4 numeric failure.
#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "wsf/errors.hpp"
#include "wsf/eval.hpp"
#include "wsf/fft.hpp"
#include "wsf/io.hpp"
#include "wsf/pipeline.hpp"
#include "wsf/signal_model.hpp"
#include "wsf/tfa.hpp"

#ifndef WSF_VERSION
#define WSF_VERSION "0.1.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("WSF_OUTPUT_DIR");
    return env && *env ? env : ".";
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw wsf::DataError("cannot write file: " + path.string());
    out << text;
    if (!out) throw wsf::DataError("write failed: " + path.string());
}

// log-magnitude spectrogram PNG + CSV; ridge overlay drawn in white when given
void emit_spectrogram(const fs::path& png, const fs::path& csv, const wsf::Signal& s,
                      const std::vector<double>* ridge_times,
                      const std::vector<double>* ridge_freqs) {
    const std::size_t n = s.size();
    std::size_t win_len = std::max<std::size_t>(33, n / 20);
    if (win_len % 2 == 0) ++win_len;
    if (win_len + 2 > n) win_len = n - 2 - (n % 2 == 0 ? 1 : 0);
    wsf::tfa::WindowSpec win{win_len, static_cast<double>(win_len) / 6.0};
    const std::size_t hop = std::max<std::size_t>(1, n / 512);
    const std::size_t n_fft = wsf::fft::next_pow2(2 * win_len);
    auto tfr = wsf::tfa::stft(s, win, hop, n_fft);

    std::vector<double> mags(tfr.frames() * tfr.bins());
    for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::abs(tfr.values[i]);
    auto px = wsf::io::spectrogram_pixels(mags, tfr.frames(), tfr.bins());
    if (ridge_times && ridge_freqs) {
        const double df = tfr.freqs[1] - tfr.freqs[0];
        for (std::size_t i = 0; i < ridge_times->size(); ++i) {
            const double t = (*ridge_times)[i];
            if (t < tfr.times.front() || t > tfr.times.back()) continue;
            const auto m = static_cast<std::size_t>(
                std::lround((t - tfr.times.front()) / (tfr.times[1] - tfr.times[0])));
            const auto k = static_cast<std::size_t>(std::lround((*ridge_freqs)[i] / df));
            if (m < tfr.frames() && k < tfr.bins())
                px[(tfr.bins() - 1 - k) * tfr.frames() + m] = 255;
        }
    }
    wsf::io::write_png_gray(png.string(), px, tfr.frames(), tfr.bins());

    std::vector<std::string> header(tfr.bins());
    for (std::size_t k = 0; k < tfr.bins(); ++k)
        header[k] = "f" + std::to_string(tfr.freqs[k]);
    wsf::io::write_matrix_csv(csv.string(), mags, tfr.frames(), tfr.bins(), header);
}

int cmd_synth(double fs, double duration, const std::string& snr, std::uint64_t seed,
              bool perturb, double kernel_std, const std::string& out_dir,
              const std::string& name) {
    const auto n = static_cast<std::size_t>(std::llround(fs * duration));
    std::vector<double> phase_perturb;
    const std::vector<double>* pp = nullptr;
    if (perturb) {
        phase_perturb =
            wsf::model::smoothed_brownian_phase(wsf::mix_seed(seed, 1), kernel_std, fs, n);
        pp = &phase_perturb;
    }
    auto [signal, truth] = wsf::model::synth_benchmark(fs, duration, pp);

    std::optional<double> snr_db;
    if (!snr.empty() && snr != "inf" && snr != "none") snr_db = std::stod(snr);
    wsf::model::NoiseSpec noise{snr_db, wsf::mix_seed(seed, 2)};
    auto noisy = wsf::model::add_noise(signal, noise);

    fs::path dir(out_dir);
    fs::create_directories(dir);
    wsf::io::write_signal_csv((dir / (name + ".csv")).string(), noisy);

    json j;
    j["version"] = WSF_VERSION;
    j["fs"] = fs;
    j["duration"] = duration;
    j["snr_db"] = snr_db ? json(*snr_db) : json(nullptr);
    j["seed"] = seed;
    j["phase_perturbed"] = perturb;
    j["kernel_std"] = kernel_std;
    j["wsf_coeffs"] = truth.wsf_coeffs;
    j["change_points"] = truth.change_points;
    write_text(dir / (name + "_truth.json"), j.dump(2));
    std::cout << (dir / (name + ".csv")).string() << '\n'
              << (dir / (name + "_truth.json")).string() << '\n';
    return 0;
}

int cmd_analyze(const std::string& input, double fs_hint, wsf::pipeline::PipelineConfig cfg,
                const std::string& name) {
    auto signal = wsf::io::read_signal(input, fs_hint);
    if (cfg.output_dir.empty()) cfg.output_dir = default_out_dir();
    auto res = wsf::pipeline::analyze(signal, cfg);

    fs::path dir(cfg.output_dir);
    fs::create_directories(dir);

    json j;
    j["version"] = WSF_VERSION;
    j["config"] = json::parse(cfg.to_json());
    j["k"] = res.k;
    j["labels"] = res.labels;
    j["shifts"] = res.shifts;
    j["harmonic"] = res.warp.harmonic;
    j["entropy_trace"] = res.entropy_trace;
    j["change_points"] = res.change_points;
    j["change_points_refined"] = res.change_points_refined;
    j["cluster_coefficients"] = json::array();
    for (const auto& fit : res.wsfs.regressions)
        j["cluster_coefficients"].push_back({{"cos", fit.cos_coeffs},
                                             {"sin", fit.sin_coeffs},
                                             {"rms_error", fit.rms_error}});
    write_text(dir / (name + "_results.json"), j.dump(2));

    const auto& m = res.matrix;
    std::vector<std::string> header(m.L);
    for (std::size_t l = 0; l < m.L; ++l) header[l] = "s" + std::to_string(l);
    wsf::io::write_matrix_csv((dir / (name + "_cycles_aligned.csv")).string(), m.rows, m.P,
                              m.L, header);
    // unaligned rows: undo the per-row shifts
    std::vector<double> rawrows(m.rows.size());
    for (std::size_t p = 0; p < m.P; ++p)
        for (std::size_t l = 0; l < m.L; ++l)
            rawrows[p * m.L + (l + res.shifts[p]) % m.L] = m.at(p, l);
    wsf::io::write_matrix_csv((dir / (name + "_cycles.csv")).string(), rawrows, m.P, m.L,
                              header);

    std::vector<double> wsfrows;
    for (const auto& med : res.wsfs.medians)
        wsfrows.insert(wsfrows.end(), med.begin(), med.end());
    wsf::io::write_matrix_csv((dir / (name + "_wsfs.csv")).string(), wsfrows,
                              res.wsfs.medians.size(), m.L, header);

    const auto& trace0 = res.warp.component_traces.front();
    std::vector<double> trace_times;
    {
        // frame times of the first pass, reconstructed from the ridge length
        const double span = signal.duration();
        const std::size_t nf = trace0.ridge_freq.size();
        for (std::size_t i = 0; i < nf; ++i)
            trace_times.push_back(signal.t0 + span * static_cast<double>(i) /
                                                  static_cast<double>(nf - 1));
    }
    emit_spectrogram(dir / (name + "_spec_before.png"), dir / (name + "_spec_before.csv"),
                     signal, &trace_times, &trace0.ridge_freq);
    emit_spectrogram(dir / (name + "_spec_after.png"), dir / (name + "_spec_after.csv"),
                     res.warp.warped.signal, nullptr, nullptr);

    std::cout << (dir / (name + "_results.json")).string() << '\n';
    return 0;
}

int cmd_eval(wsf::eval::BenchmarkConfig cfg, const std::string& out_dir,
             const std::string& name) {
    auto report = wsf::eval::run_benchmark(cfg);
    fs::path dir(out_dir);
    fs::create_directories(dir);
    write_text(dir / (name + ".csv"), report.to_csv());
    json j = json::parse(report.to_json(), nullptr, true, true);
    j["version"] = WSF_VERSION;
    write_text(dir / (name + ".json"), j.dump(2));
    std::cout << (dir / (name + ".csv")).string() << '\n'
              << (dir / (name + ".json")).string() << '\n';
    return 0;
}

void print_error(const std::string& type, const std::string& message) {
    json j;
    j["error"] = {{"type", type}, {"message", message}};
    std::cerr << j.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wave-shape estimation and change-point detection"};
    app.set_version_flag("--version", WSF_VERSION);
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate the benchmark signal");
    double s_fs = 6000.0, s_dur = 1.0, s_kernel = 0.05;
    std::string s_snr = "inf", s_out = default_out_dir(), s_name = "synth";
    std::uint64_t s_seed = 0;
    bool s_perturb = false;
    synth->add_option("--fs", s_fs, "sampling rate, Hz");
    synth->add_option("--duration", s_dur, "signal length, s");
    synth->add_option("--snr", s_snr, "SNR in dB, or 'inf' for noiseless");
    synth->add_option("--seed", s_seed, "master seed");
    synth->add_flag("--perturb-phase", s_perturb, "randomize the phase (smoothed Brownian)");
    synth->add_option("--kernel-std", s_kernel, "phase smoothing kernel std, s");
    synth->add_option("--out-dir", s_out, "output directory");
    synth->add_option("--name", s_name, "output file stem");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "estimate waveforms and change points");
    std::string a_input, a_name = "analysis";
    double a_fs = 0.0;
    wsf::pipeline::PipelineConfig acfg;
    acfg.output_dir = default_out_dir();
    analyze->add_option("input", a_input, "CSV (t,x or x) or mono PCM WAV")->required();
    analyze->add_option("--fs", a_fs, "sampling rate for single-column CSV, Hz");
    analyze->add_option("--window-cycles", acfg.window_cycles, "window sigma, fundamental cycles");
    analyze->add_option("--f0-min", acfg.f0_min, "fundamental band low edge, Hz");
    analyze->add_option("--f0-max", acfg.f0_max, "fundamental band high edge, Hz");
    analyze->add_option("--harmonic", acfg.harmonic, "warping harmonic; 0 = auto");
    analyze->add_option("--max-mult", acfg.max_mult, "highest harmonic considered for auto");
    analyze->add_option("--ridge-lambda", acfg.ridge_lambda_bins, "ridge penalty per bin^2");
    analyze->add_option("--samples-per-cycle", acfg.samples_per_cycle, "warped samples per cycle");
    analyze->add_flag("--m-equals-n", acfg.m_equals_n, "keep the input sample count when warping");
    analyze->add_option("--max-iterations", acfg.max_iterations, "warping iterations cap");
    analyze->add_option("--entropy-rel-tol", acfg.entropy_rel_tol, "stagnation threshold");
    analyze->add_option("--demod-floor-quantile", acfg.demod_floor_quantile,
                        "amplitude floor quantile");
    analyze->add_option("--refine-lo", acfg.refine_lo, "period refinement grid low edge");
    analyze->add_option("--refine-hi", acfg.refine_hi, "period refinement grid high edge");
    analyze->add_option("--refine-grid", acfg.refine_grid, "period refinement grid size; 0 = off");
    bool a_no_sync = false;
    analyze->add_flag("--no-sync", a_no_sync, "skip cycle synchronization");
    analyze->add_option("--k-max", acfg.k_max, "largest cluster count considered");
    analyze->add_option("--replicates", acfg.replicates, "k-means replicates");
    analyze->add_option("--seed", acfg.seed, "master seed");
    analyze->add_option("--out-dir", acfg.output_dir, "output directory");
    analyze->add_option("--name", a_name, "output file stem");

    // eval
    auto* eval = app.add_subcommand("eval", "Monte-Carlo benchmark sweep");
    wsf::eval::BenchmarkConfig ecfg;
    std::string e_out = default_out_dir(), e_name = "eval_report";
    eval->add_option("--snrs", ecfg.snrs_db, "SNRs in dB");
    eval->add_option("--realizations", ecfg.n_realizations, "realizations per SNR");
    eval->add_option("--iterations", ecfg.iterations, "iteration counts to score");
    eval->add_option("--seed", ecfg.master_seed, "master seed");
    eval->add_option("--fs", ecfg.fs, "sampling rate, Hz");
    eval->add_option("--duration", ecfg.duration, "signal length, s");
    eval->add_option("--k-max", ecfg.k_max, "largest cluster count considered");
    eval->add_option("--replicates", ecfg.replicates, "k-means replicates");
    eval->add_option("--window-cycles", ecfg.window_cycles, "window sigma, fundamental cycles");
    eval->add_option("--out-dir", e_out, "output directory");
    eval->add_option("--name", e_name, "output file stem");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        print_error("bad_arguments", e.what());
        return 2;
    }

    try {
        if (synth->parsed())
            return cmd_synth(s_fs, s_dur, s_snr, s_seed, s_perturb, s_kernel, s_out, s_name);
        if (analyze->parsed()) {
            acfg.synchronize = !a_no_sync;
            return cmd_analyze(a_input, a_fs, acfg, a_name);
        }
        if (eval->parsed()) return cmd_eval(ecfg, e_out, e_name);
    } catch (const std::invalid_argument& e) {
        print_error("bad_arguments", e.what());
        return 2;
    } catch (const wsf::DataError& e) {
        print_error("data_error", e.what());
        return 3;
    } catch (const wsf::NumericError& e) {
        print_error("numeric_error", e.what());
        return 4;
    } catch (const std::exception& e) {
        print_error("internal_error", e.what());
        return 4;
    }
    return 0;
}
