// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Command-line front end: mixture synthesis, separation, evaluation, and
// a statistics micro-benchmark.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "idlta/errors.hpp"
#include "idlta/eval.hpp"
#include "idlta/io.hpp"
#include "idlta/mixsim.hpp"
#include "idlta/pipeline.hpp"
#include "idlta/vcd.hpp"

namespace {

using idlta::cd;
using nlohmann::json;

double uniform01(std::mt19937_64& rng) {
  return std::ldexp(static_cast<double>(rng() >> 11), -53);
}

// Box-Muller on raw-bit uniforms keeps outputs identical across libraries.
double gauss(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

idlta::WindowKind parse_window(const std::string& name) {
  if (name == "hamming") return idlta::WindowKind::hamming;
  if (name == "hann") return idlta::WindowKind::hann;
  if (name == "sqrt_hann") return idlta::WindowKind::sqrt_hann;
  throw idlta::ConfigurationError("unknown window kind: " + name);
}

std::vector<idlta::TimeSignal> read_mono_wavs(
    const std::vector<std::string>& paths, const char* what) {
  std::vector<idlta::TimeSignal> out;
  out.reserve(paths.size());
  for (const std::string& p : paths) {
    idlta::TimeSignal s = idlta::read_wav(p);
    if (s.channels() != 1)
      throw idlta::InvalidInputError(std::string(what) + " " + p +
                                     ": expected a mono file");
    out.push_back(std::move(s));
  }
  return out;
}

void write_json_file(const json& doc, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw idlta::IoError("cannot open " + path + " for writing");
  out << doc.dump(2) << "\n";
}

int cmd_mix(const std::vector<std::string>& source_paths,
            const std::string& matrix_csv,
            const std::vector<std::string>& ir_paths, bool normalize,
            const std::string& out_path, const std::string& manifest_path) {
  const auto sources = read_mono_wavs(source_paths, "source");
  const int num_src = static_cast<int>(sources.size());

  idlta::MixSpec spec;
  spec.normalization = normalize ? idlta::MixNormalization::unit_source_power
                                 : idlta::MixNormalization::none;
  if (!matrix_csv.empty() && !ir_paths.empty())
    throw idlta::ConfigurationError("mix: pass either --matrix or --irs");
  if (!matrix_csv.empty()) {
    std::vector<double> entries;
    std::stringstream ss(matrix_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      size_t used = 0;
      entries.push_back(std::stod(tok, &used));
      if (used != tok.size())
        throw idlta::ConfigurationError("mix: bad matrix entry '" + tok + "'");
    }
    if (static_cast<int>(entries.size()) != num_src * num_src)
      throw idlta::ConfigurationError(
          "mix: matrix needs " + std::to_string(num_src * num_src) +
          " entries for " + std::to_string(num_src) + " sources");
    spec.mode = idlta::MixMode::instantaneous;
    spec.matrix.resize(num_src, num_src);
    for (int m = 0; m < num_src; ++m)
      for (int n = 0; n < num_src; ++n)
        spec.matrix(m, n) = entries[m * num_src + n];
  } else if (!ir_paths.empty()) {
    if (static_cast<int>(ir_paths.size()) != num_src)
      throw idlta::ConfigurationError(
          "mix: need one impulse-response file per source");
    spec.mode = idlta::MixMode::convolutive;
    for (const std::string& p : ir_paths)
      spec.impulse_responses.push_back(idlta::read_wav(p).samples);
    // Narrowband advisory against the default analysis preset, when the
    // rate admits one.
    try {
      const auto stft = idlta::StftConfig::preset_ms(
          512, 256, sources[0].sample_rate_hz);
      if (auto warning = idlta::validate_narrowband(spec, stft))
        std::cerr << "warning: " << *warning << "\n";
    } catch (const idlta::Error&) {
    }
  } else {
    throw idlta::ConfigurationError("mix: pass --matrix or --irs");
  }

  const idlta::TimeSignal mixture = idlta::mix(sources, spec);
  idlta::write_wav(mixture, out_path, idlta::WavFormat::float32);
  if (!manifest_path.empty()) {
    idlta::Manifest manifest;
    manifest.mixture = out_path;
    manifest.references = source_paths;
    manifest.sample_rate_hz = mixture.sample_rate_hz;
    idlta::write_manifest(manifest, manifest_path);
  }
  return 0;
}

int cmd_separate(const std::string& mix_path, double alpha, int iters,
                 int refresh, const std::string& estimator_name,
                 const std::vector<std::string>& ref_paths,
                 const std::vector<std::string>& spectra_paths,
                 const std::vector<std::string>& estimate_paths, int win_ms,
                 int hop_ms, const std::string& window_name, int ref_channel,
                 const std::string& out_dir, const std::string& trace_path) {
  const idlta::TimeSignal mixture = idlta::read_wav(mix_path);

  idlta::SeparationConfig config;
  config.alpha = alpha;
  config.total_iterations = iters;
  config.fcm_refresh_period = refresh;
  config.reference_channel = ref_channel;
  config.record_objective = !trace_path.empty();
  config.stft = idlta::StftConfig::preset_ms(
      win_ms, hop_ms, mixture.sample_rate_hz, parse_window(window_name));

  if (estimator_name == "oracle") {
    config.estimator.type = idlta::EstimatorType::oracle;
    config.estimator.references = read_mono_wavs(ref_paths, "reference");
  } else if (estimator_name == "file") {
    config.estimator.type = idlta::EstimatorType::file_backed;
    config.estimator.spectra_paths = spectra_paths;
    config.estimator.estimate_paths = estimate_paths;
  } else if (estimator_name == "passthrough") {
    config.estimator.type = idlta::EstimatorType::passthrough;
  } else {
    throw idlta::ConfigurationError("unknown estimator: " + estimator_name);
  }

  const idlta::SeparationResult result = idlta::separate(mixture, config);
  if (result.rows_skipped > 0)
    std::cerr << "note: skipped " << result.rows_skipped
              << " ill-conditioned row updates\n";

  std::filesystem::create_directories(out_dir);
  for (size_t n = 0; n < result.separated.size(); ++n) {
    const std::string path =
        (std::filesystem::path(out_dir) /
         ("source_" + std::to_string(n) + ".wav")).string();
    idlta::write_wav(result.separated[n], path, idlta::WavFormat::float32);
  }
  if (!trace_path.empty()) {
    json doc;
    doc["alpha"] = alpha;
    doc["iterations"] = result.iterations_run;
    doc["fcm_refresh_period"] = refresh;
    doc["objective"] = result.objective_trace;
    doc["rows_skipped"] = result.rows_skipped;
    write_json_file(doc, trace_path);
  }
  return 0;
}

int cmd_eval(const std::vector<std::string>& estimate_paths,
             const std::vector<std::string>& ref_paths,
             const std::string& mix_path, int ref_channel,
             const std::string& out_path) {
  const auto estimates = read_mono_wavs(estimate_paths, "estimate");
  const auto references = read_mono_wavs(ref_paths, "reference");
  const idlta::TimeSignal mixture = idlta::read_wav(mix_path);
  const idlta::EvalReport report =
      idlta::align_and_score(estimates, references, mixture, ref_channel);
  const json doc = idlta::to_json(report);
  if (out_path.empty())
    std::cout << doc.dump(2) << "\n";
  else
    write_json_file(doc, out_path);
  return 0;
}

int cmd_bench(double alpha, int bins, int frames, int channels, int repeat,
              uint64_t seed, bool force_direct) {
  using clock = std::chrono::steady_clock;
  std::mt19937_64 rng(seed);

  idlta::StftConfig cfg;
  cfg.window_length_samples = 2 * (bins - 1);
  cfg.hop_samples = std::max(1, (bins - 1));
  idlta::Spectrogram spec(bins, frames, channels, cfg, 0);
  for (cd& x : spec.data) x = cd(gauss(rng), gauss(rng));

  idlta::FcmSeries fcm;
  fcm.alpha = alpha;
  fcm.floor_epsilon = 1e-3;
  fcm.diag_power = idlta::RealTensor(bins, frames, channels);
  fcm.rank1 = idlta::ComplexTensor(bins, frames, channels);
  for (double& d : fcm.diag_power.v) {
    const double g = gauss(rng);
    d = 0.1 + g * g;
  }
  for (cd& z : fcm.rank1.v) z = cd(gauss(rng), gauss(rng));
  const idlta::FcmInverseCache cache = idlta::build_inverse_cache(fcm);

  idlta::DemixingSet w = idlta::DemixingSet::identity(bins, channels);
  for (auto& wi : w.matrices)
    for (int r = 0; r < channels; ++r)
      for (int c = 0; c < channels; ++c)
        wi(r, c) += cd(0.3 * gauss(rng), 0.3 * gauss(rng));

  std::vector<idlta::SourceStatistics> fast(channels);
  const auto t0 = clock::now();
  for (int rep = 0; rep < repeat; ++rep)
    for (int n = 0; n < channels; ++n)
      fast[n] = idlta::compute_statistics(spec, w, fcm, cache, n);
  const double fast_seconds =
      std::chrono::duration<double>(clock::now() - t0).count() / repeat;

  json doc;
  doc["alpha"] = alpha;
  doc["freq_bins"] = bins;
  doc["frames"] = frames;
  doc["channels"] = channels;
  doc["repeat"] = repeat;
  doc["accelerated_seconds"] = fast_seconds;

  const double direct_cost = static_cast<double>(bins) * bins * frames *
                             channels * repeat;
  if (direct_cost > 5e8 && !force_direct) {
    std::cerr << "note: direct dense path skipped at freq_bins=" << bins
              << " (estimated cost too high; pass --force-direct to run)\n";
    doc["direct_seconds"] = nullptr;
    doc["speedup"] = nullptr;
    doc["direct_skipped"] = true;
    doc["max_rel_diff"] = nullptr;
  } else {
    std::vector<idlta::SourceStatistics> slow(channels);
    const auto t1 = clock::now();
    for (int rep = 0; rep < repeat; ++rep) {
      for (int n = 0; n < channels; ++n) {
        std::vector<Eigen::MatrixXcd> rinv;
        rinv.reserve(frames);
        for (int j = 0; j < frames; ++j)
          rinv.push_back(idlta::dense_inverse(cache, fcm, j, n));
        slow[n] = idlta::compute_statistics_direct(spec, w, n, rinv);
      }
    }
    const double direct_seconds =
        std::chrono::duration<double>(clock::now() - t1).count() / repeat;

    double max_rel = 0.0;
    for (int n = 0; n < channels; ++n) {
      for (int i = 0; i < bins; ++i) {
        const double qn = slow[n].q[i].norm();
        const double gn = slow[n].gamma[i].norm();
        max_rel = std::max(
            max_rel, (fast[n].q[i] - slow[n].q[i]).norm() / std::max(qn, 1e-30));
        if (gn > 1e-12)
          max_rel = std::max(
              max_rel, (fast[n].gamma[i] - slow[n].gamma[i]).norm() / gn);
      }
    }
    doc["direct_seconds"] = direct_seconds;
    doc["speedup"] = direct_seconds / fast_seconds;
    doc["direct_skipped"] = false;
    doc["max_rel_diff"] = max_rel;
  }
  std::cout << doc.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Determined source separation with diagonal-plus-rank-1 "
               "frequency covariance models"};
  app.require_subcommand(1);

  // mix
  auto* mix = app.add_subcommand("mix", "Synthesize a determined mixture");
  std::vector<std::string> mix_sources, mix_irs;
  std::string mix_matrix, mix_out, mix_manifest;
  bool mix_normalize = false;
  mix->add_option("--sources", mix_sources, "Mono source WAVs")
      ->required()
      ->expected(-1);
  mix->add_option("--matrix", mix_matrix,
                  "Row-major mixing matrix, comma separated");
  mix->add_option("--irs", mix_irs,
                  "Per-source impulse-response WAVs (mics channels each)")
      ->expected(-1);
  mix->add_flag("--normalize", mix_normalize,
                "Scale each source to unit average power first");
  mix->add_option("--out", mix_out, "Output mixture WAV")->required();
  mix->add_option("--manifest", mix_manifest, "Manifest JSON to write");

  // separate
  auto* sep = app.add_subcommand("separate", "Run the separation loop");
  std::string sep_mix, sep_estimator = "oracle", sep_window = "hamming";
  std::string sep_out_dir, sep_trace;
  std::vector<std::string> sep_refs, sep_spectra, sep_estimates;
  double sep_alpha = 0.5;
  int sep_iters = 100, sep_refresh = 10, sep_win_ms = 512, sep_hop_ms = 256;
  int sep_ref_channel = 0;
  sep->add_option("--mix", sep_mix, "Mixture WAV")->required();
  sep->add_option("--alpha", sep_alpha, "FCM mixing weight in [0,1)");
  sep->add_option("--iters", sep_iters, "Demixing update iterations");
  sep->add_option("--fcm-refresh", sep_refresh,
                  "Sweeps between FCM re-estimates");
  sep->add_option("--estimator", sep_estimator,
                  "oracle | file | passthrough");
  sep->add_option("--refs", sep_refs, "Oracle reference WAVs")->expected(-1);
  sep->add_option("--spectra", sep_spectra, "Per-source d^2 tensor files")
      ->expected(-1);
  sep->add_option("--estimates", sep_estimates,
                  "Per-source time-domain estimate WAVs")
      ->expected(-1);
  sep->add_option("--win-ms", sep_win_ms, "STFT window (ms)");
  sep->add_option("--hop-ms", sep_hop_ms, "STFT hop (ms)");
  sep->add_option("--window", sep_window, "hamming | hann | sqrt_hann");
  sep->add_option("--ref-channel", sep_ref_channel,
                  "Projection-back reference channel");
  sep->add_option("--out-dir", sep_out_dir, "Output directory")->required();
  sep->add_option("--trace", sep_trace, "Objective trace JSON to write");

  // eval
  auto* ev = app.add_subcommand("eval", "Score separated sources");
  std::vector<std::string> ev_estimates, ev_refs;
  std::string ev_mix, ev_out;
  int ev_ref_channel = 0;
  ev->add_option("--estimates", ev_estimates, "Separated WAVs")
      ->required()
      ->expected(-1);
  ev->add_option("--refs", ev_refs, "Reference WAVs")->required()->expected(-1);
  ev->add_option("--mix", ev_mix, "Mixture WAV (baseline)")->required();
  ev->add_option("--ref-channel", ev_ref_channel, "Baseline mixture channel");
  ev->add_option("--out", ev_out, "Report JSON (stdout when omitted)");

  // bench
  auto* bench = app.add_subcommand(
      "bench", "Time accelerated vs direct VCD statistics");
  double bench_alpha = 0.5;
  int bench_bins = 513, bench_frames = 120, bench_channels = 2,
      bench_repeat = 1;
  uint64_t bench_seed = 1;
  bool bench_force_direct = false;
  bench->add_option("--alpha", bench_alpha, "FCM mixing weight in [0,1)");
  bench->add_option("--freq-bins", bench_bins, "Frequency bins");
  bench->add_option("--frames", bench_frames, "Time frames");
  bench->add_option("--channels", bench_channels, "Channels (= sources)");
  bench->add_option("--repeat", bench_repeat, "Timing repetitions");
  bench->add_option("--seed", bench_seed, "Synthesis seed");
  bench->add_flag("--force-direct", bench_force_direct,
                  "Run the direct path regardless of size");

  try {
    app.parse(argc, argv);
    if (*mix)
      return cmd_mix(mix_sources, mix_matrix, mix_irs, mix_normalize, mix_out,
                     mix_manifest);
    if (*sep)
      return cmd_separate(sep_mix, sep_alpha, sep_iters, sep_refresh,
                          sep_estimator, sep_refs, sep_spectra, sep_estimates,
                          sep_win_ms, sep_hop_ms, sep_window, sep_ref_channel,
                          sep_out_dir, sep_trace);
    if (*ev)
      return cmd_eval(ev_estimates, ev_refs, ev_mix, ev_ref_channel, ev_out);
    if (*bench)
      return cmd_bench(bench_alpha, bench_bins, bench_frames, bench_channels,
                       bench_repeat, bench_seed, bench_force_direct);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << nlohmann::json{
                     {"error", {{"kind", "cli"}, {"message", e.what()}}}}
                     .dump()
              << "\n";
    return 2;
  } catch (const idlta::Error& e) {
    std::cerr << nlohmann::json{
                     {"error", {{"kind", e.kind()}, {"message", e.what()}}}}
                     .dump()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{
                     {"error", {{"kind", "internal"}, {"message", e.what()}}}}
                     .dump()
              << "\n";
    return 1;
  }
  return 0;
}
