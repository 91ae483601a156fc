// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "idlta/pipeline.hpp"

#include <cmath>
#include <limits>

#include "idlta/errors.hpp"
#include "idlta/fcm.hpp"
#include "idlta/vcd.hpp"

namespace idlta {
namespace {

void validate(const SeparationConfig& config, const TimeSignal& mixture) {
  if (config.alpha < 0.0 || config.alpha >= 1.0)
    throw ConfigurationError("separate: alpha must lie in [0, 1)");
  if (config.total_iterations < 1)
    throw ConfigurationError("separate: total_iterations must be positive");
  if (config.fcm_refresh_period < 1 ||
      config.fcm_refresh_period > config.total_iterations)
    throw ConfigurationError(
        "separate: fcm_refresh_period must lie in [1, total_iterations]");
  if (config.reference_channel < 0 ||
      config.reference_channel >= mixture.channels())
    throw ConfigurationError("separate: reference channel out of range");
  if (mixture.sample_rate_hz != config.stft.sample_rate_hz)
    throw ConfigurationError("separate: mixture rate differs from stft config");
}

TimeSignal extract_source(const Spectrogram& y, int n) {
  Spectrogram mono(y.bins, y.frames, 1, y.config, y.source_length);
  for (int j = 0; j < y.frames; ++j)
    for (int i = 0; i < y.bins; ++i) mono.at(i, j, 0) = y.at(i, j, n);
  return stft_inverse(mono);
}

template <class SweepFn, class RefreshFn>
SeparationResult run_loop(const TimeSignal& mixture,
                          const SeparationConfig& config, RefreshFn refresh,
                          SweepFn sweep) {
  const Spectrogram spec = stft_forward(mixture, config.stft);
  const int num_src = mixture.channels();

  SeparationResult result;
  result.w_final = DemixingSet::identity(spec.bins, num_src);

  FcmSeries fcm;
  FcmInverseCache cache;
  std::vector<std::vector<Eigen::MatrixXcd>> q_all;

  for (int t = 1; t <= config.total_iterations; ++t) {
    if ((t - 1) % config.fcm_refresh_period == 0) {
      const Spectrogram y = demix(spec, result.w_final);
      refresh(y, &fcm, &cache, &q_all);
    }
    result.rows_skipped += sweep(spec, result.w_final, fcm, cache, q_all);
    if (config.record_objective)
      result.objective_trace.push_back(
          total_objective(spec, result.w_final, fcm, cache));
    result.iterations_run = t;
  }

  result.w_final = scale_restore(result.w_final, config.reference_channel);
  const Spectrogram y = demix(spec, result.w_final);
  result.separated.reserve(num_src);
  for (int n = 0; n < num_src; ++n)
    result.separated.push_back(extract_source(y, n));
  return result;
}

}  // namespace

double diag_power_floor(const Spectrogram& mixture_spec) {
  double mean_power = 0.0;
  for (const cd& x : mixture_spec.data) mean_power += std::norm(x);
  mean_power /= static_cast<double>(mixture_spec.data.size());
  const double floor = 1e-10 * mean_power;
  return floor > 0.0 ? floor : std::numeric_limits<double>::min();
}

SeparationResult separate(const TimeSignal& mixture,
                          const SeparationConfig& config) {
  check_signal(mixture, "separate");
  validate(config, mixture);
  const int num_src = mixture.channels();
  const Spectrogram spec = stft_forward(mixture, config.stft);
  const Estimator estimator = Estimator::build(
      config.estimator, config.stft, diag_power_floor(spec), spec.bins,
      spec.frames, mixture.length(), mixture.sample_rate_hz, num_src);

  auto refresh = [&](const Spectrogram& y, FcmSeries* fcm,
                     FcmInverseCache* cache,
                     std::vector<std::vector<Eigen::MatrixXcd>>* q_all) {
    *fcm = estimator.estimate(y, config.alpha);
    *cache = build_inverse_cache(*fcm);
    q_all->clear();
    for (int n = 0; n < y.channels; ++n)
      q_all->push_back(weighted_covariances(spec, *fcm, *cache, n));
  };
  auto sweep = [](const Spectrogram& s, DemixingSet& w, const FcmSeries& fcm,
                  const FcmInverseCache& cache,
                  const std::vector<std::vector<Eigen::MatrixXcd>>& q_all) {
    return vcd_sweep(s, w, fcm, cache, q_all);
  };
  return run_loop(mixture, config, refresh, sweep);
}

SeparationResult separate_diagonal(const TimeSignal& mixture,
                                   const SeparationConfig& config) {
  check_signal(mixture, "separate_diagonal");
  validate(config, mixture);
  if (config.alpha != 0.0)
    throw ConfigurationError("separate_diagonal: requires alpha == 0");
  const int num_src = mixture.channels();
  const Spectrogram spec = stft_forward(mixture, config.stft);
  const Estimator estimator = Estimator::build(
      config.estimator, config.stft, diag_power_floor(spec), spec.bins,
      spec.frames, mixture.length(), mixture.sample_rate_hz, num_src);

  auto refresh = [&](const Spectrogram& y, FcmSeries* fcm,
                     FcmInverseCache* cache,
                     std::vector<std::vector<Eigen::MatrixXcd>>* q_all) {
    *fcm = estimator.estimate(y, 0.0);
    *cache = build_inverse_cache(*fcm);
    q_all->clear();
    for (int n = 0; n < y.channels; ++n)
      q_all->push_back(diagonal_covariances(spec, *fcm, n));
  };
  auto sweep = [](const Spectrogram& s, DemixingSet& w, const FcmSeries&,
                  const FcmInverseCache&,
                  const std::vector<std::vector<Eigen::MatrixXcd>>& q_all) {
    return diagonal_sweep(s, w, q_all);
  };
  return run_loop(mixture, config, refresh, sweep);
}

DemixingSet scale_restore(const DemixingSet& w, int reference_channel) {
  if (reference_channel < 0 || reference_channel >= w.channels())
    throw InvalidInputError("scale_restore: reference channel out of range");
  DemixingSet out = w;
  for (int i = 0; i < w.bins(); ++i) {
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(w.matrices[i]);
    if (std::abs(lu.determinant()) < 1e-300)
      throw DegenerateDemixingError("scale_restore: singular W at bin " +
                                    std::to_string(i));
    const Eigen::MatrixXcd inv = lu.inverse();
    for (int n = 0; n < w.sources(); ++n)
      out.matrices[i].row(n) = inv(reference_channel, n) * w.matrices[i].row(n);
  }
  return out;
}

}  // namespace idlta
