// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "idlta/estimators.hpp"

#include <cmath>

#include "idlta/errors.hpp"
#include "idlta/io.hpp"

namespace idlta {
namespace {

void check_floor(double floor_epsilon) {
  if (!(floor_epsilon > 0.0) || !std::isfinite(floor_epsilon))
    throw ConfigurationError("estimator: floor_epsilon must be positive");
}

}  // namespace

Estimator Estimator::oracle(const std::vector<TimeSignal>& references,
                            const StftConfig& config, double floor_epsilon) {
  check_floor(floor_epsilon);
  if (references.empty())
    throw ConfigurationError("oracle estimator: missing reference signals");
  const int num_src = static_cast<int>(references.size());

  Estimator est(EstimatorType::oracle, floor_epsilon);
  for (int n = 0; n < num_src; ++n) {
    const TimeSignal& ref = references[n];
    if (ref.channels() != 1)
      throw ConfigurationError("oracle estimator: references must be mono");
    if (ref.length() != references[0].length() ||
        ref.sample_rate_hz != references[0].sample_rate_hz)
      throw ConfigurationError(
          "oracle estimator: inconsistent reference lengths or rates");
    const Spectrogram spec = stft_forward(ref, config);
    if (n == 0) {
      est.z_ = ComplexTensor(spec.bins, spec.frames, num_src);
      est.d2_ = RealTensor(spec.bins, spec.frames, num_src);
    }
    for (int j = 0; j < spec.frames; ++j)
      for (int i = 0; i < spec.bins; ++i) {
        const cd z = spec.at(i, j, 0);
        est.z_(i, j, n) = z;
        est.d2_(i, j, n) = std::norm(z) + floor_epsilon;
      }
  }
  return est;
}

Estimator Estimator::file_backed(
    const std::vector<std::string>& spectra_paths,
    const std::vector<std::string>& estimate_paths, const StftConfig& config,
    double floor_epsilon, int expected_bins, int expected_frames) {
  check_floor(floor_epsilon);
  if (spectra_paths.empty() || spectra_paths.size() != estimate_paths.size())
    throw ConfigurationError(
        "file estimator: need matching spectra and estimate paths");
  const int num_src = static_cast<int>(spectra_paths.size());

  Estimator est(EstimatorType::file_backed, floor_epsilon);
  est.z_ = ComplexTensor(expected_bins, expected_frames, num_src);
  est.d2_ = RealTensor(expected_bins, expected_frames, num_src);

  for (int n = 0; n < num_src; ++n) {
    const RealTensor spectra = read_real_tensor(spectra_paths[n]);
    if (spectra.ni != expected_bins || spectra.nj != expected_frames ||
        spectra.nk != 1)
      throw FormatError(spectra_paths[n] + ": spectra dims (" +
                        std::to_string(spectra.ni) + ", " +
                        std::to_string(spectra.nj) + ", " +
                        std::to_string(spectra.nk) + ") do not match (" +
                        std::to_string(expected_bins) + ", " +
                        std::to_string(expected_frames) + ", 1)");
    const TimeSignal estimate = read_wav(estimate_paths[n]);
    if (estimate.channels() != 1)
      throw FormatError(estimate_paths[n] + ": estimate must be mono");
    const Spectrogram spec = stft_forward(estimate, config);
    if (spec.bins != expected_bins || spec.frames != expected_frames)
      throw FormatError(estimate_paths[n] +
                        ": estimate STFT does not match mixture frames");
    for (int j = 0; j < expected_frames; ++j)
      for (int i = 0; i < expected_bins; ++i) {
        est.z_(i, j, n) = spec.at(i, j, 0);
        est.d2_(i, j, n) = std::max(spectra(i, j, 0), floor_epsilon);
      }
  }
  return est;
}

Estimator Estimator::passthrough(double floor_epsilon) {
  check_floor(floor_epsilon);
  return Estimator(EstimatorType::passthrough, floor_epsilon);
}

Estimator Estimator::build(const EstimatorKind& kind, const StftConfig& config,
                           double floor_epsilon, int expected_bins,
                           int expected_frames, long mixture_length,
                           int mixture_rate, int sources) {
  switch (kind.type) {
    case EstimatorType::oracle: {
      if (static_cast<int>(kind.references.size()) != sources)
        throw ConfigurationError("oracle estimator: need one reference per "
                                 "source, got " +
                                 std::to_string(kind.references.size()));
      for (const TimeSignal& ref : kind.references) {
        if (ref.length() != mixture_length)
          throw ConfigurationError(
              "oracle estimator: reference length differs from mixture");
        if (ref.sample_rate_hz != mixture_rate)
          throw ConfigurationError(
              "oracle estimator: reference sample rate differs from mixture");
      }
      return oracle(kind.references, config, floor_epsilon);
    }
    case EstimatorType::file_backed: {
      if (static_cast<int>(kind.spectra_paths.size()) != sources ||
          static_cast<int>(kind.estimate_paths.size()) != sources)
        throw ConfigurationError(
            "file estimator: need one spectra and one estimate per source");
      return file_backed(kind.spectra_paths, kind.estimate_paths, config,
                         floor_epsilon, expected_bins, expected_frames);
    }
    case EstimatorType::passthrough:
      return passthrough(floor_epsilon);
  }
  throw ConfigurationError("estimator: unknown kind");
}

FcmSeries Estimator::estimate(const Spectrogram& current_y,
                              double alpha) const {
  if (alpha < 0.0 || alpha >= 1.0)
    throw ModelDomainError("estimate_fcm: alpha must lie in [0, 1)");

  FcmSeries fcm;
  fcm.alpha = alpha;
  fcm.floor_epsilon = floor_;

  if (type_ == EstimatorType::passthrough) {
    fcm.diag_power =
        RealTensor(current_y.bins, current_y.frames, current_y.channels);
    fcm.rank1 =
        ComplexTensor(current_y.bins, current_y.frames, current_y.channels);
    for (int n = 0; n < current_y.channels; ++n)
      for (int j = 0; j < current_y.frames; ++j)
        for (int i = 0; i < current_y.bins; ++i) {
          const cd y = current_y.at(i, j, n);
          fcm.rank1(i, j, n) = y;
          fcm.diag_power(i, j, n) = std::norm(y) + floor_;
        }
  } else {
    if (current_y.bins != d2_.ni || current_y.frames != d2_.nj ||
        current_y.channels != d2_.nk)
      throw InvalidInputError(
          "estimate_fcm: separated tensor shape does not match estimator");
    fcm.diag_power = d2_;
    fcm.rank1 = z_;
  }
  validate(fcm);
  return fcm;
}

FcmSeries estimate_fcm(const EstimatorKind& kind, const Spectrogram& current_y,
                       const StftConfig& config, double alpha,
                       double floor_epsilon) {
  const Estimator est = Estimator::build(
      kind, config, floor_epsilon, current_y.bins, current_y.frames,
      current_y.source_length, config.sample_rate_hz, current_y.channels);
  return est.estimate(current_y, alpha);
}

}  // namespace idlta
