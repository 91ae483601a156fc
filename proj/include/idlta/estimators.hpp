// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IDLTA_ESTIMATORS_HPP_
#define IDLTA_ESTIMATORS_HPP_

#include <string>
#include <vector>

#include "idlta/fcm.hpp"
#include "idlta/signal.hpp"
#include "idlta/stft.hpp"

namespace idlta {

enum class EstimatorType { oracle, file_backed, passthrough };

// Configuration-level description of the FCM source: reference signals
// (oracle), per-source spectra/estimate files (file_backed), or nothing
// (passthrough self-refinement).
struct EstimatorKind {
  EstimatorType type = EstimatorType::passthrough;
  std::vector<TimeSignal> references;       // oracle: one per source
  std::vector<std::string> spectra_paths;   // file_backed: d^2 tensors
  std::vector<std::string> estimate_paths;  // file_backed: time-domain WAVs
};

// FCM provider standing in for the external spectral and time-domain
// models. Oracle and file-backed tensors are resolved once at
// construction; estimate() is then a pure function of current_Y.
class Estimator {
 public:
  static Estimator oracle(const std::vector<TimeSignal>& references,
                          const StftConfig& config, double floor_epsilon);
  static Estimator file_backed(const std::vector<std::string>& spectra_paths,
                               const std::vector<std::string>& estimate_paths,
                               const StftConfig& config, double floor_epsilon,
                               int expected_bins, int expected_frames);
  static Estimator passthrough(double floor_epsilon);

  static Estimator build(const EstimatorKind& kind, const StftConfig& config,
                         double floor_epsilon, int expected_bins,
                         int expected_frames, long mixture_length,
                         int mixture_rate, int sources);

  // current_Y: separated spectrogram, channels = sources.
  FcmSeries estimate(const Spectrogram& current_y, double alpha) const;

  EstimatorType type() const { return type_; }
  double floor_epsilon() const { return floor_; }

 private:
  Estimator(EstimatorType type, double floor_epsilon)
      : type_(type), floor_(floor_epsilon) {}

  EstimatorType type_;
  double floor_;
  RealTensor d2_;     // fixed spectra (oracle / file_backed)
  ComplexTensor z_;   // fixed rank-1 vectors (oracle / file_backed)
};

// One-shot convenience wrapper over build + estimate.
FcmSeries estimate_fcm(const EstimatorKind& kind, const Spectrogram& current_y,
                       const StftConfig& config, double alpha,
                       double floor_epsilon);

}  // namespace idlta

#endif  // IDLTA_ESTIMATORS_HPP_
