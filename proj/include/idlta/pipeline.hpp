// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IDLTA_PIPELINE_HPP_
#define IDLTA_PIPELINE_HPP_

#include <vector>

#include "idlta/demixing.hpp"
#include "idlta/estimators.hpp"
#include "idlta/signal.hpp"
#include "idlta/stft.hpp"

namespace idlta {

struct SeparationConfig {
  double alpha = 0.5;
  int total_iterations = 100;
  int fcm_refresh_period = 10;
  EstimatorKind estimator;
  StftConfig stft;
  int reference_channel = 0;
  bool record_objective = false;
};

struct SeparationResult {
  std::vector<TimeSignal> separated;  // one mono signal per source
  DemixingSet w_final;
  std::vector<double> objective_trace;  // one entry per sweep if recorded
  int iterations_run = 0;
  int rows_skipped = 0;  // ill-conditioned updates skipped over the run
};

// Full separation loop: W <- identity, then alternate FCM estimation
// (every fcm_refresh_period sweeps, starting at the first) with one VCD
// sweep per iteration; finish with projection-back scale restoration and
// the inverse STFT.
SeparationResult separate(const TimeSignal& mixture,
                          const SeparationConfig& config);

// Same loop on the dedicated diagonal-FCM path. Requires alpha == 0.
SeparationResult separate_diagonal(const TimeSignal& mixture,
                                   const SeparationConfig& config);

// Projection back: scales row w_in by [W_i^{-1}]_{ref,n} so each separated
// source is its image at the reference microphone.
DemixingSet scale_restore(const DemixingSet& w, int reference_channel);

// Flooring rule for estimator output, from the mixture spectrogram.
double diag_power_floor(const Spectrogram& mixture_spec);

}  // namespace idlta

#endif  // IDLTA_PIPELINE_HPP_
