// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IDLTA_EVAL_HPP_
#define IDLTA_EVAL_HPP_

#include <string>
#include <vector>

#include <json.hpp>

#include "idlta/signal.hpp"

namespace idlta {

// Scale-invariant SDR scores against the unprocessed reference-channel
// mixture baseline.
struct EvalReport {
  std::vector<double> sdr_per_source;              // dB, by reference index
  std::vector<double> sdr_improvement_per_source;  // dB
  double mean_sdr_improvement = 0.0;
  std::vector<int> permutation;  // permutation[n] = estimate index for ref n
  std::string baseline = "reference_channel_mixture";
};

// Scale-invariant SDR in dB, capped at +80:
//   s_target = (<est, ref>/||ref||^2) ref,
//   SDR = 10 log10(||s_target||^2 / ||est - s_target||^2).
double sdr(const TimeSignal& estimate, const TimeSignal& reference);

inline constexpr double kSdrCapDb = 80.0;

// Chooses the estimate-to-reference permutation maximizing total SDR
// (exhaustive for N <= 4, assignment algorithm above), then scores
// improvements against the mixture reference channel.
EvalReport align_and_score(const std::vector<TimeSignal>& estimates,
                           const std::vector<TimeSignal>& references,
                           const TimeSignal& mixture, int reference_channel);

// dB values rounded to 4 decimal places.
nlohmann::json to_json(const EvalReport& report);

}  // namespace idlta

#endif  // IDLTA_EVAL_HPP_
