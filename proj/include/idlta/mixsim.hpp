// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IDLTA_MIXSIM_HPP_
#define IDLTA_MIXSIM_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "idlta/signal.hpp"
#include "idlta/stft.hpp"

namespace idlta {

enum class MixMode { instantaneous, convolutive };
enum class MixNormalization { none, unit_source_power };

struct MixSpec {
  MixMode mode = MixMode::instantaneous;
  Eigen::MatrixXd matrix;  // mics x sources, nonsingular
  std::vector<Eigen::MatrixXd> impulse_responses;  // per source: mics x taps
  MixNormalization normalization = MixNormalization::none;
};

// x_m = sum_n A_{mn} s_n, or sum_n h_{mn} * s_n trimmed to source length.
TimeSignal mix(const std::vector<TimeSignal>& sources, const MixSpec& spec);

// Narrowband sanity check: warns once the impulse responses reach half
// the analysis window.
std::optional<std::string> validate_narrowband(const MixSpec& spec,
                                               const StftConfig& stft);

// Seeded sparse exponentially decaying impulse responses (desk-scale
// stand-in for measured room responses), one mics-by-taps matrix per
// source. Deterministic across platforms.
std::vector<Eigen::MatrixXd> synthetic_impulse_responses(uint64_t seed,
                                                         int mics, int sources,
                                                         int taps);

}  // namespace idlta

#endif  // IDLTA_MIXSIM_HPP_
