// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IDLTA_SIGNAL_HPP_
#define IDLTA_SIGNAL_HPP_

#include <Eigen/Dense>

#include "idlta/errors.hpp"

namespace idlta {

// Multichannel time-domain audio, rows = channels.
struct TimeSignal {
  Eigen::MatrixXd samples;  // channels x length
  int sample_rate_hz = 0;

  TimeSignal() = default;
  TimeSignal(Eigen::MatrixXd s, int rate)
      : samples(std::move(s)), sample_rate_hz(rate) {}

  int channels() const { return static_cast<int>(samples.rows()); }
  long length() const { return static_cast<long>(samples.cols()); }

  TimeSignal channel(int m) const {
    return TimeSignal(samples.row(m), sample_rate_hz);
  }
};

inline void check_signal(const TimeSignal& s, const char* what) {
  if (s.channels() < 1 || s.sample_rate_hz <= 0)
    throw InvalidInputError(std::string(what) + ": empty signal or bad rate");
  if (!s.samples.allFinite())
    throw InvalidInputError(std::string(what) + ": non-finite samples");
}

}  // namespace idlta

#endif  // IDLTA_SIGNAL_HPP_
