// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "idlta/mixsim.hpp"

#include <cmath>
#include <random>

#include "idlta/errors.hpp"

namespace idlta {
namespace {

void check_sources(const std::vector<TimeSignal>& sources) {
  if (sources.empty()) throw InvalidInputError("mix: no sources");
  for (const TimeSignal& s : sources) {
    check_signal(s, "mix");
    if (s.channels() != 1)
      throw InvalidInputError("mix: sources must be mono");
    if (s.length() != sources[0].length() ||
        s.sample_rate_hz != sources[0].sample_rate_hz)
      throw InvalidInputError("mix: source length or rate mismatch");
  }
}

std::vector<Eigen::VectorXd> normalized_sources(
    const std::vector<TimeSignal>& sources, MixNormalization normalization) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(sources.size());
  for (const TimeSignal& s : sources) {
    Eigen::VectorXd v = s.samples.row(0);
    if (normalization == MixNormalization::unit_source_power) {
      const double power = v.squaredNorm() / v.size();
      if (power > 0.0) v /= std::sqrt(power);
    }
    out.push_back(std::move(v));
  }
  return out;
}

// 53-bit uniform in [0, 1) from raw generator bits; std distributions are
// not pinned across standard libraries.
double uniform01(std::mt19937_64& rng) {
  return std::ldexp(static_cast<double>(rng() >> 11), -53);
}

}  // namespace

TimeSignal mix(const std::vector<TimeSignal>& sources, const MixSpec& spec) {
  check_sources(sources);
  const int num_src = static_cast<int>(sources.size());
  const long len = sources[0].length();
  const std::vector<Eigen::VectorXd> s =
      normalized_sources(sources, spec.normalization);

  if (spec.mode == MixMode::instantaneous) {
    if (spec.matrix.rows() != spec.matrix.cols() ||
        spec.matrix.cols() != num_src)
      throw InvalidInputError("mix: matrix must be square, one row per source");
    if (std::abs(spec.matrix.determinant()) < 1e-12)
      throw InvalidInputError("mix: singular mixing matrix");
    const int mics = static_cast<int>(spec.matrix.rows());
    TimeSignal out(Eigen::MatrixXd::Zero(mics, len),
                   sources[0].sample_rate_hz);
    for (int m = 0; m < mics; ++m)
      for (int n = 0; n < num_src; ++n)
        out.samples.row(m) += spec.matrix(m, n) * s[n].transpose();
    return out;
  }

  if (static_cast<int>(spec.impulse_responses.size()) != num_src)
    throw InvalidInputError("mix: need one impulse-response set per source");
  const int mics = static_cast<int>(spec.impulse_responses[0].rows());
  if (mics != num_src)
    throw InvalidInputError("mix: determined setup needs mics == sources");
  for (const Eigen::MatrixXd& h : spec.impulse_responses) {
    if (h.rows() != mics || h.cols() < 1)
      throw InvalidInputError("mix: inconsistent impulse-response shapes");
    if (!h.allFinite())
      throw InvalidInputError("mix: non-finite impulse response");
  }

  // Direct time-domain convolution, trimmed to the source length.
  TimeSignal out(Eigen::MatrixXd::Zero(mics, len), sources[0].sample_rate_hz);
  for (int n = 0; n < num_src; ++n) {
    const Eigen::MatrixXd& h = spec.impulse_responses[n];
    const int taps = static_cast<int>(h.cols());
    for (int m = 0; m < mics; ++m) {
      for (long t = 0; t < len; ++t) {
        double acc = 0.0;
        const int kmax = static_cast<int>(std::min<long>(taps - 1, t));
        for (int k = 0; k <= kmax; ++k) acc += h(m, k) * s[n](t - k);
        out.samples(m, t) += acc;
      }
    }
  }
  return out;
}

std::optional<std::string> validate_narrowband(const MixSpec& spec,
                                               const StftConfig& stft) {
  if (spec.mode != MixMode::convolutive) return std::nullopt;
  long taps = 0;
  for (const Eigen::MatrixXd& h : spec.impulse_responses)
    taps = std::max<long>(taps, h.cols());
  if (2 * taps >= stft.window_length_samples)
    return "impulse responses (" + std::to_string(taps) +
           " taps) reach half the STFT window (" +
           std::to_string(stft.window_length_samples) +
           " samples); the narrowband approximation degrades";
  return std::nullopt;
}

std::vector<Eigen::MatrixXd> synthetic_impulse_responses(uint64_t seed,
                                                         int mics, int sources,
                                                         int taps) {
  if (mics < 1 || sources < 1 || taps < 1)
    throw InvalidInputError("synthetic_impulse_responses: bad shape");
  std::mt19937_64 rng(seed);
  std::vector<Eigen::MatrixXd> irs;
  irs.reserve(sources);
  for (int n = 0; n < sources; ++n) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(mics, taps);
    for (int m = 0; m < mics; ++m) {
      // Direct path with per-pair gain and small delay, then sparse
      // decaying reflections.
      const int delay = static_cast<int>(uniform01(rng) * std::min(8, taps));
      h(m, delay) = 0.5 + 0.5 * uniform01(rng);
      if (m != n % mics) h(m, delay) *= 0.7;  // off-source mics a bit softer
      for (int k = delay + 1; k < taps; ++k) {
        if (uniform01(rng) < 0.05) {
          const double sign = uniform01(rng) < 0.5 ? -1.0 : 1.0;
          h(m, k) = sign * (0.2 + 0.8 * uniform01(rng)) *
                    std::exp(-4.0 * k / taps);
        }
      }
    }
    irs.push_back(std::move(h));
  }
  return irs;
}

}  // namespace idlta
