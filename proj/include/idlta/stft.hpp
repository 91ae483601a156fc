// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IDLTA_STFT_HPP_
#define IDLTA_STFT_HPP_

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "idlta/signal.hpp"
#include "idlta/tensor.hpp"

namespace idlta {

enum class WindowKind { hamming, hann, sqrt_hann };

struct StftConfig {
  int window_length_samples = 4096;
  int hop_samples = 2048;
  WindowKind window_kind = WindowKind::hamming;
  int sample_rate_hz = 8000;

  int bins() const { return window_length_samples / 2 + 1; }
  int pad() const { return window_length_samples - hop_samples; }

  // Default experimental preset: 512 ms window, 256 ms hop.
  static StftConfig preset_ms(int window_ms, int hop_ms, int sample_rate_hz,
                              WindowKind kind = WindowKind::hamming);
};

void validate(const StftConfig& config);

// Periodic analysis window of the given kind.
std::vector<double> make_window(WindowKind kind, int length);

// Frame count for a signal of `length` samples after symmetric zero
// padding of (window - hop) at both ends.
int frame_count(long length, const StftConfig& config);

// One-sided complex STFT tensor, (bin, frame, channel), channel fastest.
// `source_length` is the pre-padding sample count; the inverse trims to it.
struct Spectrogram {
  int bins = 0;
  int frames = 0;
  int channels = 0;
  std::vector<cd> data;
  StftConfig config;
  long source_length = 0;

  Spectrogram() = default;
  Spectrogram(int i, int j, int m, const StftConfig& cfg, long src_len)
      : bins(i),
        frames(j),
        channels(m),
        data(static_cast<size_t>(i) * j * m, cd{}),
        config(cfg),
        source_length(src_len) {}

  cd& at(int i, int j, int m) {
    return data[(static_cast<size_t>(i) * frames + j) * channels + m];
  }
  const cd& at(int i, int j, int m) const {
    return data[(static_cast<size_t>(i) * frames + j) * channels + m];
  }

  // Channel vector x_ij at one time-frequency slot (contiguous).
  Eigen::Map<const Eigen::VectorXcd> slot(int i, int j) const {
    return Eigen::Map<const Eigen::VectorXcd>(
        data.data() + (static_cast<size_t>(i) * frames + j) * channels,
        channels);
  }
  Eigen::Map<Eigen::VectorXcd> slot(int i, int j) {
    return Eigen::Map<Eigen::VectorXcd>(
        data.data() + (static_cast<size_t>(i) * frames + j) * channels,
        channels);
  }
};

Spectrogram stft_forward(const TimeSignal& signal, const StftConfig& config);

// Weighted overlap-add synthesis with the canonical dual window
// (per-sample normalization by the realized squared-window sum),
// trimmed to `source_length`.
TimeSignal stft_inverse(const Spectrogram& spec);

}  // namespace idlta

#endif  // IDLTA_STFT_HPP_
