// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "idlta/stft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace idlta {
namespace {

// RAII wrapper around one pair of FFTW real<->complex plans.
// Single-threaded use only; plan creation is not reentrant.
class RealFft {
 public:
  explicit RealFft(int n)
      : n_(n),
        real_(fftw_alloc_real(n)),
        cplx_(fftw_alloc_complex(n / 2 + 1)) {
    fwd_ = fftw_plan_dft_r2c_1d(n_, real_, cplx_, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_c2r_1d(n_, cplx_, real_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(real_);
    fftw_free(cplx_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  // time -> one-sided spectrum, unnormalized.
  void forward(const double* in, cd* out) {
    std::copy(in, in + n_, real_);
    fftw_execute(fwd_);
    auto* c = reinterpret_cast<cd*>(cplx_);
    std::copy(c, c + n_ / 2 + 1, out);
  }

  // one-sided spectrum -> time, scaled by 1/n.
  void inverse(const cd* in, double* out) {
    auto* c = reinterpret_cast<cd*>(cplx_);
    std::copy(in, in + n_ / 2 + 1, c);
    // DC and Nyquist are real by symmetry; drop any spurious imaginary
    // part injected by complex-valued demixing.
    c[0] = cd(c[0].real(), 0.0);
    if (n_ % 2 == 0) c[n_ / 2] = cd(c[n_ / 2].real(), 0.0);
    fftw_execute(inv_);
    const double scale = 1.0 / n_;
    for (int k = 0; k < n_; ++k) out[k] = real_[k] * scale;
  }

 private:
  int n_;
  double* real_;
  fftw_complex* cplx_;
  fftw_plan fwd_;
  fftw_plan inv_;
};

}  // namespace

StftConfig StftConfig::preset_ms(int window_ms, int hop_ms, int sample_rate_hz,
                                 WindowKind kind) {
  auto to_samples = [&](int ms, const char* what) {
    long num = static_cast<long>(ms) * sample_rate_hz;
    if (num % 1000 != 0)
      throw InvalidInputError(std::string(what) +
                              ": not a whole sample count at this rate");
    return static_cast<int>(num / 1000);
  };
  StftConfig cfg;
  cfg.window_length_samples = to_samples(window_ms, "window length");
  cfg.hop_samples = to_samples(hop_ms, "hop");
  cfg.window_kind = kind;
  cfg.sample_rate_hz = sample_rate_hz;
  validate(cfg);
  return cfg;
}

void validate(const StftConfig& config) {
  if (config.window_length_samples <= 0 || config.hop_samples <= 0 ||
      config.sample_rate_hz <= 0)
    throw InvalidInputError("stft config: sizes must be positive");
  if (config.hop_samples > config.window_length_samples)
    throw InvalidInputError("stft config: hop exceeds window length");
}

std::vector<double> make_window(WindowKind kind, int length) {
  std::vector<double> w(length);
  const double step = 2.0 * std::numbers::pi / length;
  for (int k = 0; k < length; ++k) {
    switch (kind) {
      case WindowKind::hamming:
        w[k] = 0.54 - 0.46 * std::cos(step * k);
        break;
      case WindowKind::hann:
        w[k] = 0.5 - 0.5 * std::cos(step * k);
        break;
      case WindowKind::sqrt_hann:
        w[k] = std::sqrt(0.5 - 0.5 * std::cos(step * k));
        break;
    }
  }
  return w;
}

int frame_count(long length, const StftConfig& config) {
  const long padded = length + 2L * config.pad();
  return static_cast<int>((padded - config.window_length_samples) /
                          config.hop_samples) +
         1;
}

Spectrogram stft_forward(const TimeSignal& signal, const StftConfig& config) {
  validate(config);
  check_signal(signal, "stft_forward");
  const int len_win = config.window_length_samples;
  const int hop = config.hop_samples;
  if (signal.length() < len_win)
    throw InvalidInputError("stft_forward: signal shorter than one window");

  const int num_frames = frame_count(signal.length(), config);
  const int num_bins = config.bins();
  const int num_chan = signal.channels();
  Spectrogram out(num_bins, num_frames, num_chan, config, signal.length());

  const std::vector<double> window = make_window(config.window_kind, len_win);
  const long padded_len = signal.length() + 2L * config.pad();
  std::vector<double> padded(padded_len, 0.0);
  std::vector<double> frame(len_win);
  std::vector<cd> spec(num_bins);
  RealFft fft(len_win);

  for (int m = 0; m < num_chan; ++m) {
    std::fill(padded.begin(), padded.end(), 0.0);
    for (long t = 0; t < signal.length(); ++t)
      padded[t + config.pad()] = signal.samples(m, t);
    for (int j = 0; j < num_frames; ++j) {
      const long start = static_cast<long>(j) * hop;
      for (int k = 0; k < len_win; ++k)
        frame[k] = window[k] * padded[start + k];
      fft.forward(frame.data(), spec.data());
      for (int i = 0; i < num_bins; ++i) out.at(i, j, m) = spec[i];
    }
  }
  return out;
}

TimeSignal stft_inverse(const Spectrogram& spec) {
  validate(spec.config);
  const int len_win = spec.config.window_length_samples;
  const int hop = spec.config.hop_samples;
  if (spec.bins != spec.config.bins() || spec.frames < 1 || spec.channels < 1)
    throw InvalidInputError("stft_inverse: malformed spectrogram");

  const long covered = static_cast<long>(spec.frames - 1) * hop + len_win;
  long out_len = spec.source_length > 0
                     ? spec.source_length
                     : std::max(0L, covered - 2L * spec.config.pad());
  if (out_len + 2L * spec.config.pad() > covered)
    throw InvalidInputError("stft_inverse: source_length exceeds coverage");

  const std::vector<double> window =
      make_window(spec.config.window_kind, len_win);

  // Realized squared-window overlap-add; dividing by it yields the
  // canonical dual synthesis window, exact at every covered sample.
  std::vector<double> den(covered, 0.0);
  for (int j = 0; j < spec.frames; ++j) {
    const long start = static_cast<long>(j) * hop;
    for (int k = 0; k < len_win; ++k)
      den[start + k] += window[k] * window[k];
  }
  const double den_guard =
      1e-12 * *std::max_element(den.begin(), den.end());

  TimeSignal out(Eigen::MatrixXd::Zero(spec.channels, out_len),
                 spec.config.sample_rate_hz);
  std::vector<double> acc(covered);
  std::vector<cd> col(spec.bins);
  std::vector<double> frame(len_win);
  RealFft fft(len_win);

  for (int m = 0; m < spec.channels; ++m) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int j = 0; j < spec.frames; ++j) {
      for (int i = 0; i < spec.bins; ++i) col[i] = spec.at(i, j, m);
      fft.inverse(col.data(), frame.data());
      const long start = static_cast<long>(j) * hop;
      for (int k = 0; k < len_win; ++k)
        acc[start + k] += window[k] * frame[k];
    }
    for (long t = 0; t < out_len; ++t) {
      const long p = t + spec.config.pad();
      out.samples(m, t) = acc[p] / std::max(den[p], den_guard);
    }
  }
  return out;
}

}  // namespace idlta
