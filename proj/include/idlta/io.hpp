// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IDLTA_IO_HPP_
#define IDLTA_IO_HPP_

#include <string>
#include <vector>

#include "idlta/signal.hpp"
#include "idlta/tensor.hpp"

namespace idlta {

enum class WavFormat { pcm16, float32 };

// RIFF/WAVE. PCM 16-bit maps to [-1, 1) by division by 32768;
// IEEE float 32-bit passes through.
TimeSignal read_wav(const std::string& path);
void write_wav(const TimeSignal& signal, const std::string& path,
               WavFormat format);

// Binary tensor exchange file: magic "IDLT", version, kind (real/complex),
// dims (I, J, N), then little-endian f64 payload, first index fastest,
// complex interleaved (re, im).
RealTensor read_real_tensor(const std::string& path);
ComplexTensor read_complex_tensor(const std::string& path);
void write_tensor(const RealTensor& t, const std::string& path);
void write_tensor(const ComplexTensor& t, const std::string& path);

// Experiment manifest binding a mixture to its sources (JSON text).
struct Manifest {
  std::string mixture;
  std::vector<std::string> references;
  std::vector<std::string> estimates;  // optional
  std::vector<std::string> spectra;    // optional
  int sample_rate_hz = 0;
};

// Load validates that every referenced file exists.
Manifest read_manifest(const std::string& path);
void write_manifest(const Manifest& m, const std::string& path);

}  // namespace idlta

#endif  // IDLTA_IO_HPP_
