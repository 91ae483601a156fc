// Copyright 2026 The idlta Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "idlta/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace idlta {
namespace {

// All file formats are little-endian regardless of host.
template <class T>
void put_le(std::string& out, T value) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bits.begin(), bits.end());
  out.append(reinterpret_cast<const char*>(bits.data()), sizeof(T));
}

template <class T>
T get_le(const std::string& buf, size_t pos) {
  std::array<unsigned char, sizeof(T)> bits;
  std::memcpy(bits.data(), buf.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(bits.begin(), bits.end());
  return std::bit_cast<T>(bits);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  return buf;
}

void write_file(const std::string& path, const std::string& buf) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("short write to " + path);
}

struct WavFmt {
  uint16_t tag = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits = 0;
};

}  // namespace

TimeSignal read_wav(const std::string& path) {
  const std::string buf = read_file(path);
  if (buf.size() < 12 || buf.compare(0, 4, "RIFF") != 0 ||
      buf.compare(8, 4, "WAVE") != 0)
    throw FormatError(path + ": not a RIFF/WAVE file");

  WavFmt fmt;
  bool have_fmt = false;
  size_t data_pos = 0, data_len = 0;
  size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::string id = buf.substr(pos, 4);
    const uint32_t len = get_le<uint32_t>(buf, pos + 4);
    pos += 8;
    if (pos + len > buf.size())
      throw FormatError(path + ": truncated chunk '" + id + "'");
    if (id == "fmt ") {
      if (len < 16) throw FormatError(path + ": fmt chunk too short");
      fmt.tag = get_le<uint16_t>(buf, pos);
      fmt.channels = get_le<uint16_t>(buf, pos + 2);
      fmt.sample_rate = get_le<uint32_t>(buf, pos + 4);
      fmt.bits = get_le<uint16_t>(buf, pos + 14);
      have_fmt = true;
    } else if (id == "data") {
      data_pos = pos;
      data_len = len;
    }
    pos += len + (len & 1);  // chunks are word-aligned
  }
  if (!have_fmt || data_pos == 0)
    throw FormatError(path + ": missing fmt or data chunk");
  if (fmt.channels == 0 || fmt.sample_rate == 0)
    throw FormatError(path + ": bad fmt chunk");

  const bool pcm16 = fmt.tag == 1 && fmt.bits == 16;
  const bool f32 = fmt.tag == 3 && fmt.bits == 32;
  if (!pcm16 && !f32)
    throw FormatError(path + ": unsupported codec (tag=" +
                      std::to_string(fmt.tag) +
                      ", bits=" + std::to_string(fmt.bits) +
                      "); need PCM16 or IEEE float32");

  const size_t bytes_per = pcm16 ? 2 : 4;
  const size_t frames = data_len / (bytes_per * fmt.channels);
  TimeSignal sig(Eigen::MatrixXd(fmt.channels, frames),
                 static_cast<int>(fmt.sample_rate));
  for (size_t t = 0; t < frames; ++t) {
    for (int m = 0; m < fmt.channels; ++m) {
      const size_t p = data_pos + (t * fmt.channels + m) * bytes_per;
      if (pcm16)
        sig.samples(m, t) = get_le<int16_t>(buf, p) / 32768.0;
      else
        sig.samples(m, t) = get_le<float>(buf, p);
    }
  }
  return sig;
}

void write_wav(const TimeSignal& signal, const std::string& path,
               WavFormat format) {
  check_signal(signal, "write_wav");
  const int chans = signal.channels();
  const long frames = signal.length();
  const uint16_t bytes_per = format == WavFormat::pcm16 ? 2 : 4;
  const uint32_t data_len =
      static_cast<uint32_t>(frames * chans * bytes_per);

  std::string buf;
  buf.reserve(44 + data_len);
  buf += "RIFF";
  put_le<uint32_t>(buf, 36 + data_len);
  buf += "WAVEfmt ";
  put_le<uint32_t>(buf, 16);
  put_le<uint16_t>(buf, format == WavFormat::pcm16 ? 1 : 3);
  put_le<uint16_t>(buf, static_cast<uint16_t>(chans));
  put_le<uint32_t>(buf, static_cast<uint32_t>(signal.sample_rate_hz));
  put_le<uint32_t>(buf,
                   static_cast<uint32_t>(signal.sample_rate_hz) * chans *
                       bytes_per);
  put_le<uint16_t>(buf, static_cast<uint16_t>(chans * bytes_per));
  put_le<uint16_t>(buf, static_cast<uint16_t>(bytes_per * 8));
  buf += "data";
  put_le<uint32_t>(buf, data_len);

  for (long t = 0; t < frames; ++t) {
    for (int m = 0; m < chans; ++m) {
      const double x = signal.samples(m, t);
      if (format == WavFormat::pcm16) {
        const double clamped =
            std::clamp(x, -1.0, 1.0 - std::ldexp(1.0, -15));
        put_le<int16_t>(buf,
                        static_cast<int16_t>(std::lrint(clamped * 32768.0)));
      } else {
        put_le<float>(buf, static_cast<float>(x));
      }
    }
  }
  write_file(path, buf);
}

namespace {

constexpr char kTensorMagic[4] = {'I', 'D', 'L', 'T'};
constexpr uint32_t kTensorVersion = 1;

std::string tensor_header(uint8_t kind, int ni, int nj, int nk) {
  std::string buf;
  buf.append(kTensorMagic, 4);
  put_le<uint32_t>(buf, kTensorVersion);
  buf.push_back(static_cast<char>(kind));
  put_le<uint32_t>(buf, static_cast<uint32_t>(ni));
  put_le<uint32_t>(buf, static_cast<uint32_t>(nj));
  put_le<uint32_t>(buf, static_cast<uint32_t>(nk));
  return buf;
}

// Returns (payload offset, dims) after checking magic/version/kind/size.
size_t parse_tensor_header(const std::string& buf, const std::string& path,
                           uint8_t want_kind, int* ni, int* nj, int* nk) {
  if (buf.size() < 21 || buf.compare(0, 4, kTensorMagic, 4) != 0)
    throw FormatError(path + ": bad tensor magic");
  if (get_le<uint32_t>(buf, 4) != kTensorVersion)
    throw FormatError(path + ": unsupported tensor version");
  const uint8_t kind = static_cast<uint8_t>(buf[8]);
  if (kind != want_kind)
    throw FormatError(path + ": tensor kind mismatch (got " +
                      std::to_string(kind) + ")");
  *ni = static_cast<int>(get_le<uint32_t>(buf, 9));
  *nj = static_cast<int>(get_le<uint32_t>(buf, 13));
  *nk = static_cast<int>(get_le<uint32_t>(buf, 17));
  const size_t count =
      static_cast<size_t>(*ni) * static_cast<size_t>(*nj) *
      static_cast<size_t>(*nk);
  const size_t expect = 21 + 8 * (static_cast<size_t>(kind) + 1) * count;
  if (buf.size() != expect)
    throw FormatError(path + ": payload length mismatch (have " +
                      std::to_string(buf.size()) + ", want " +
                      std::to_string(expect) + ")");
  return 21;
}

}  // namespace

RealTensor read_real_tensor(const std::string& path) {
  const std::string buf = read_file(path);
  int ni, nj, nk;
  size_t pos = parse_tensor_header(buf, path, 0, &ni, &nj, &nk);
  RealTensor t(ni, nj, nk);
  for (size_t k = 0; k < t.size(); ++k, pos += 8)
    t.v[k] = get_le<double>(buf, pos);
  return t;
}

ComplexTensor read_complex_tensor(const std::string& path) {
  const std::string buf = read_file(path);
  int ni, nj, nk;
  size_t pos = parse_tensor_header(buf, path, 1, &ni, &nj, &nk);
  ComplexTensor t(ni, nj, nk);
  for (size_t k = 0; k < t.size(); ++k, pos += 16)
    t.v[k] = cd(get_le<double>(buf, pos), get_le<double>(buf, pos + 8));
  return t;
}

void write_tensor(const RealTensor& t, const std::string& path) {
  std::string buf = tensor_header(0, t.ni, t.nj, t.nk);
  for (double x : t.v) put_le<double>(buf, x);
  write_file(path, buf);
}

void write_tensor(const ComplexTensor& t, const std::string& path) {
  std::string buf = tensor_header(1, t.ni, t.nj, t.nk);
  for (const cd& x : t.v) {
    put_le<double>(buf, x.real());
    put_le<double>(buf, x.imag());
  }
  write_file(path, buf);
}

Manifest read_manifest(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  Manifest m;
  try {
    m.mixture = doc.at("mixture").get<std::string>();
    m.references = doc.at("references").get<std::vector<std::string>>();
    if (doc.contains("estimates"))
      m.estimates = doc["estimates"].get<std::vector<std::string>>();
    if (doc.contains("spectra"))
      m.spectra = doc["spectra"].get<std::vector<std::string>>();
    m.sample_rate_hz = doc.at("sample_rate_hz").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }

  const auto base = std::filesystem::path(path).parent_path();
  auto check = [&](const std::string& p) {
    std::filesystem::path full(p);
    if (full.is_relative()) full = base / full;
    if (!std::filesystem::exists(full))
      throw FormatError(path + ": referenced file missing: " + p);
  };
  check(m.mixture);
  for (const auto& p : m.references) check(p);
  for (const auto& p : m.estimates) check(p);
  for (const auto& p : m.spectra) check(p);
  return m;
}

void write_manifest(const Manifest& m, const std::string& path) {
  nlohmann::json doc;
  doc["mixture"] = m.mixture;
  doc["references"] = m.references;
  if (!m.estimates.empty()) doc["estimates"] = m.estimates;
  if (!m.spectra.empty()) doc["spectra"] = m.spectra;
  doc["sample_rate_hz"] = m.sample_rate_hz;
  write_file(path, doc.dump(2) + "\n");
}

}  // namespace idlta
