// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/audio/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace evf::audio {
namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

}  // namespace

Waveform read_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open wav file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw MalformedWavError("not a RIFF/WAVE file: " + path);

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  const unsigned char* data = nullptr;
  std::uint32_t data_size = 0;

  // Walk chunks; unknown ones are skipped (chunks are word-aligned).
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + pos;
    std::uint32_t chunk_size = read_u32(hdr + 4);
    std::size_t body = pos + 8;
    if (body + chunk_size > bytes.size()) throw MalformedWavError("truncated chunk in " + path);
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw MalformedWavError("fmt chunk too small in " + path);
      const unsigned char* f = bytes.data() + body;
      format = read_u16(f);
      channels = read_u16(f + 2);
      sample_rate = read_u32(f + 4);
      bits = read_u16(f + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1);
  }

  if (!have_fmt || data == nullptr) throw MalformedWavError("missing fmt or data chunk in " + path);
  if (format != 1) throw UnsupportedWavError("non-PCM wav encoding in " + path);
  if (channels != 1) throw UnsupportedWavError("expected mono wav, got " +
                                               std::to_string(channels) + " channels in " + path);
  if (bits != 16) throw UnsupportedWavError("expected 16-bit wav, got " + std::to_string(bits) +
                                            " bits in " + path);
  if (sample_rate == 0) throw MalformedWavError("zero sample rate in " + path);

  Waveform w;
  w.sample_rate = static_cast<int>(sample_rate);
  const Eigen::Index n = data_size / 2;
  w.samples.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::int16_t s;
    std::memcpy(&s, data + 2 * i, 2);
    w.samples[i] = static_cast<double>(s) / 32768.0;
  }
  return w;
}

void write_wav(const Waveform& w, const std::string& path) {
  if (w.sample_rate <= 0) throw Error("write_wav: sample_rate must be positive");
  const std::uint32_t n = static_cast<std::uint32_t>(w.samples.size());
  const std::uint32_t data_size = 2 * n;

  std::vector<unsigned char> out;
  out.reserve(44 + data_size);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_size);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate) * 2);
  put_u16(out, 2);   // block align
  put_u16(out, 16);  // bits
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_size);
  for (Eigen::Index i = 0; i < w.samples.size(); ++i) {
    double v = std::clamp(w.samples[i], -1.0, 1.0);
    long q = std::lround(v * 32768.0);
    q = std::clamp(q, -32768L, 32767L);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace evf::audio
