// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#include "evf/audio/tensor_file.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace evf::audio {
namespace {

constexpr char kMagic[8] = {'E', 'V', 'F', 'T', 'E', 'N', 'S', '1'};
constexpr std::uint32_t kDtypeF64 = 1;

template <class T>
void append_le(std::vector<unsigned char>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

template <class T>
T read_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return static_cast<T>(v);
}

}  // namespace

void tensor_write(const Tensor& t, const std::string& path) {
  std::vector<unsigned char> out;
  out.reserve(16 + 8 * static_cast<std::size_t>(t.rank() + t.size()));
  out.insert(out.end(), kMagic, kMagic + 8);
  append_le(out, kDtypeF64);
  append_le(out, static_cast<std::uint32_t>(t.rank()));
  for (Eigen::Index i = 0; i < t.rank(); ++i)
    append_le(out, static_cast<std::uint64_t>(t.dim(i)));
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    std::uint64_t bits;
    double v = t[i];
    std::memcpy(&bits, &v, 8);
    append_le(out, bits);
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!os) throw IoError("write failed: " + path);
}

Tensor tensor_read(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open tensor file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());

  if (bytes.size() < 16) throw TensorFileTruncated("tensor file too small: " + path);
  if (std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw TensorFileBadMagic("bad tensor magic in " + path);
  if (read_le<std::uint32_t>(bytes.data() + 8) != kDtypeF64)
    throw TensorFileError("unsupported dtype in " + path);

  const std::uint32_t rank = read_le<std::uint32_t>(bytes.data() + 12);
  std::size_t pos = 16;
  if (bytes.size() < pos + 8 * rank) throw TensorFileTruncated("truncated dims in " + path);
  Shape shape(rank);
  for (std::uint32_t i = 0; i < rank; ++i) {
    shape[i] = static_cast<Eigen::Index>(read_le<std::uint64_t>(bytes.data() + pos));
    pos += 8;
  }

  Tensor t(shape);
  const std::size_t payload = 8 * static_cast<std::size_t>(t.size());
  if (bytes.size() != pos + payload)
    throw TensorFileTruncated("payload length mismatch in " + path);
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    std::uint64_t bits = read_le<std::uint64_t>(bytes.data() + pos + 8 * static_cast<std::size_t>(i));
    double v;
    std::memcpy(&v, &bits, 8);
    t[i] = v;
  }
  return t;
}

}  // namespace evf::audio
