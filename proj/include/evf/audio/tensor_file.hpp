// Copyright 2026 The evf authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "evf/tensor.hpp"

namespace evf::audio {

struct TensorFileError : Error {
  using Error::Error;
};
struct TensorFileBadMagic : TensorFileError {
  using TensorFileError::TensorFileError;
};
struct TensorFileTruncated : TensorFileError {
  using TensorFileError::TensorFileError;
};

// On-disk tensor format shared by every stage:
//   magic "EVFTENS1" (8 bytes) | dtype u32 (1 = IEEE f64) | rank u32 |
//   dims rank x u64 | payload row-major little-endian f64.
// Round trips are bit-exact.
void tensor_write(const Tensor& t, const std::string& path);
Tensor tensor_read(const std::string& path);

}  // namespace evf::audio
