// Copyright 2026 The MCFNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mcfnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor or image dimensions do not fit the operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A value lies outside the normalized range an operation requires.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Missing files, unreadable images, unmatched stems.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite losses or inputs.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Version mismatch, checksum failure or truncated checkpoint.
class CheckpointError : public Error {
 public:
  using Error::Error;
};

}  // namespace mcfnet
