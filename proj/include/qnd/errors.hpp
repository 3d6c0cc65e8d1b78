// Copyright (c) 2026 The qnd-walk authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace qnd {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid inputs: broken invariants, malformed models or configs.
// Maps to CLI exit code 2.
class ValidationError : public Error {
public:
  using Error::Error;
};

// Runtime numerical failure: drift beyond repair tolerance, underflow
// of every branch, zero-probability outcome. Maps to CLI exit code 3.
class NumericalError : public Error {
public:
  using Error::Error;
};

}  // namespace qnd
