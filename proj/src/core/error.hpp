// Copyright 2026 The evcharge Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef EVCHARGE_CORE_ERROR_HPP_
#define EVCHARGE_CORE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace evcharge {

// Base of every exception thrown by the core. The C API maps each subclass
// onto one status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text: bad CSV structure, timestamps, JSON.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that breaks a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Caller passed arguments outside an operation's precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace evcharge

#endif  // EVCHARGE_CORE_ERROR_HPP_
